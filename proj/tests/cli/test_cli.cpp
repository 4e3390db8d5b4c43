#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "condmean/commands.hpp"
#include "condmean/config.hpp"
#include "condmean/output.hpp"
#include "core/bounds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace condmean::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "condmean_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string log;
  std::string err;
  fs::path out;
};

Run run_with(const std::string& command, const std::string& config_text, const fs::path& dir,
             std::optional<unsigned> workers = 1, std::optional<std::uint64_t> seed = {}) {
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg, std::ios::binary) << config_text;
  Manifest m;
  m.command = command;
  m.config_path = cfg;
  m.out_dir = dir / "out";
  m.workers = workers;
  m.seed = seed;
  std::ostringstream log, err;
  Run r;
  r.code = run(m, log, err);
  r.log = log.str();
  r.err = err.str();
  r.out = m.out_dir;
  return r;
}

Run run_with(const std::string& command, const json& config, const fs::path& dir,
             std::optional<unsigned> workers = 1, std::optional<std::uint64_t> seed = {}) {
  return run_with(command, config.dump(), dir, workers, seed);
}

// Minimal RFC-4180 reader: skips '#' comment lines, handles quoted fields.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, at_line_start = true, comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (at_line_start && c == '#') comment = true;
    at_line_start = false;
    if (comment) {
      if (c == '\n') {
        comment = false;
        at_line_start = true;
      }
      continue;
    }
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r') {
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      at_line_start = true;
    } else {
      field += c;
    }
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

const json kTailN2 = {{"law", {{"kind", "uniform"}, {"ell", 1}}},
                      {"n", 2},
                      {"delta", 0.1},
                      {"s", "delta"},
                      {"trials", 200000},
                      {"seed", 2}};

}  // namespace

TEST_CASE("tail run with the N = 2 oracle") {
  const auto r = run_with("tail", kTailN2, scratch("tail_n2"));
  REQUIRE(r.code == kExitOk);
  const json doc = json::parse(slurp(r.out / "results.json"));
  CHECK(doc["tool"] == "condmean");
  CHECK(doc["command"] == "tail");
  CHECK(doc["seed"] == 2);
  REQUIRE(doc["records"].size() == 1);
  const json& rec = doc["records"][0];
  CHECK(rec["oracle"].get<double>() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(std::abs(rec["p_hat"].get<double>() - 0.01) <= 4.0 * rec["stderr"].get<double>());
  CHECK(rec["pass"] == true);
  CHECK(rec["oracle_agree"] == true);
  CHECK(rec["thm52_confirmed"] == true);
  CHECK(fs::exists(r.out / "plot_tail_n2.csv"));
  CHECK(fs::exists(r.out / "timing.json"));

  const std::string csv = slurp(r.out / "results.csv");
  const std::string first = csv.substr(0, csv.find('\n') + 1);
  CHECK(first.rfind("# condmean 1.0.0 command=tail seed=2 config=", 0) == 0);
  CHECK(first.size() >= 2);
  CHECK(first.substr(first.size() - 2) == "\r\n");
  CHECK(first.find(doc["config_hash"].get<std::string>()) != std::string::npos);
}

TEST_CASE("bound columns re-evaluate to the library bounds") {
  const json cfg = {{"law", {{"kind", "uniform"}, {"ell", 2}}},
                    {"n", {2, 4, 8}},
                    {"delta", {0.02, 0.05, 0.1}},
                    {"s", "delta"},
                    {"trials", 5000},
                    {"seed", 3}};
  const auto r = run_with("tail", cfg, scratch("self_consistency"));
  REQUIRE((r.code == kExitOk || r.code == kExitAssertion));
  const auto rows = read_csv(slurp(r.out / "results.csv"));
  REQUIRE(rows.size() == 10);
  const auto& h = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t n = std::stoul(row[column(h, "n")]);
    const double ell = std::stod(row[column(h, "ell")]);
    const double delta = std::stod(row[column(h, "delta")]);
    const double s = std::stod(row[column(h, "s")]);
    CHECK(std::stod(row[column(h, "bound_thm42")]) == condmean::bound_thm42(n, ell, delta).value);
    const auto b52 = condmean::bound_thm52(n, ell, delta, s);
    CHECK(std::stod(row[column(h, "bound_thm52")]) == b52.published.value);
    CHECK(std::stod(row[column(h, "bound_thm52_pairwise")]) == b52.pairwise.value);
    CHECK(std::stod(row[column(h, "oracle")]) ==
          condmean::fiber_length_tail_exact_uniform(n, ell, std::sqrt(double(n)) * delta));
    CHECK(row[column(h, "thm61_applicable")].empty());
  }

  const json table = {{"table", "uniform"}, {"n", {2, 10}}, {"ell", {1, 2}},
                      {"delta", {0.01, 0.05}}};
  const auto b = run_with("bounds-table", table, scratch("bounds_self"));
  REQUIRE(b.code == kExitOk);
  const auto brows = read_csv(slurp(b.out / "results.csv"));
  const auto& bh = brows[0];
  bool saw_example = false;
  for (std::size_t i = 1; i < brows.size(); ++i) {
    const auto& row = brows[i];
    const std::size_t n = std::stoul(row[column(bh, "n")]);
    const double ell = std::stod(row[column(bh, "ell")]);
    const double delta = std::stod(row[column(bh, "delta")]);
    const double v = std::stod(row[column(bh, "bound_thm52")]);
    CHECK(v == condmean::bound_thm52(n, ell, delta, delta).published.value);
    CHECK(std::stod(row[column(bh, "bound_lemma41")]) ==
          condmean::bound_lemma41(n, ell, delta).value);
    if (n == 10 && ell == 1.0 && delta == 0.05) {
      CHECK(v == doctest::Approx(0.0625));
      saw_example = true;
    }
  }
  CHECK(saw_example);
}

TEST_CASE("outputs do not depend on the worker count") {
  const json rcm = {{"law", {{"kind", "uniform"}, {"ell", 1}}},
                    {"graph", {{"kind", "path"}, {"n", 9}}},
                    {"radius", 4},
                    {"s", {0.01}},
                    {"trials", 20000},
                    {"seed", 7}};
  const json wegner = {{"graph", {{"kind", "path"}, {"n", 8}}},
                       {"law", {{"kind", "gaussian"}}},
                       {"s", 0.05},
                       {"t", {-1.0, 0.0, 1.0}},
                       {"trials", 600},
                       {"seed", 5}};
  const std::vector<std::pair<std::string, json>> runs{
      {"tail", kTailN2}, {"rcm", rcm}, {"wegner", wegner}};
  for (const auto& [command, cfg] : runs) {
    const auto a = run_with(command, cfg, scratch(command + "_w1"), 1u);
    const auto b = run_with(command, cfg, scratch(command + "_w4"), 4u);
    INFO(command);
    REQUIRE(a.code == b.code);
    CHECK(slurp(a.out / "results.csv") == slurp(b.out / "results.csv"));
    CHECK(slurp(a.out / "results.json") == slurp(b.out / "results.json"));
  }
}

TEST_CASE("seed override") {
  const auto a = run_with("tail", kTailN2, scratch("seed_a"), 1u, 99u);
  const auto b = run_with("tail", kTailN2, scratch("seed_b"), 1u);
  REQUIRE(a.code == kExitOk);
  const std::string csv = slurp(a.out / "results.csv");
  CHECK(csv.rfind("# condmean 1.0.0 command=tail seed=99 ", 0) == 0);
  CHECK(csv != slurp(b.out / "results.csv"));
}

TEST_CASE("config errors stop before any output") {
  SUBCASE("malformed JSON") {
    const auto r = run_with("tail", std::string("{\"law\": "), scratch("malformed"));
    CHECK(r.code == kExitConfig);
    CHECK_FALSE(fs::exists(r.out));
    CHECK(r.err.find("config error") != std::string::npos);
  }
  SUBCASE("empty file") {
    const auto dir = scratch("empty");
    std::ofstream(dir / "empty.json").close();
    const auto res = validate_config("tail", dir / "empty.json");
    CHECK_FALSE(res.ok());
    CHECK_FALSE(res.errors.empty());
    CHECK(run_with("tail", std::string(), dir).code == kExitConfig);
  }
  SUBCASE("missing file") {
    CHECK_FALSE(validate_config("tail", "/nonexistent/condmean.json").ok());
  }
  SUBCASE("every problem is listed") {
    json cfg = kTailN2;
    cfg["trials"] = -5;
    cfg["colour"] = "blue";
    cfg["law"]["ell"] = "wide";
    const auto res = validate_config_json("tail", cfg);
    REQUIRE(res.errors.size() >= 3);
    auto mentions = [&](const std::string& what) {
      for (const auto& e : res.errors)
        if (e.find(what) != std::string::npos) return true;
      return false;
    };
    CHECK(mentions("colour: unknown key"));
    CHECK(mentions("trials"));
    CHECK(mentions("law.ell"));
    const auto r = run_with("tail", cfg, scratch("many_errors"));
    CHECK(r.code == kExitConfig);
    CHECK_FALSE(fs::exists(r.out));
  }
  SUBCASE("alpha outside (0, 1)") {
    json cfg = kTailN2;
    cfg.erase("delta");
    cfg["s"] = {0.01};
    cfg["alpha"] = 1.5;
    const auto res = validate_config_json("tail", cfg);
    REQUIRE_FALSE(res.ok());
    bool named = false;
    for (const auto& e : res.errors) named = named || e.rfind("alpha", 0) == 0;
    CHECK(named);
  }
  SUBCASE("both delta and alpha") {
    json cfg = kTailN2;
    cfg["alpha"] = 0.5;
    CHECK_FALSE(validate_config_json("tail", cfg).ok());
  }
  SUBCASE("mismatched command") {
    json cfg = kTailN2;
    cfg["command"] = "rcm";
    CHECK_FALSE(validate_config_json("tail", cfg).ok());
  }
}

TEST_CASE("minimal configs round-trip through validation") {
  const json minimal = {{"law", {{"kind", "uniform"}, {"ell", 1}}}, {"delta", 0.1}};
  const auto res = validate_config_json("tail", minimal);
  REQUIRE(res.ok());
  CHECK(res.normalized["trials"] == 100000);
  CHECK(res.normalized["seed"] == 1);
  const auto again = validate_config_json("tail", res.normalized);
  REQUIRE(again.ok());
  CHECK(again.normalized == res.normalized);

  const auto r = validate_config_json("rcm", {{"law", {{"kind", "uniform"}}}, {"s", {0.01}}});
  REQUIRE(r.ok());
  CHECK(r.normalized["alpha"].get<double>() == doctest::Approx(1.0 / 3.0));

  // Worker counts stay out of the effective config and so out of the hash.
  json with_workers = minimal;
  with_workers["workers"] = 3;
  const auto w = validate_config_json("tail", with_workers);
  REQUIRE(w.ok());
  CHECK(effective_config(w.normalized, 5) == effective_config(res.normalized, 5));
  CHECK(effective_config(res.normalized, 5)["seed"] == 5);
}

TEST_CASE("every shipped config validates") {
  const std::vector<std::pair<std::string, std::string>> shipped{
      {"fiber", "fiber_identity.json"},     {"tail", "tail_n2_oracle.json"},
      {"tail", "tail_bound_grid.json"},     {"tail", "tail_smooth.json"},
      {"gauss-check", "gauss_check.json"},  {"wegner", "wegner_path16.json"},
      {"rcm", "rcm_path.json"},             {"partition", "partition_random.json"},
      {"bounds-table", "bounds_thm52.json"}};
  for (const auto& [command, file] : shipped) {
    const auto res = validate_config(command, fs::path(CONDMEAN_CONFIG_DIR) / file);
    INFO(file);
    for (const auto& e : res.errors) MESSAGE(e);
    CHECK(res.ok());
  }
}

TEST_CASE("assertion failures exit with code 3 but still write outputs") {
  const json rcm = {{"law", {{"kind", "uniform"}, {"ell", 1}}},
                    {"graph", {{"kind", "path"}, {"n", 9}}},
                    {"radius", 4},
                    {"s", {0.001}},
                    {"trials", 20000},
                    {"seed", 7}};
  const auto r = run_with("rcm", rcm, scratch("rcm_fail"));
  CHECK(r.code == kExitAssertion);
  CHECK(fs::exists(r.out / "results.csv"));
}

TEST_CASE("worker precedence") {
  const auto dir = scratch("workers_env");
  setenv("CONDMEAN_WORKERS", "zero", 1);
  CHECK(run_with("tail", kTailN2, dir, std::nullopt).code == kExitConfig);
  // An explicit worker count wins over the environment.
  CHECK(run_with("tail", kTailN2, dir, 2u).code == kExitOk);
  setenv("CONDMEAN_WORKERS", "3", 1);
  const auto r = run_with("tail", kTailN2, scratch("workers_env3"), std::nullopt);
  CHECK(r.code == kExitOk);
  CHECK(json::parse(slurp(r.out / "timing.json"))["workers"] == 3);
  unsetenv("CONDMEAN_WORKERS");
  json cfg = kTailN2;
  cfg["workers"] = 2;
  const auto c = run_with("tail", cfg, scratch("workers_cfg"), std::nullopt);
  CHECK(json::parse(slurp(c.out / "timing.json"))["workers"] == 2);
}

TEST_CASE("command line parsing") {
  std::vector<std::string> args{"condmean", "tail", "--out", "/tmp/x"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(run_main(static_cast<int>(argv.size()), argv.data()) == kExitConfig);

  std::vector<std::string> bad{"condmean", "frobnicate", "--config", "a.json", "--out", "o"};
  std::vector<char*> bad_argv;
  for (auto& a : bad) bad_argv.push_back(a.data());
  CHECK(run_main(static_cast<int>(bad_argv.size()), bad_argv.data()) == kExitConfig);
}

TEST_CASE("output helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
