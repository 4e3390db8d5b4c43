#include "condmean/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "condmean/condmean.h"

namespace condmean::cli {

using nlohmann::json;

bool is_command(std::string_view name) {
  for (const char* c : kCommands)
    if (name == c) return true;
  return false;
}

namespace {

using Errors = std::vector<std::string>;
using RealRule = std::function<bool(double)>;

bool integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15;
}

std::int64_t as_int(const json& v) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    return u > static_cast<std::uint64_t>(INT64_MAX) ? INT64_MAX : static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  return static_cast<std::int64_t>(v.get<double>());
}

/// Reads one JSON object, recording defaults and errors, and builds its
/// normalized form.
class Obj {
 public:
  Obj(const json& in, std::string where, Errors& errors)
      : in_(in.is_object() ? in : json::object()), where_(std::move(where)),
        errors_(errors) {
    if (!in.is_object()) error("", "must be a JSON object");
  }

  json out = json::object();

  bool has(const std::string& key) const { return in_.contains(key); }

  void error(const std::string& key, const std::string& what) {
    std::string place = where_;
    if (!key.empty()) place += place.empty() ? key : "." + key;
    errors_.push_back((place.empty() ? std::string("config") : place) + ": " + what);
  }

  double real(const std::string& key, std::optional<double> fallback, const RealRule& rule,
              const char* rule_text) {
    known_.insert(key);
    if (!has(key)) {
      if (!fallback) {
        error(key, "is required");
        return NAN;
      }
      out[key] = *fallback;
      return *fallback;
    }
    const json& v = in_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      error(key, "must be a finite number");
      return fallback.value_or(NAN);
    }
    const double d = v.get<double>();
    if (!rule(d)) error(key, std::string("must be ") + rule_text);
    out[key] = d;
    return d;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback,
                       std::int64_t min, std::int64_t max = INT64_MAX) {
    known_.insert(key);
    if (!has(key)) {
      if (!fallback) {
        error(key, "is required");
        return min;
      }
      out[key] = *fallback;
      return *fallback;
    }
    const json& v = in_.at(key);
    if (!integral(v)) {
      error(key, "must be an integer");
      return fallback.value_or(min);
    }
    const std::int64_t i = as_int(v);
    if (i < min || i > max) error(key, "must lie in [" + std::to_string(min) + ", " +
                                           std::to_string(max) + "]");
    out[key] = i;
    return i;
  }

  /// A number or a non-empty array of numbers; normalized to an array.
  std::vector<double> reals(const std::string& key, std::optional<std::vector<double>> fallback,
                            const RealRule& rule, const char* rule_text) {
    known_.insert(key);
    if (!has(key)) {
      if (!fallback) {
        error(key, "is required");
        return {};
      }
      out[key] = *fallback;
      return *fallback;
    }
    const json& v = in_.at(key);
    std::vector<double> values;
    const json arr = v.is_array() ? v : json::array({v});
    if (arr.empty()) error(key, "must not be empty");
    for (const json& e : arr) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        error(key, "entries must be finite numbers");
        return fallback.value_or(std::vector<double>{});
      }
      const double d = e.get<double>();
      if (!rule(d)) error(key, std::string("entries must be ") + rule_text);
      values.push_back(d);
    }
    out[key] = values;
    return values;
  }

  std::vector<std::int64_t> integers(const std::string& key,
                                     std::optional<std::vector<std::int64_t>> fallback,
                                     std::int64_t min, std::int64_t max = INT64_MAX) {
    known_.insert(key);
    if (!has(key)) {
      if (!fallback) {
        error(key, "is required");
        return {};
      }
      out[key] = *fallback;
      return *fallback;
    }
    const json& v = in_.at(key);
    std::vector<std::int64_t> values;
    const json arr = v.is_array() ? v : json::array({v});
    if (arr.empty()) error(key, "must not be empty");
    for (const json& e : arr) {
      if (!integral(e)) {
        error(key, "entries must be integers");
        return fallback.value_or(std::vector<std::int64_t>{});
      }
      const std::int64_t i = as_int(e);
      if (i < min || i > max)
        error(key, "entries must lie in [" + std::to_string(min) + ", " +
                       std::to_string(max) + "]");
      values.push_back(i);
    }
    out[key] = values;
    return values;
  }

  std::string choice(const std::string& key, std::optional<std::string> fallback,
                     const std::vector<std::string>& allowed) {
    known_.insert(key);
    if (!has(key)) {
      if (!fallback) {
        error(key, "is required");
        return allowed.front();
      }
      out[key] = *fallback;
      return *fallback;
    }
    const json& v = in_.at(key);
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    if (!v.is_string()) {
      error(key, "must be one of: " + list);
      return fallback.value_or(allowed.front());
    }
    const std::string s = v.get<std::string>();
    bool found = false;
    for (const auto& a : allowed) found = found || a == s;
    if (!found) error(key, "must be one of: " + list + " (got \"" + s + "\")");
    out[key] = s;
    return found ? s : fallback.value_or(allowed.front());
  }

  bool flag(const std::string& key, bool fallback) {
    known_.insert(key);
    if (!has(key)) {
      out[key] = fallback;
      return fallback;
    }
    const json& v = in_.at(key);
    if (!v.is_boolean()) {
      error(key, "must be true or false");
      return fallback;
    }
    out[key] = v.get<bool>();
    return v.get<bool>();
  }

  /// Raw access for keys with bespoke handling (the key counts as known).
  const json* raw(const std::string& key) {
    known_.insert(key);
    return has(key) ? &in_.at(key) : nullptr;
  }

  std::string child(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  Errors& errors() { return errors_; }

  /// Reports keys that no accessor asked for.
  void finish() {
    for (const auto& item : in_.items())
      if (!known_.count(item.key())) error(item.key(), "unknown key");
  }

 private:
  json in_;
  std::string where_;
  Errors& errors_;
  std::set<std::string> known_;
};

const RealRule positive = [](double v) { return v > 0.0; };
const RealRule nonnegative = [](double v) { return v >= 0.0; };
const RealRule any_real = [](double) { return true; };
const RealRule open_unit = [](double v) { return v > 0.0 && v < 1.0; };
const RealRule unit_interval_left = [](double v) { return v >= 0.0 && v < 1.0; };

/// Law object. Returns the kind ("" on error). Smooth laws are built through
/// the library so that a bad parameter is a config error, not a runtime one.
std::string read_law(Obj& parent, const std::string& key, const char* default_kind) {
  const json* in = parent.raw(key);
  const json fallback = json{{"kind", default_kind}};
  Obj law(in ? *in : fallback, parent.child(key), parent.errors());
  const std::string kind =
      law.choice("kind", std::nullopt, {"uniform", "gaussian", "cosine-bump", "linear-tilt"});
  if (kind == "uniform") {
    law.real("ell", 1.0, positive, "positive");
    law.real("offset", 0.0, any_real, "finite");
  } else if (kind == "gaussian") {
    law.real("mean", 0.0, any_real, "finite");
    law.real("variance", 1.0, positive, "positive");
  } else {
    const double beta = law.real("beta", 0.5, unit_interval_left, "in [0, 1)");
    const double ell = law.real("ell", 1.0, positive, "positive");
    if (unit_interval_left(beta) && positive(ell)) {
      cm_law* handle = nullptr;
      if (cm_law_registry(kind.c_str(), beta, ell, &handle) != CM_OK)
        law.error("", std::string("invalid density: ") + cm_last_error());
      cm_law_free(handle);
    }
  }
  law.finish();
  parent.out[key] = law.out;
  return kind;
}

void read_graph(Obj& parent, const std::string& key, const json& fallback) {
  const json* in = parent.raw(key);
  Obj g(in ? *in : fallback, parent.child(key), parent.errors());
  const std::string kind = g.choice("kind", std::nullopt, {"path", "box"});
  if (kind == "path") {
    g.integer("n", std::nullopt, 1, 400);
  } else {
    const std::int64_t d = g.integer("dimension", std::nullopt, 1, 3);
    const std::int64_t side = g.integer("side", std::nullopt, 1, 400);
    double volume = 1.0;
    for (std::int64_t i = 0; i < d; ++i) volume *= static_cast<double>(side);
    if (volume > 400.0) g.error("", "box volume must not exceed 400 vertices");
  }
  g.finish();
  parent.out[key] = g.out;
}

void common(Obj& root) {
  if (const json* seed = root.raw("seed")) {
    if (seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
      root.out["seed"] = seed->get<std::uint64_t>();
    else
      root.error("seed", "must be a nonnegative 64-bit integer");
  } else {
    root.out["seed"] = 1;
  }
  if (const json* w = root.raw("workers")) {
    if (integral(*w) && as_int(*w) >= 1 && as_int(*w) <= 1024)
      root.out["workers"] = as_int(*w);
    else
      root.error("workers", "must be an integer in [1, 1024]");
  }
  root.flag("svg", false);
  if (const json* c = root.raw("command")) {
    if (!c->is_string()) root.error("command", "must be a string");
  }
}

void fiber_schema(Obj& root) {
  root.integers("n", std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9, 10}, 2, 1000);
  root.reals("ell", std::vector<double>{0.5, 1.0, 2.0}, positive, "positive");
  root.integer("samples", 10000, 1, 100'000'000);
  root.real("step_rel", 1e-5, [](double v) { return v >= 1e-7 && v < 1.0; },
            "in [1e-7, 1)");
}

std::string mode_for(const std::string& kind) {
  if (kind == "uniform") return "uniform-exact";
  if (kind == "gaussian") return "gaussian-closed-form";
  return "smooth-numeric";
}

void tail_schema(Obj& root) {
  const std::string kind = read_law(root, "law", "uniform");
  root.integers("n", std::vector<std::int64_t>{2}, 2, 10000);
  root.integer("trials", 100000, 100, 1'000'000'000);
  root.integer("grid", 256, 256, 1 << 20);
  root.flag("clamp", false);
  const std::string mode = root.choice("mode", mode_for(kind),
                                       {"uniform-exact", "smooth-numeric",
                                        "gaussian-closed-form"});
  if (!kind.empty() && mode != mode_for(kind))
    root.error("mode", "is inconsistent with law kind \"" + kind + "\"");

  const bool has_delta = root.has("delta");
  const bool has_alpha = root.has("alpha");
  if (has_delta == has_alpha) {
    root.error("", "exactly one of \"delta\" and \"alpha\" must be given");
    root.raw("delta");
    root.raw("alpha");
    root.raw("s");
    return;
  }
  if (has_delta) {
    root.reals("delta", std::nullopt, positive, "positive");
    const json* s = root.raw("s");
    if (s == nullptr || (s->is_string() && s->get<std::string>() == "delta")) {
      root.out["s"] = "delta";
    } else {
      root.reals("s", std::nullopt, positive, "positive");
    }
  } else {
    root.reals("alpha", std::nullopt, open_unit, "in (0, 1)");
    root.reals("s", std::nullopt, positive, "positive");
  }
}

void rcm_schema(Obj& root) {
  const std::string kind = read_law(root, "law", "uniform");
  if (!kind.empty() && kind != "uniform")
    root.error("law", "the regularity experiment needs a uniform law");
  read_graph(root, "graph", json{{"kind", "path"}, {"n", 9}});
  if (const json* c = root.raw("center")) {
    if (integral(*c) && as_int(*c) >= 0) root.out["center"] = as_int(*c);
    else root.error("center", "must be a nonnegative integer");
  }
  root.integer("radius", 4, 1, 400);
  root.reals("s", std::nullopt, positive, "positive");
  root.real("alpha", 1.0 / 3.0, open_unit, "in (0, 1)");
  root.integer("trials", 100000, 100, 1'000'000'000);
  if (const json* g = root.raw("growth")) {
    Obj growth(*g, root.child("growth"), root.errors());
    growth.real("c_d", std::nullopt, positive, "positive");
    growth.integer("d", std::nullopt, 1, 3);
    growth.finish();
    root.out["growth"] = growth.out;
  }
}

void partition_schema(Obj& root) {
  const std::string kind = read_law(root, "law", "uniform");
  if (kind == "gaussian") root.error("law", "partitions need a law with bounded support");
  root.integer("n", 2, 1, 12);
  root.real("s", 0.1, nonnegative, "nonnegative");
  root.integer("trials", 100000, 100, 1'000'000'000);
  {
    const json* m = root.raw("mu");
    Obj mu(m ? *m : json::object(), root.child("mu"), root.errors());
    mu.choice("rule", "constant", {"constant", "median-eta"});
    mu.real("value", 0.0, any_real, "finite");
    mu.finish();
    root.out["mu"] = mu.out;
  }
  std::size_t partitions = 0;
  if (const json* cuts = root.raw("cuts")) {
    if (!cuts->is_array()) {
      root.error("cuts", "must be an array of cut-point arrays");
    } else {
      json list = json::array();
      for (std::size_t i = 0; i < cuts->size(); ++i) {
        const json& c = (*cuts)[i];
        bool ok = c.is_array() && c.size() >= 2;
        for (std::size_t k = 0; ok && k < c.size(); ++k) {
          ok = c[k].is_number() && std::isfinite(c[k].get<double>()) &&
               (k == 0 || c[k].get<double>() > c[k - 1].get<double>());
        }
        if (!ok)
          root.error("cuts[" + std::to_string(i) + "]",
                     "must be at least two strictly increasing finite numbers");
        list.push_back(c);
      }
      partitions += cuts->size();
      root.out["cuts"] = list;
    }
  } else {
    root.out["cuts"] = json::array();
  }
  {
    const json* r = root.raw("random");
    Obj random(r ? *r : json::object(), root.child("random"), root.errors());
    const auto count = random.integer("count", r ? 20 : 0, 0, 10000);
    const auto lo = random.integer("min_intervals", 2, 1, 64);
    const auto hi = random.integer("max_intervals", 4, 1, 64);
    if (hi < lo) random.error("max_intervals", "must be >= min_intervals");
    random.finish();
    root.out["random"] = random.out;
    partitions += static_cast<std::size_t>(std::max<std::int64_t>(count, 0));
  }
  if (partitions == 0) root.error("", "no partitions: give \"cuts\" or \"random\"");
}

void wegner_schema(Obj& root) {
  read_graph(root, "graph", json{{"kind", "path"}, {"n", 16}});
  read_law(root, "law", "gaussian");
  root.real("s", 0.01, nonnegative, "nonnegative");
  root.integer("trials", 100000, 100, 1'000'000'000);
  root.choice("kinetic", "adjacency", {"adjacency", "laplacian"});
  root.real("identity_tolerance", 1e-9, positive, "positive");
  const json* t = root.raw("t");
  if (t && t->is_object()) {
    Obj sweep(*t, root.child("t"), root.errors());
    const double from = sweep.real("from", std::nullopt, any_real, "finite");
    const double to = sweep.real("to", std::nullopt, any_real, "finite");
    sweep.integer("points", std::nullopt, 1, 100000);
    if (to < from) sweep.error("to", "must be >= from");
    sweep.finish();
    root.out["t"] = sweep.out;
  } else if (t) {
    root.reals("t", std::nullopt, any_real, "finite");
  } else {
    root.out["t"] = json{{"from", -3.0}, {"to", 3.0}, {"points", 21}};
  }
}

void gauss_schema(Obj& root) {
  root.integer("n", 4, 2, 100000);
  const auto samples = root.integer("samples", 1000000, 100, 100'000'000);
  const auto bins = root.integer("bins", 10, 1, 10000);
  if (samples < 100 * bins) root.error("samples", "must be at least 100 per bin");
  root.real("bin_width", 0.02, positive, "positive");
  root.real("ks_tolerance", 0.01, positive, "positive");
  root.real("peak_slack", 0.05, nonnegative, "nonnegative");
}

void bounds_schema(Obj& root) {
  const std::string table =
      root.choice("table", "uniform", {"uniform", "smooth", "wegner", "rcm"});
  if (table == "uniform") {
    root.integers("n", std::nullopt, 1, 1'000'000);
    root.reals("ell", std::vector<double>{1.0}, positive, "positive");
    root.reals("delta", std::nullopt, positive, "positive");
    const json* s = root.raw("s");
    if (s == nullptr || (s->is_string() && s->get<std::string>() == "delta"))
      root.out["s"] = "delta";
    else
      root.reals("s", std::nullopt, positive, "positive");
  } else if (table == "smooth") {
    const std::string kind = read_law(root, "law", "cosine-bump");
    if (kind == "uniform" || kind == "gaussian")
      root.error("law", "the smooth table needs a smooth law");
    root.integers("n", std::nullopt, 1, 1'000'000);
    root.reals("delta", std::nullopt, positive, "positive");
  } else if (table == "wegner") {
    root.integers("volume", std::nullopt, 1, 1'000'000'000);
    root.reals("interval", std::nullopt, nonnegative, "nonnegative");
  } else {
    root.reals("ell", std::vector<double>{1.0}, positive, "positive");
    root.real("alpha", 1.0 / 3.0, open_unit, "in (0, 1)");
    root.integers("q", std::nullopt, 2, 1'000'000);
    root.reals("s", std::nullopt, positive, "positive");
  }
}

}  // namespace

ConfigResult validate_config_json(std::string_view command, const json& config) {
  ConfigResult result;
  if (!is_command(command)) {
    result.errors.push_back("unknown command \"" + std::string(command) + "\"");
    return result;
  }
  Obj root(config, "", result.errors);
  common(root);
  if (const json* c = root.raw("command"); c && c->is_string() && *c != command)
    root.error("command", "names \"" + c->get<std::string>() + "\" but the run is \"" +
                              std::string(command) + "\"");
  root.out["command"] = std::string(command);

  if (command == "fiber") fiber_schema(root);
  else if (command == "tail") tail_schema(root);
  else if (command == "rcm") rcm_schema(root);
  else if (command == "partition") partition_schema(root);
  else if (command == "wegner") wegner_schema(root);
  else if (command == "gauss-check") gauss_schema(root);
  else bounds_schema(root);

  root.finish();
  result.normalized = std::move(root.out);
  return result;
}

ConfigResult validate_config(std::string_view command, const std::filesystem::path& path) {
  ConfigResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    result.errors.push_back("cannot read config file " + path.string());
    return result;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  json parsed;
  try {
    parsed = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    result.errors.push_back("config is not valid JSON: " + std::string(e.what()));
    return result;
  }
  return validate_config_json(command, parsed);
}

json effective_config(const json& normalized, std::uint64_t seed) {
  json e = normalized;
  e.erase("workers");
  e["seed"] = seed;
  return e;
}

}  // namespace condmean::cli
