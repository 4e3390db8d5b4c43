#include "condmean/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "condmean/condmean.h"
#include "condmean/config.hpp"

namespace condmean::cli {

using nlohmann::json;

namespace {

constexpr double kSigmas = 4.0;

void check(cm_status status) {
  if (status != CM_OK)
    throw RuntimeFailure(std::string(cm_status_name(status)) + ": " + cm_last_error());
}

struct LawDeleter {
  void operator()(cm_law* p) const { cm_law_free(p); }
};
struct GraphDeleter {
  void operator()(cm_graph* p) const { cm_graph_free(p); }
};
struct EvcDeleter {
  void operator()(cm_evc_report* p) const { cm_evc_report_free(p); }
};
struct GaussDeleter {
  void operator()(cm_gauss_report* p) const { cm_gauss_report_free(p); }
};
using LawPtr = std::unique_ptr<cm_law, LawDeleter>;
using GraphPtr = std::unique_ptr<cm_graph, GraphDeleter>;

LawPtr make_law(const json& j) {
  const std::string kind = j.at("kind");
  cm_law* law = nullptr;
  if (kind == "uniform")
    check(cm_law_uniform(j.at("ell"), j.at("offset"), &law));
  else if (kind == "gaussian")
    check(cm_law_gaussian(j.at("mean"), j.at("variance"), &law));
  else
    check(cm_law_registry(kind.c_str(), j.at("beta"), j.at("ell"), &law));
  return LawPtr(law);
}

cm_law_info law_info(const cm_law* law) {
  cm_law_info info{};
  check(cm_law_get_info(law, &info));
  return info;
}

GraphPtr make_graph(const json& j) {
  cm_graph* g = nullptr;
  if (j.at("kind") == "path")
    check(cm_graph_path(j.at("n").get<std::size_t>(), &g));
  else
    check(cm_graph_box(j.at("dimension").get<int>(), j.at("side").get<std::size_t>(), &g));
  return GraphPtr(g);
}

cm_mode mode_of(const std::string& m) {
  if (m == "uniform-exact") return CM_MODE_UNIFORM_EXACT;
  if (m == "smooth-numeric") return CM_MODE_SMOOTH_NUMERIC;
  return CM_MODE_GAUSSIAN_CLOSED_FORM;
}

template <class T>
std::vector<T> list(const json& j) {
  return j.get<std::vector<T>>();
}

Cell opt(bool present, double v) { return present ? Cell{v} : Cell{Empty{}}; }
Cell u64(std::uint64_t v) { return Cell{v}; }
Cell i64(std::int64_t v) { return Cell{v}; }

std::string law_label(const json& law) {
  const std::string kind = law.at("kind");
  std::string out = kind;
  auto fmt = [](const json& v) { return format_double(v.get<double>()); };
  if (kind == "uniform") out += "(ell=" + fmt(law["ell"]) + ",offset=" + fmt(law["offset"]) + ")";
  else if (kind == "gaussian")
    out += "(mean=" + fmt(law["mean"]) + ",variance=" + fmt(law["variance"]) + ")";
  else out += "(beta=" + fmt(law["beta"]) + ",ell=" + fmt(law["ell"]) + ")";
  return out;
}

bool within_oracle(double p_hat, double oracle, std::uint64_t trials) {
  const double se = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(trials));
  return std::abs(p_hat - oracle) <= kSigmas * se + 1e-12;
}

/// Tolerance for deciding that an exact value does not exceed a bound.
bool confirmed(double exact, double bound) {
  return exact <= bound * (1.0 + 1e-12) + 1e-15;
}

// ---- fiber -------------------------------------------------------------

RunOutput run_fiber(const json& cfg, std::uint64_t seed, unsigned workers) {
  const auto ns64 = list<std::int64_t>(cfg.at("n"));
  const std::vector<std::size_t> ns(ns64.begin(), ns64.end());
  const auto ells = list<double>(cfg.at("ell"));
  std::vector<cm_fiber_identity_row> rows(ns.size() * ells.size());
  check(cm_fiber_identity_check(ns.data(), ns.size(), ells.data(), ells.size(),
                                cfg.at("samples").get<std::uint64_t>(),
                                cfg.at("step_rel").get<double>(), cm_seed{seed, 0}, workers,
                                rows.data()));
  RunOutput out;
  out.table = Table({"n", "ell", "samples", "step", "tolerance", "max_abs_diff",
                     "max_translation_diff", "min_lower_bound_slack", "pass"});
  std::size_t failures = 0;
  for (const auto& r : rows) {
    out.table.add({u64(r.n), r.ell, u64(r.samples), r.step, r.tolerance, r.max_abs_diff,
                   r.max_translation_diff, r.min_lower_bound_slack, r.pass != 0});
    failures += r.pass ? 0 : 1;
  }
  for (std::size_t e = 0; e < ells.size(); ++e) {
    Series s{"fiber_ell" + format_double(ells[e]), "n", "max_abs_diff", {}};
    for (std::size_t k = 0; k < ns.size(); ++k)
      s.points.emplace_back(static_cast<double>(ns[k]), rows[k * ells.size() + e].max_abs_diff);
    out.series.push_back(std::move(s));
  }
  out.summary = {{"rows", rows.size()}, {"failures", failures}};
  out.assertion_failed = failures > 0;
  return out;
}

// ---- tail --------------------------------------------------------------

RunOutput run_tail(const json& cfg, std::uint64_t seed, unsigned workers) {
  const LawPtr law = make_law(cfg.at("law"));
  const cm_law_info info = law_info(law.get());
  const bool uniform = info.kind == CM_LAW_UNIFORM;
  const bool smooth = info.kind == CM_LAW_SMOOTH;
  const auto ns = list<std::int64_t>(cfg.at("n"));
  const bool delta_form = cfg.contains("delta");

  // (delta or alpha, s) pairs
  std::vector<std::pair<double, double>> points;
  if (delta_form) {
    const auto deltas = list<double>(cfg.at("delta"));
    if (cfg.at("s").is_string()) {
      for (double d : deltas) points.emplace_back(d, d);
    } else {
      for (double d : deltas)
        for (double s : list<double>(cfg.at("s"))) points.emplace_back(d, s);
    }
  } else {
    for (double a : list<double>(cfg.at("alpha")))
      for (double s : list<double>(cfg.at("s"))) points.emplace_back(a, s);
  }

  RunOutput out;
  out.table = Table({"point", "law", "mode", "n", "ell", "s", "delta", "alpha", "threshold",
                     "trials", "hits", "p_hat", "stderr", "ci95_lo", "ci95_hi", "oracle",
                     "oracle_agree", "bound_thm42", "thm42_holds", "bound_thm52",
                     "bound_thm52_pairwise", "thm52_confirmed", "thm52_holds",
                     "thm61_delta_max", "thm61_applicable", "bound_thm61", "thm61_holds",
                     "pass"});
  const std::string label = law_label(cfg.at("law"));
  const std::string mode = cfg.at("mode");
  std::uint64_t index = 0;
  std::size_t failures = 0, discrepancies = 0;
  for (std::int64_t n : ns) {
    Series series{"tail_n" + std::to_string(n), delta_form ? "delta" : "s", "p_hat", {}};
    for (const auto& [param, s] : points) {
      cm_experiment e;
      cm_experiment_init(&e);
      e.law = law.get();
      e.n = static_cast<std::size_t>(n);
      e.trials = cfg.at("trials").get<std::uint64_t>();
      e.s = s;
      e.has_delta = delta_form;
      e.delta = delta_form ? param : 0.0;
      e.has_alpha = !delta_form;
      e.alpha = delta_form ? 0.0 : param;
      e.seed = cm_seed{seed, index};
      e.mode = mode_of(mode);
      e.grid = cfg.at("grid").get<std::size_t>();
      e.clamp = cfg.at("clamp").get<bool>();
      e.workers = workers;
      cm_tail_estimate t{};
      check(cm_estimate_modulus_tail(&e, &t));

      const double threshold = delta_form ? s / param : std::pow(s, 1.0 - param);
      const double delta = delta_form ? param : std::pow(s, param);
      const double slack = t.p_hat - kSigmas * t.std_error;
      bool pass = true;

      Cell b42 = Empty{}, h42 = Empty{}, b52 = Empty{}, b52p = Empty{}, c52 = Empty{},
           h52 = Empty{};
      if (uniform) {
        cm_bound b{};
        const cm_status st = delta_form
                                 ? cm_bound_thm42(e.n, info.ell, delta, &b)
                                 : cm_bound_thm42_alpha(e.n, info.ell, s, param, &b);
        if (st == CM_OK) {
          b42 = b.value;
          const bool holds = slack <= b.value;
          h42 = holds;
          pass = pass && holds;
        }
        cm_pair_bound pb{};
        const cm_status st52 = delta_form
                                   ? cm_bound_thm52(e.n, info.ell, delta, s, &pb)
                                   : cm_bound_thm52_alpha(e.n, info.ell, s, param, &pb);
        if (st52 == CM_OK) {
          b52 = pb.published.value;
          b52p = pb.pairwise.value;
          const bool conf = t.has_oracle && confirmed(t.oracle, pb.published.value);
          c52 = conf;
          const bool holds = slack <= pb.published.value;
          h52 = holds;
          if (conf) pass = pass && holds;
          else discrepancies += 1;
        }
      }
      Cell dmax = Empty{}, app = Empty{}, b61 = Empty{}, h61 = Empty{};
      if (smooth && delta_form) {
        cm_conditional_bound cb{};
        check(cm_bound_thm61(e.n, info.ell, info.rho_max, delta, &info.constants, &cb));
        dmax = cb.delta_max;
        app = cb.applicable != 0;
        if (cb.applicable) {
          b61 = cb.bound.value;
          const bool holds = slack <= cb.bound.value;
          h61 = holds;
          pass = pass && holds;
        }
      }
      Cell agree = Empty{};
      if (t.has_oracle) agree = within_oracle(t.p_hat, t.oracle, t.trials);

      failures += pass ? 0 : 1;
      out.table.add({u64(index), label, mode, i64(n), opt(info.kind != CM_LAW_GAUSSIAN, info.ell),
                     s, opt(delta_form, param), opt(!delta_form, param), threshold,
                     u64(t.trials), u64(t.hits), t.p_hat, t.std_error, t.ci95_lo, t.ci95_hi,
                     opt(t.has_oracle != 0, t.oracle), agree, b42, h42, b52, b52p, c52, h52,
                     dmax, app, b61, h61, pass});
      series.points.emplace_back(delta_form ? param : s, t.p_hat);
      ++index;
    }
    out.series.push_back(std::move(series));
  }
  out.summary = {{"points", index},
                 {"failures", failures},
                 {"unconfirmed_thm52_points", discrepancies}};
  out.assertion_failed = failures > 0;
  return out;
}

// ---- rcm ---------------------------------------------------------------

RunOutput run_rcm(const json& cfg, std::uint64_t seed, unsigned workers) {
  const LawPtr law = make_law(cfg.at("law"));
  const GraphPtr graph = make_graph(cfg.at("graph"));
  const std::size_t center = cfg.contains("center") ? cfg.at("center").get<std::size_t>()
                                                    : cm_graph_central_vertex(graph.get());
  double c_d = 0.0;
  int d = 0;
  if (cfg.contains("growth")) {
    c_d = cfg.at("growth").at("c_d");
    d = cfg.at("growth").at("d");
  } else {
    check(cm_graph_default_growth(graph.get(), &c_d, &d));
  }
  const auto radius = cfg.at("radius").get<std::size_t>();
  const double alpha = cfg.at("alpha");
  RunOutput out;
  out.table = Table({"point", "graph", "center", "radius", "q_size", "s", "alpha",
                     "threshold", "trials", "hits", "p_hat", "stderr", "ci95_lo", "ci95_hi",
                     "oracle", "rcm_rhs", "rcm_holds", "growth_c_d", "growth_d",
                     "growth_bound", "growth_holds", "pass"});
  Series series{"rcm", "s", "p_hat", {}};
  std::uint64_t index = 0;
  std::size_t failures = 0;
  for (double s : list<double>(cfg.at("s"))) {
    cm_rcm_report r{};
    check(cm_rcm_experiment(law.get(), graph.get(), center, radius, s, alpha,
                            cfg.at("trials").get<std::uint64_t>(), cm_seed{seed, index}, c_d,
                            d, workers, &r));
    const bool pass = r.holds && r.growth_holds;
    failures += pass ? 0 : 1;
    out.table.add({u64(index), std::string(cm_graph_describe(graph.get())), u64(center),
                   u64(radius), u64(r.q_size), s, alpha, r.check.threshold,
                   u64(r.tail.trials), u64(r.tail.hits), r.tail.p_hat, r.tail.std_error,
                   r.tail.ci95_lo, r.tail.ci95_hi, opt(r.tail.has_oracle != 0, r.tail.oracle),
                   r.check.rhs, r.holds != 0, c_d, i64(d), r.growth_bound,
                   r.growth_holds != 0, pass});
    series.points.emplace_back(s, r.tail.p_hat);
    ++index;
  }
  out.series.push_back(std::move(series));
  out.summary = {{"points", index}, {"failures", failures}};
  out.assertion_failed = failures > 0;
  return out;
}

// ---- partition ---------------------------------------------------------

/// P(X_1 + X_2 <= z) for IID Uniform[o, o + ell].
double two_uniform_sum_cdf(double z, double ell, double o) {
  const double u = (z - 2.0 * o) / ell;
  if (u <= 0.0) return 0.0;
  if (u <= 1.0) return 0.5 * u * u;
  if (u < 2.0) return 1.0 - 0.5 * (2.0 - u) * (2.0 - u);
  return 1.0;
}

std::string join_cuts(const std::vector<double>& cuts) {
  std::string out;
  for (double c : cuts) out += (out.empty() ? "" : ";") + format_double(c);
  return out;
}

RunOutput run_partition(const json& cfg, std::uint64_t seed, unsigned workers) {
  const LawPtr law = make_law(cfg.at("law"));
  const cm_law_info info = law_info(law.get());
  const double lo = info.kind == CM_LAW_UNIFORM ? info.offset : 0.0;
  const double hi = lo + info.ell;

  std::vector<std::vector<double>> partitions;
  for (const json& c : cfg.at("cuts")) partitions.push_back(c.get<std::vector<double>>());
  const json& random = cfg.at("random");
  const auto count = random.at("count").get<std::size_t>();
  const auto min_k = random.at("min_intervals").get<std::size_t>();
  const auto max_k = random.at("max_intervals").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = min_k + i % (max_k - min_k + 1);
    std::vector<double> cuts(k + 1);
    check(cm_partition_random(cm_seed{seed, 0x7061727469ull}, i, k, lo, hi, cuts.data()));
    partitions.push_back(std::move(cuts));
  }

  const auto n = cfg.at("n").get<std::size_t>();
  const double s = cfg.at("s");
  const std::string rule = cfg.at("mu").at("rule");
  const double mu_value = cfg.at("mu").at("value");
  const bool has_oracle = n == 2 && info.kind == CM_LAW_UNIFORM && rule == "constant";
  double oracle = 0.0;
  if (has_oracle) {
    oracle = two_uniform_sum_cdf(2.0 * (mu_value + s), info.ell, info.offset) -
             two_uniform_sum_cdf(2.0 * mu_value, info.ell, info.offset);
  }

  RunOutput out;
  out.table = Table({"partition", "intervals", "cuts", "n", "s", "mu_rule", "mu_value",
                     "trials", "direct_p_hat", "direct_stderr", "direct_ci95_lo",
                     "direct_ci95_hi", "decomposed", "decomposed_stderr", "sup_box", "boxes",
                     "oracle", "oracle_agree", "agree", "sup_holds", "pass"});
  Series series{"partition", "partition", "direct_minus_decomposed", {}};
  std::size_t failures = 0;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    cm_experiment e;
    cm_experiment_init(&e);
    e.law = law.get();
    e.n = n;
    e.trials = cfg.at("trials").get<std::uint64_t>();
    e.s = s;
    e.seed = cm_seed{seed, i};
    e.workers = workers;
    cm_partition_report r{};
    check(cm_estimate_local_partition(&e, partitions[i].data(), partitions[i].size(),
                                      rule == "constant" ? CM_MU_CONSTANT : CM_MU_MEDIAN_ETA,
                                      mu_value, &r));
    Cell agree_oracle = Empty{};
    bool pass = r.agree && r.sup_holds;
    if (has_oracle) {
      const bool a = within_oracle(r.direct.p_hat, oracle, r.direct.trials);
      agree_oracle = a;
      pass = pass && a;
    }
    failures += pass ? 0 : 1;
    out.table.add({u64(i), u64(partitions[i].size() - 1), join_cuts(partitions[i]), u64(n), s,
                   rule, mu_value, u64(r.direct.trials), r.direct.p_hat, r.direct.std_error,
                   r.direct.ci95_lo, r.direct.ci95_hi, r.decomposed, r.decomposed_std_error,
                   r.sup_box, u64(r.boxes), opt(has_oracle, oracle), agree_oracle,
                   r.agree != 0, r.sup_holds != 0, pass});
    series.points.emplace_back(static_cast<double>(i), r.direct.p_hat - r.decomposed);
  }
  out.series.push_back(std::move(series));
  out.summary = {{"partitions", partitions.size()}, {"failures", failures}};
  if (has_oracle) out.summary["oracle"] = oracle;
  out.assertion_failed = failures > 0;
  return out;
}

// ---- wegner ------------------------------------------------------------

RunOutput run_wegner(const json& cfg, std::uint64_t seed, unsigned workers) {
  const LawPtr law = make_law(cfg.at("law"));
  const GraphPtr graph = make_graph(cfg.at("graph"));
  std::vector<double> ts;
  const json& t = cfg.at("t");
  if (t.is_object()) {
    const double from = t.at("from"), to = t.at("to");
    const auto points = t.at("points").get<std::size_t>();
    for (std::size_t k = 0; k < points; ++k)
      ts.push_back(points == 1 ? from
                               : from + (to - from) * static_cast<double>(k) /
                                            static_cast<double>(points - 1));
  } else {
    ts = t.get<std::vector<double>>();
  }
  const double s = cfg.at("s");
  const std::string kinetic = cfg.at("kinetic");
  const double tolerance = cfg.at("identity_tolerance");
  cm_evc_report* raw = nullptr;
  check(cm_evc_experiment(graph.get(), law.get(), ts.data(), ts.size(), s,
                          cfg.at("trials").get<std::uint64_t>(), cm_seed{seed, 0},
                          kinetic == "adjacency" ? CM_KINETIC_ADJACENCY : CM_KINETIC_LAPLACIAN,
                          workers, &raw));
  const std::unique_ptr<cm_evc_report, EvcDeleter> report(raw);
  cm_evc_summary sum{};
  check(cm_evc_report_summary(report.get(), &sum));
  const bool identity_ok = sum.max_identity_error <= tolerance;

  RunOutput out;
  out.table = Table({"t", "s", "graph", "volume", "kinetic", "trials", "hits", "p_hat",
                     "stderr", "ci95_lo", "ci95_hi", "wegner_bound", "evc_diagnostic",
                     "wegner_holds", "identity_error", "identity_ok", "pass"});
  Series series{"wegner", "t", "p_hat", {}};
  std::size_t failures = 0;
  double max_p = 0.0;
  for (std::size_t k = 0; k < sum.points; ++k) {
    cm_evc_point p{};
    check(cm_evc_report_point(report.get(), k, &p));
    const bool pass = p.holds && identity_ok;
    failures += pass ? 0 : 1;
    max_p = std::max(max_p, p.tail.p_hat);
    out.table.add({p.t, s, std::string(cm_graph_describe(graph.get())), u64(sum.volume),
                   kinetic, u64(p.tail.trials), u64(p.tail.hits), p.tail.p_hat,
                   p.tail.std_error, p.tail.ci95_lo, p.tail.ci95_hi,
                   opt(p.has_wegner_bound != 0, p.wegner_bound),
                   opt(p.has_evc_diagnostic != 0, p.evc_diagnostic),
                   p.has_wegner_bound ? Cell{p.holds != 0} : Cell{Empty{}},
                   sum.max_identity_error, identity_ok, pass});
    series.points.emplace_back(p.t, p.tail.p_hat);
  }
  out.series.push_back(std::move(series));
  out.summary = {{"points", sum.points},
                 {"failures", failures},
                 {"max_p_hat", max_p},
                 {"max_identity_error", sum.max_identity_error}};
  out.assertion_failed = failures > 0;
  return out;
}

// ---- gauss-check -------------------------------------------------------

RunOutput run_gauss(const json& cfg, std::uint64_t seed, unsigned workers) {
  cm_gauss_report* raw = nullptr;
  check(cm_gaussian_independence_check(
      cfg.at("n").get<std::size_t>(), cfg.at("samples").get<std::uint64_t>(),
      cfg.at("bins").get<std::size_t>(), cfg.at("bin_width").get<double>(), cm_seed{seed, 0},
      workers, cfg.at("ks_tolerance").get<double>(), cfg.at("peak_slack").get<double>(),
      &raw));
  const std::unique_ptr<cm_gauss_report, GaussDeleter> report(raw);
  cm_gauss_summary sum{};
  check(cm_gauss_report_summary(report.get(), &sum));
  RunOutput out;
  out.table = Table({"bin", "n", "samples", "ks", "ks_tolerance", "ks_ok", "peak_density",
                     "density_bound", "peak_slack", "peak_ok", "pass"});
  for (std::size_t b = 0; b < sum.bins; ++b) {
    double ks = 0.0;
    check(cm_gauss_report_bin_ks(report.get(), b, &ks));
    const bool ks_ok = ks <= sum.ks_tolerance;
    out.table.add({u64(b), u64(sum.n), u64(sum.samples), ks, sum.ks_tolerance, ks_ok,
                   sum.peak_density, sum.density_bound, sum.peak_slack, sum.peak_ok != 0,
                   ks_ok && sum.peak_ok});
  }
  Series hist{"xi_density", "xi", "density", {}};
  for (std::size_t k = 0; k < sum.histogram_bins; ++k) {
    double c = 0.0, d = 0.0;
    check(cm_gauss_report_histogram(report.get(), k, &c, &d));
    hist.points.emplace_back(c, d);
  }
  out.series.push_back(std::move(hist));
  out.summary = {{"max_ks", sum.max_ks},
                 {"ks_ok", sum.ks_ok != 0},
                 {"peak_density", sum.peak_density},
                 {"density_bound", sum.density_bound},
                 {"peak_ok", sum.peak_ok != 0}};
  out.assertion_failed = !(sum.ks_ok && sum.peak_ok);
  return out;
}

// ---- bounds-table ------------------------------------------------------

Cell bound_cell(cm_status st, double v) { return st == CM_OK ? Cell{v} : Cell{Empty{}}; }

RunOutput run_bounds(const json& cfg) {
  const std::string table = cfg.at("table");
  RunOutput out;
  if (table == "uniform") {
    out.table = Table({"n", "ell", "delta", "s", "bound_lemma41", "bound_thm42", "r",
                       "bound_lemma51", "bound_lemma51_pairwise", "bound_thm52",
                       "bound_thm52_pairwise", "exact_tail", "thm52_confirmed"});
    std::vector<std::pair<double, double>> ds;
    for (double d : list<double>(cfg.at("delta"))) {
      if (cfg.at("s").is_string()) ds.emplace_back(d, d);
      else for (double s : list<double>(cfg.at("s"))) ds.emplace_back(d, s);
    }
    for (std::int64_t n64 : list<std::int64_t>(cfg.at("n"))) {
      const auto n = static_cast<std::size_t>(n64);
      for (double ell : list<double>(cfg.at("ell"))) {
        Series series{"thm52_n" + std::to_string(n) + "_ell" + format_double(ell), "delta",
                      "bound_thm52", {}};
        for (const auto& [delta, s] : ds) {
          cm_bound b41{}, b42{};
          const cm_status s41 = cm_bound_lemma41(n, ell, delta, &b41);
          const cm_status s42 = cm_bound_thm42(n, ell, delta, &b42);
          const double r = std::sqrt(static_cast<double>(n)) * delta;
          cm_pair_bound b51{}, b52{};
          const cm_status s51 = cm_bound_lemma51_uniform(n, ell, r, &b51);
          const cm_status s52 = cm_bound_thm52(n, ell, delta, s, &b52);
          double exact = 0.0;
          const cm_status se = cm_fiber_length_tail_exact_uniform(n, ell, r, &exact);
          Cell conf = Empty{};
          if (s52 == CM_OK && se == CM_OK) conf = confirmed(exact, b52.published.value);
          out.table.add({u64(n), ell, delta, s, bound_cell(s41, b41.value),
                         bound_cell(s42, b42.value), r, bound_cell(s51, b51.published.value),
                         bound_cell(s51, b51.pairwise.value),
                         bound_cell(s52, b52.published.value),
                         bound_cell(s52, b52.pairwise.value), bound_cell(se, exact), conf});
          if (s52 == CM_OK) series.points.emplace_back(delta, b52.published.value);
        }
        out.series.push_back(std::move(series));
      }
    }
  } else if (table == "smooth") {
    const LawPtr law = make_law(cfg.at("law"));
    const cm_law_info info = law_info(law.get());
    out.table = Table({"law", "n", "delta", "ell", "rho_min", "rho_max", "c_rho_prime", "c1",
                       "ell_star", "c_star", "delta_max", "applicable", "bound_thm61"});
    const std::string label = law_label(cfg.at("law"));
    for (std::int64_t n64 : list<std::int64_t>(cfg.at("n"))) {
      for (double delta : list<double>(cfg.at("delta"))) {
        cm_conditional_bound cb{};
        const cm_status st = cm_bound_thm61(static_cast<std::size_t>(n64), info.ell,
                                            info.rho_max, delta, &info.constants, &cb);
        out.table.add({label, i64(n64), delta, info.ell, info.rho_min, info.rho_max,
                       info.c_rho_prime, info.constants.c1, info.constants.ell_star,
                       info.constants.c_star, bound_cell(st, cb.delta_max),
                       st == CM_OK ? Cell{cb.applicable != 0} : Cell{Empty{}},
                       bound_cell(st == CM_OK && cb.applicable ? CM_OK : CM_ERR_DOMAIN,
                                  cb.bound.value)});
      }
    }
  } else if (table == "wegner") {
    out.table = Table({"volume", "interval", "bound_wegner"});
    for (std::int64_t v : list<std::int64_t>(cfg.at("volume"))) {
      Series series{"wegner_volume" + std::to_string(v), "interval", "bound_wegner", {}};
      for (double len : list<double>(cfg.at("interval"))) {
        cm_bound b{};
        const cm_status st = cm_bound_wegner_gaussian(static_cast<std::size_t>(v), len, &b);
        out.table.add({i64(v), len, bound_cell(st, b.value)});
        if (st == CM_OK) series.points.emplace_back(len, b.value);
      }
      out.series.push_back(std::move(series));
    }
  } else {
    out.table = Table({"ell", "alpha", "q", "s", "c_prime", "a_prime", "b_prime", "c_double",
                       "a_double", "b_double", "threshold", "rhs"});
    const double alpha = cfg.at("alpha");
    for (double ell : list<double>(cfg.at("ell"))) {
      cm_rcm_params p{};
      check(cm_rcm_params_uniform(ell, alpha, &p));
      for (std::int64_t q : list<std::int64_t>(cfg.at("q"))) {
        for (double s : list<double>(cfg.at("s"))) {
          cm_rcm_check c{};
          check(cm_rcm_check_tail(&p, static_cast<std::size_t>(q), s, 0.0, &c));
          out.table.add({ell, alpha, i64(q), s, p.c_prime, p.a_prime, p.b_prime, p.c_double,
                         p.a_double, p.b_double, c.threshold, c.rhs});
        }
      }
    }
  }
  out.summary = {{"rows", out.table.rows().size()}};
  return out;
}

unsigned hardware_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

std::optional<unsigned> parse_workers(const char* text) {
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(text, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) return 0u;
  return static_cast<unsigned>(v);
}

}  // namespace

RunOutput execute(const std::string& command, const json& config, std::uint64_t seed,
                  unsigned workers) {
  if (command == "fiber") return run_fiber(config, seed, workers);
  if (command == "tail") return run_tail(config, seed, workers);
  if (command == "rcm") return run_rcm(config, seed, workers);
  if (command == "partition") return run_partition(config, seed, workers);
  if (command == "wegner") return run_wegner(config, seed, workers);
  if (command == "gauss-check") return run_gauss(config, seed, workers);
  if (command == "bounds-table") return run_bounds(config);
  throw RuntimeFailure("unknown command " + command);
}

int run(const Manifest& manifest, std::ostream& log, std::ostream& err) {
  const ConfigResult cfg = validate_config(manifest.command, manifest.config_path);
  if (!cfg.ok()) {
    err << "config error (" << cfg.errors.size() << "):\n";
    for (const auto& e : cfg.errors) err << "  " << e << "\n";
    return kExitConfig;
  }

  const std::uint64_t seed =
      manifest.seed.value_or(cfg.normalized.at("seed").get<std::uint64_t>());
  unsigned workers = 0;
  if (manifest.workers) {
    workers = *manifest.workers;
  } else if (auto env = parse_workers(std::getenv("CONDMEAN_WORKERS"))) {
    if (*env == 0) {
      err << "config error: CONDMEAN_WORKERS must be an integer in [1, 1024]\n";
      return kExitConfig;
    }
    workers = *env;
  } else if (cfg.normalized.contains("workers")) {
    workers = cfg.normalized.at("workers").get<unsigned>();
  } else {
    workers = hardware_workers();
  }
  if (workers < 1 || workers > 1024) {
    err << "config error: workers must be in [1, 1024]\n";
    return kExitConfig;
  }

  const json effective = effective_config(cfg.normalized, seed);
  OutputHeader header;
  header.command = manifest.command;
  header.seed = seed;
  header.version = cm_version();
  header.config_hash = hex64(fnv1a64(effective.dump()));

  const auto start = std::chrono::steady_clock::now();
  RunOutput result;
  try {
    result = execute(manifest.command, cfg.normalized, seed, workers);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    std::filesystem::create_directories(manifest.out_dir);
    write_file(manifest.out_dir / "results.csv", render_csv(header, result.table));
    write_file(manifest.out_dir / "results.json",
               render_json(header, effective, result.table, result.summary));
    const bool svg = cfg.normalized.value("svg", false);
    for (const Series& s : result.series) {
      write_file(manifest.out_dir / ("plot_" + s.name + ".csv"), render_plot_csv(header, s));
      if (svg) write_file(manifest.out_dir / ("plot_" + s.name + ".svg"), render_svg(header, s));
    }
    json timing = {{"command", manifest.command},
                   {"seed", seed},
                   {"config_hash", header.config_hash},
                   {"version", header.version},
                   {"workers", workers},
                   {"wall_seconds", seconds}};
    write_file(manifest.out_dir / "timing.json", timing.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }

  log << manifest.command << ": " << result.table.rows().size() << " records, "
      << (result.assertion_failed ? "assertion failures" : "all checks passed") << " ("
      << format_double(std::round(seconds * 100.0) / 100.0) << " s) -> "
      << manifest.out_dir.string() << "\n";
  return result.assertion_failed ? kExitAssertion : kExitOk;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Conditional-mean regularity experiments", "condmean"};
  app.set_version_flag("--version", std::string(cm_version()));
  Manifest m;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  app.add_option("command", m.command, "fiber | tail | rcm | partition | wegner | "
                                       "gauss-check | bounds-table")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands),
                                                     std::end(kCommands))));
  app.add_option("--config", m.config_path, "JSON experiment config")->required();
  app.add_option("--out", m.out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* workers_opt =
      app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) m.seed = seed;
  if (*workers_opt) m.workers = workers;
  return run(m, std::cout, std::cerr);
}

}  // namespace condmean::cli
