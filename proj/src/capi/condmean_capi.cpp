#include "condmean/condmean.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/bounds.hpp"
#include "core/distributions.hpp"
#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/graph.hpp"
#include "core/modulus.hpp"
#include "core/montecarlo.hpp"
#include "core/spectral.hpp"

using namespace condmean;

struct cm_law {
  DensitySpec spec;
};

struct cm_sampler {
  std::shared_ptr<const DensitySpec> spec;
  Sampler sampler;
};

struct cm_graph {
  Graph graph;
  std::string description;
};

struct cm_operator {
  OperatorInstance op;
};

struct cm_evc_report {
  EvcReport report;
};

struct cm_gauss_report {
  GaussCheckReport report;
};

namespace {

thread_local std::string last_error;

cm_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return CM_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_sample: return CM_ERR_INVALID_SAMPLE;
    case ErrorCode::out_of_support: return CM_ERR_OUT_OF_SUPPORT;
    case ErrorCode::density_spec: return CM_ERR_DENSITY_SPEC;
    case ErrorCode::domain: return CM_ERR_DOMAIN;
  }
  return CM_ERR_INTERNAL;
}

template <class F>
cm_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return CM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

// NULL pointers get their own status code.
#define CM_CHECK_NULL(p)                                   \
  do {                                                     \
    if ((p) == nullptr) {                                  \
      last_error = #p " is NULL";                          \
      return CM_ERR_NULL_POINTER;                          \
    }                                                      \
  } while (0)

std::span<const double> span_of(const double* x, std::size_t n) {
  return {x, n};
}

std::span<const double> optional_span(const double* x, std::size_t n) {
  return x == nullptr ? std::span<const double>{} : std::span<const double>{x, n};
}

SeedSpec seed_of(cm_seed seed) { return {seed.master_seed, seed.stream_index}; }

cm_bound to_c(const ProbabilityBound& b) { return {b.value, b.raw}; }
cm_pair_bound to_c(const PairBound& b) { return {to_c(b.pairwise), to_c(b.published)}; }

cm_tail_estimate to_c(const TailEstimate& e) {
  cm_tail_estimate out{};
  out.p_hat = e.p_hat;
  out.std_error = e.std_error;
  out.ci95_lo = e.ci95_lo;
  out.ci95_hi = e.ci95_hi;
  out.trials = e.trials;
  out.hits = e.hits;
  out.has_oracle = e.oracle.has_value() ? 1 : 0;
  out.oracle = e.oracle.value_or(0.0);
  return out;
}

cm_fiber_modulus to_c(const FiberModulus& m) { return {m.nu, m.raw, m.point_mass() ? 1 : 0}; }

cm_rcm_check to_c(const RcmCheck& c) { return {c.holds ? 1 : 0, c.threshold, c.rhs}; }

Mode mode_of(cm_mode mode) {
  switch (mode) {
    case CM_MODE_UNIFORM_EXACT: return Mode::uniform_exact;
    case CM_MODE_SMOOTH_NUMERIC: return Mode::smooth_numeric;
    case CM_MODE_GAUSSIAN_CLOSED_FORM: return Mode::gaussian_closed_form;
  }
  fail(ErrorCode::invalid_argument, "unknown mode");
}

Kinetic kinetic_of(cm_kinetic k) {
  switch (k) {
    case CM_KINETIC_ADJACENCY: return Kinetic::adjacency;
    case CM_KINETIC_LAPLACIAN: return Kinetic::laplacian;
  }
  fail(ErrorCode::invalid_argument, "unknown kinetic term");
}

ExperimentConfig config_of(const cm_experiment& c) {
  need(c.law, "experiment law");
  ExperimentConfig cfg;
  cfg.law = c.law->spec;
  cfg.n = c.n;
  cfg.trials = c.trials;
  cfg.s = c.s;
  if (c.has_delta) cfg.delta = c.delta;
  if (c.has_alpha) cfg.alpha = c.alpha;
  cfg.seed = seed_of(c.seed);
  cfg.mode = mode_of(c.mode);
  cfg.grid = c.grid;
  cfg.clamp = c.clamp != 0;
  return cfg;
}

unsigned workers_of(unsigned w) { return w == 0 ? 1u : w; }

const SmoothLaw& smooth_of(const cm_law* law) {
  const SmoothLaw* s = law->spec.as_smooth();
  require(s != nullptr, ErrorCode::invalid_argument, "law is not a smooth density");
  return *s;
}

void copy_matrix(const Matrix& m, double* out) {
  const auto d = m.data();
  std::memcpy(out, d.data(), d.size() * sizeof(double));
}

}  // namespace

extern "C" {

const char* cm_version(void) { return "1.0.0"; }

const char* cm_status_name(cm_status status) {
  switch (status) {
    case CM_OK: return "ok";
    case CM_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CM_ERR_INVALID_SAMPLE: return "invalid-sample";
    case CM_ERR_OUT_OF_SUPPORT: return "out-of-support";
    case CM_ERR_DENSITY_SPEC: return "density-spec";
    case CM_ERR_DOMAIN: return "domain";
    case CM_ERR_NULL_POINTER: return "null-pointer";
    case CM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cm_last_error(void) { return last_error.c_str(); }

/* laws */

cm_status cm_law_uniform(double ell, double offset, cm_law** out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = new cm_law{DensitySpec::uniform(ell, offset)}; });
}

cm_status cm_law_gaussian(double mean, double variance, cm_law** out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = new cm_law{DensitySpec::gaussian(mean, variance)}; });
}

cm_status cm_law_registry(const char* name, double parameter, double ell, cm_law** out) {
  CM_CHECK_NULL(name);
  CM_CHECK_NULL(out);
  return guard([&] { *out = new cm_law{DensitySpec::from_registry(name, parameter, ell)}; });
}

cm_status cm_law_smooth(const char* name, double ell, cm_density_fn rho,
                        cm_density_fn rho_prime, void* user, double rho_min,
                        double rho_max, double c_rho_prime, cm_law** out) {
  CM_CHECK_NULL(rho);
  CM_CHECK_NULL(rho_prime);
  CM_CHECK_NULL(out);
  return guard([&] {
    SmoothLaw law(name ? name : "custom", ell,
                  [rho, user](double t) { return rho(t, user); },
                  [rho_prime, user](double t) { return rho_prime(t, user); },
                  rho_min, rho_max, c_rho_prime);
    *out = new cm_law{DensitySpec::smooth(std::move(law))};
  });
}

void cm_law_free(cm_law* law) { delete law; }

cm_status cm_law_get_info(const cm_law* law, cm_law_info* out) {
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    cm_law_info info{};
    const DensitySpec& spec = law->spec;
    info.rho_max = spec.rho_max();
    if (const auto* u = spec.as_uniform()) {
      info.kind = CM_LAW_UNIFORM;
      info.ell = u->ell;
      info.offset = u->offset;
      info.rho_min = 1.0 / u->ell;
    } else if (const auto* g = spec.as_gaussian()) {
      info.kind = CM_LAW_GAUSSIAN;
      info.mean = g->mean;
      info.variance = g->variance;
    } else {
      const SmoothLaw& s = *spec.as_smooth();
      info.kind = CM_LAW_SMOOTH;
      info.ell = s.ell();
      info.rho_min = s.rho_min();
      info.c_rho_prime = s.c_rho_prime();
      const SmoothConstants c = s.constants();
      info.constants = {c.c1, c.ell_star, c.c_star};
    }
    *out = info;
  });
}

cm_status cm_law_mass(const cm_law* law, double a, double b, double* out) {
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] { *out = law->spec.mass(a, b); });
}

/* geometry */

cm_status cm_decompose(const double* x, size_t n, double* xi, double* xi_tilde,
                       double* eta, double* y) {
  CM_CHECK_NULL(x);
  return guard([&] {
    const Decomposition d = decompose(span_of(x, n));
    if (xi) *xi = d.xi;
    if (xi_tilde) *xi_tilde = d.xi_tilde;
    if (eta) std::memcpy(eta, d.eta.data(), d.eta.size() * sizeof(double));
    if (y) std::memcpy(y, d.y.data(), d.y.size() * sizeof(double));
  });
}

cm_status cm_fiber_length_cube(const double* x, size_t n, double ell,
                               const double* offsets, cm_fiber_geometry* out) {
  CM_CHECK_NULL(x);
  CM_CHECK_NULL(out);
  return guard([&] {
    const FiberGeometry g = fiber_length_cube(span_of(x, n), ell, optional_span(offsets, n));
    *out = {g.length, g.x_min, g.x_max, g.range};
  });
}

cm_status cm_fiber_length_bruteforce(const double* x, size_t n, double ell,
                                     const double* offsets, double step, double* out) {
  CM_CHECK_NULL(x);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = fiber_length_bruteforce(span_of(x, n), ell, optional_span(offsets, n), step);
  });
}

/* sampling */

cm_status cm_sampler_new(const cm_law* law, cm_seed seed, uint64_t substream,
                         cm_sampler** out) {
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    auto spec = std::make_shared<const DensitySpec>(law->spec);
    *out = new cm_sampler{spec, Sampler(*spec, seed_of(seed), substream)};
  });
}

void cm_sampler_free(cm_sampler* sampler) { delete sampler; }

cm_status cm_sampler_fill(cm_sampler* sampler, double* out, size_t n) {
  CM_CHECK_NULL(sampler);
  CM_CHECK_NULL(out);
  return guard([&] {
    std::vector<double> tmp(n);
    sampler->sampler.fill(tmp);
    std::memcpy(out, tmp.data(), n * sizeof(double));
  });
}

cm_status cm_sampler_draw_restricted(cm_sampler* sampler, double a, double b, double* out) {
  CM_CHECK_NULL(sampler);
  CM_CHECK_NULL(out);
  return guard([&] { *out = sampler->sampler.draw_restricted(a, b); });
}

cm_status cm_sample_iid(const cm_law* law, size_t n, cm_seed seed, double* out) {
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    const Sample s = sample_iid(law->spec, n, seed_of(seed));
    std::memcpy(out, s.values().data(), n * sizeof(double));
  });
}

cm_status cm_uniform_range_cdf(size_t n, double ell, double w, double* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = uniform_range_cdf(n, ell, w); });
}

cm_status cm_fiber_length_tail_exact_uniform(size_t n, double ell, double r, double* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = fiber_length_tail_exact_uniform(n, ell, r); });
}

cm_status cm_gaussian_mean_density_bound(size_t n, double* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = gaussian_mean_density_bound(n); });
}

/* moduli */

cm_status cm_modulus_uniform_exact(const cm_fiber_geometry* geom, double s, size_t n,
                                   cm_fiber_modulus* out) {
  CM_CHECK_NULL(geom);
  CM_CHECK_NULL(out);
  return guard([&] {
    const FiberGeometry g{geom->length, geom->x_min, geom->x_max, geom->range};
    *out = to_c(modulus_uniform_exact(g, ModulusQuery{s, true}, n));
  });
}

cm_status cm_modulus_gaussian(size_t n, double s, double variance, double* exact,
                              double* linear_bound) {
  return guard([&] {
    const GaussianModulus m = modulus_gaussian(n, s, variance);
    if (exact) *exact = m.exact;
    if (linear_bound) *linear_bound = m.linear_bound;
  });
}

cm_status cm_modulus_smooth_numeric(const double* x, size_t n, const cm_law* law, double s,
                                    size_t grid, cm_fiber_modulus* out) {
  CM_CHECK_NULL(x);
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = to_c(modulus_smooth_numeric(span_of(x, n), law->spec, ModulusQuery{s, true}, grid));
  });
}

cm_status cm_fiber_density_normalization(const double* x, size_t n, const cm_law* law,
                                         size_t grid, double* out) {
  CM_CHECK_NULL(x);
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    const FiberDensity p(span_of(x, n), smooth_of(law), grid);
    require(p.length() > 0.0, ErrorCode::domain, "zero-length fiber has no density");
    *out = p.normalization();
  });
}

cm_status cm_log_derivative_check_at(const double* x, size_t n, const cm_law* law, double u,
                                     double h, size_t grid, cm_log_derivative_check* out) {
  CM_CHECK_NULL(x);
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    const LogDerivativeCheck c = log_derivative_check(span_of(x, n), law->spec, u, h, grid);
    *out = {c.density,           c.fd_derivative, c.analytic_derivative,
            c.abs_diff,          c.log_derivative_fd, c.log_derivative,
            c.log_abs_diff,      c.c1_bound,      c.within_c1_bound ? 1 : 0};
  });
}

/* bounds */

cm_status cm_bound_lemma41(size_t n, double ell, double delta, cm_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_lemma41(n, ell, delta)); });
}

cm_status cm_bound_thm42(size_t n, double ell, double delta, cm_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_thm42(n, ell, delta)); });
}

cm_status cm_bound_thm42_alpha(size_t n, double ell, double s, double alpha, cm_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_thm42_alpha(n, ell, s, alpha)); });
}

cm_status cm_bound_lemma51(size_t n, double rho_max, double r, cm_pair_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_lemma51(n, rho_max, r)); });
}

cm_status cm_bound_lemma51_uniform(size_t n, double ell, double r, cm_pair_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_lemma51_uniform(n, ell, r)); });
}

cm_status cm_bound_thm52(size_t n, double ell, double delta, double s, cm_pair_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_thm52(n, ell, delta, s)); });
}

cm_status cm_bound_thm52_alpha(size_t n, double ell, double s, double alpha,
                               cm_pair_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_thm52_alpha(n, ell, s, alpha)); });
}

cm_status cm_rcm_params_uniform(double ell, double alpha, cm_rcm_params* out) {
  CM_CHECK_NULL(out);
  return guard([&] {
    const RcmParams p = rcm_params_uniform(ell, alpha);
    *out = {p.c_prime, p.c_double, p.a_prime, p.a_double, p.b_prime, p.b_double};
  });
}

cm_status cm_rcm_check_tail(const cm_rcm_params* params, size_t q_size, double s,
                            double empirical_tail, cm_rcm_check* out) {
  CM_CHECK_NULL(params);
  CM_CHECK_NULL(out);
  return guard([&] {
    const RcmParams p{params->c_prime, params->c_double, params->a_prime,
                      params->a_double, params->b_prime, params->b_double};
    *out = to_c(rcm_check(p, q_size, s, empirical_tail));
  });
}

cm_status cm_bound_thm61(size_t n, double ell, double rho_max, double delta,
                         const cm_smooth_constants* constants, cm_conditional_bound* out) {
  CM_CHECK_NULL(constants);
  CM_CHECK_NULL(out);
  return guard([&] {
    const SmoothConstants c{constants->c1, constants->ell_star, constants->c_star};
    const ConditionalBound b = bound_thm61(n, ell, rho_max, delta, c);
    *out = {b.applicable ? 1 : 0, b.delta_max, to_c(b.bound)};
  });
}

cm_status cm_bound_wegner_gaussian(size_t volume, double interval_len, cm_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(bound_wegner_gaussian(volume, interval_len)); });
}

cm_status cm_evc_bound(size_t volume, double nu, cm_bound* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(evc_bound(volume, nu)); });
}

/* Monte Carlo */

void cm_experiment_init(cm_experiment* cfg) {
  if (cfg == nullptr) return;
  *cfg = cm_experiment{};
  cfg->n = 2;
  cfg->trials = 100000;
  cfg->s = 0.1;
  cfg->mode = CM_MODE_UNIFORM_EXACT;
  cfg->grid = kMinSmoothGrid;
  cfg->workers = 1;
}

cm_status cm_experiment_validate(const cm_experiment* cfg) {
  CM_CHECK_NULL(cfg);
  return guard([&] { config_of(*cfg).validate(); });
}

cm_status cm_estimate_modulus_tail(const cm_experiment* cfg, cm_tail_estimate* out) {
  CM_CHECK_NULL(cfg);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = to_c(estimate_modulus_tail(config_of(*cfg), workers_of(cfg->workers)));
  });
}

cm_status cm_estimate_fiber_tail(const cm_experiment* cfg, double r, cm_tail_estimate* out) {
  CM_CHECK_NULL(cfg);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = to_c(estimate_fiber_tail(config_of(*cfg), r, workers_of(cfg->workers)));
  });
}

cm_status cm_make_tail_estimate(uint64_t hits, uint64_t trials, cm_tail_estimate* out) {
  CM_CHECK_NULL(out);
  return guard([&] { *out = to_c(make_tail_estimate(hits, trials)); });
}

cm_status cm_partition_random(cm_seed seed, uint64_t substream, size_t intervals, double lo,
                              double hi, double* cuts_out) {
  CM_CHECK_NULL(cuts_out);
  return guard([&] {
    Stream stream(seed_of(seed), substream);
    const PartitionSpec p = PartitionSpec::random(stream, intervals, lo, hi);
    const auto cuts = p.cut_points();
    std::memcpy(cuts_out, cuts.data(), cuts.size() * sizeof(double));
  });
}

cm_status cm_estimate_local_partition(const cm_experiment* cfg, const double* cuts,
                                      size_t n_cuts, cm_mu_kind mu_kind, double mu_value,
                                      cm_partition_report* out) {
  CM_CHECK_NULL(cfg);
  CM_CHECK_NULL(cuts);
  CM_CHECK_NULL(out);
  return guard([&] {
    const PartitionSpec partition(std::vector<double>(cuts, cuts + n_cuts));
    MuRule mu;
    switch (mu_kind) {
      case CM_MU_CONSTANT: mu.kind = MuRule::Kind::constant; break;
      case CM_MU_MEDIAN_ETA: mu.kind = MuRule::Kind::median_eta; break;
      default: fail(ErrorCode::invalid_argument, "unknown mu rule");
    }
    mu.value = mu_value;
    const PartitionReport r =
        estimate_local_partition(config_of(*cfg), partition, mu, workers_of(cfg->workers));
    cm_partition_report c{};
    c.direct = to_c(r.direct);
    c.decomposed = r.decomposed;
    c.decomposed_std_error = r.decomposed_std_error;
    c.sup_box = r.sup_box;
    c.boxes = r.boxes.size();
    c.agree = r.agree ? 1 : 0;
    c.sup_holds = r.sup_holds ? 1 : 0;
    *out = c;
  });
}

/* graphs */

cm_status cm_graph_path(size_t n, cm_graph** out) {
  CM_CHECK_NULL(out);
  return guard([&] {
    Graph g = Graph::path(n);
    std::string d = g.describe();
    *out = new cm_graph{std::move(g), std::move(d)};
  });
}

cm_status cm_graph_box(int dimension, size_t side, cm_graph** out) {
  CM_CHECK_NULL(out);
  return guard([&] {
    Graph g = Graph::box(dimension, side);
    std::string d = g.describe();
    *out = new cm_graph{std::move(g), std::move(d)};
  });
}

void cm_graph_free(cm_graph* graph) { delete graph; }

size_t cm_graph_vertices(const cm_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.vertices();
}

size_t cm_graph_central_vertex(const cm_graph* graph) {
  return graph == nullptr ? 0 : graph->graph.central_vertex();
}

const char* cm_graph_describe(const cm_graph* graph) {
  return graph == nullptr ? "" : graph->description.c_str();
}

cm_status cm_graph_ball_size(const cm_graph* graph, size_t center, size_t radius,
                             size_t* out) {
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(out);
  return guard([&] { *out = graph->graph.ball(center, radius).size(); });
}

cm_status cm_graph_default_growth(const cm_graph* graph, double* c_d, int* d) {
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(c_d);
  CM_CHECK_NULL(d);
  return guard([&] {
    const GraphGrowth g = default_growth(graph->graph);
    *c_d = g.c_d;
    *d = g.d;
  });
}

cm_status cm_rcm_experiment(const cm_law* law, const cm_graph* graph, size_t center,
                            size_t radius, double s, double alpha, uint64_t trials,
                            cm_seed seed, double c_d, int d, unsigned workers,
                            cm_rcm_report* out) {
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(out);
  return guard([&] {
    const RcmReport r = rcm_experiment(law->spec, graph->graph, center, radius, s, alpha,
                                       trials, seed_of(seed), GraphGrowth{c_d, d},
                                       workers_of(workers));
    cm_rcm_report c{};
    c.q_size = r.q_size;
    c.radius = r.radius;
    c.s = r.s;
    c.alpha = r.alpha;
    c.tail = to_c(r.tail);
    c.check = to_c(r.check);
    c.holds = r.holds ? 1 : 0;
    c.growth_holds = r.growth_holds ? 1 : 0;
    c.growth_bound = r.growth_bound;
    *out = c;
  });
}

/* spectral */

cm_status cm_jacobi_eigen(const double* a, size_t n, double* values, double* vectors,
                          int* sweeps) {
  CM_CHECK_NULL(a);
  CM_CHECK_NULL(values);
  return guard([&] {
    const Matrix m(n, std::vector<double>(a, a + n * n));
    const EigenDecomposition e = jacobi_eigen(m, vectors != nullptr);
    std::memcpy(values, e.values.data(), n * sizeof(double));
    if (vectors) copy_matrix(e.vectors, vectors);
    if (sweeps) *sweeps = e.sweeps;
  });
}

cm_status cm_eigenvalues_symmetric(const double* a, size_t n, double* values) {
  return cm_jacobi_eigen(a, n, values, nullptr, nullptr);
}

cm_status cm_count_in_interval(const double* sorted_eigs, size_t n, double t, double s,
                               size_t* out) {
  CM_CHECK_NULL(out);
  if (n > 0) CM_CHECK_NULL(sorted_eigs);
  return guard([&] { *out = count_in_interval(optional_span(sorted_eigs, n), t, s).count; });
}

cm_status cm_operator_build(const cm_graph* graph, const cm_law* law, cm_seed seed,
                            cm_kinetic kinetic, cm_operator** out) {
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = new cm_operator{
        build_operator(graph->graph, law->spec, seed_of(seed), kinetic_of(kinetic))};
  });
}

cm_status cm_operator_from_potential(const cm_graph* graph, const double* potential,
                                     cm_kinetic kinetic, cm_operator** out) {
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(potential);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = new cm_operator{build_operator(
        graph->graph, span_of(potential, graph->graph.vertices()), kinetic_of(kinetic))};
  });
}

void cm_operator_free(cm_operator* op) { delete op; }

size_t cm_operator_size(const cm_operator* op) {
  return op == nullptr ? 0 : op->op.potential.size();
}

double cm_operator_xi(const cm_operator* op) { return op == nullptr ? NAN : op->op.xi; }

cm_status cm_operator_potential(const cm_operator* op, double* out) {
  CM_CHECK_NULL(op);
  CM_CHECK_NULL(out);
  std::memcpy(out, op->op.potential.data(), op->op.potential.size() * sizeof(double));
  last_error.clear();
  return CM_OK;
}

cm_status cm_operator_hamiltonian(const cm_operator* op, double* out) {
  CM_CHECK_NULL(op);
  CM_CHECK_NULL(out);
  copy_matrix(op->op.hamiltonian, out);
  last_error.clear();
  return CM_OK;
}

cm_status cm_operator_fluct_part(const cm_operator* op, double* out) {
  CM_CHECK_NULL(op);
  CM_CHECK_NULL(out);
  copy_matrix(op->op.fluct_part, out);
  last_error.clear();
  return CM_OK;
}

cm_status cm_evc_experiment(const cm_graph* graph, const cm_law* law, const double* t_values,
                            size_t n_t, double s, uint64_t trials, cm_seed seed,
                            cm_kinetic kinetic, unsigned workers, cm_evc_report** out) {
  CM_CHECK_NULL(graph);
  CM_CHECK_NULL(law);
  CM_CHECK_NULL(t_values);
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = new cm_evc_report{evc_experiment(graph->graph, law->spec, span_of(t_values, n_t),
                                            s, trials, seed_of(seed), kinetic_of(kinetic),
                                            workers_of(workers))};
  });
}

void cm_evc_report_free(cm_evc_report* report) { delete report; }

cm_status cm_evc_report_summary(const cm_evc_report* report, cm_evc_summary* out) {
  CM_CHECK_NULL(report);
  CM_CHECK_NULL(out);
  const EvcReport& r = report->report;
  *out = {r.volume, r.s, r.trials, r.points.size(), r.max_identity_error, r.mean_modulus};
  last_error.clear();
  return CM_OK;
}

cm_status cm_evc_report_point(const cm_evc_report* report, size_t index, cm_evc_point* out) {
  CM_CHECK_NULL(report);
  CM_CHECK_NULL(out);
  return guard([&] {
    require(index < report->report.points.size(), ErrorCode::invalid_argument,
            "point index out of range");
    const EvcPoint& p = report->report.points[index];
    cm_evc_point c{};
    c.t = p.t;
    c.tail = to_c(p.tail);
    c.has_wegner_bound = p.wegner_bound.has_value() ? 1 : 0;
    c.wegner_bound = p.wegner_bound.value_or(0.0);
    c.has_evc_diagnostic = p.evc_diagnostic.has_value() ? 1 : 0;
    c.evc_diagnostic = p.evc_diagnostic.value_or(0.0);
    c.holds = p.holds ? 1 : 0;
    *out = c;
  });
}

/* Gaussian independence */

cm_status cm_gaussian_independence_check(size_t n, uint64_t samples, size_t bins,
                                         double bin_width, cm_seed seed, unsigned workers,
                                         double ks_tolerance, double peak_slack,
                                         cm_gauss_report** out) {
  CM_CHECK_NULL(out);
  return guard([&] {
    *out = new cm_gauss_report{gaussian_independence_check(
        n, samples, bins, bin_width, seed_of(seed), workers_of(workers), ks_tolerance,
        peak_slack)};
  });
}

void cm_gauss_report_free(cm_gauss_report* report) { delete report; }

cm_status cm_gauss_report_summary(const cm_gauss_report* report, cm_gauss_summary* out) {
  CM_CHECK_NULL(report);
  CM_CHECK_NULL(out);
  const GaussCheckReport& r = report->report;
  cm_gauss_summary c{};
  c.n = r.n;
  c.samples = r.samples;
  c.bins = r.bins;
  c.max_ks = r.max_ks;
  c.ks_tolerance = r.ks_tolerance;
  c.bin_width = r.bin_width;
  c.peak_density = r.peak_density;
  c.density_bound = r.density_bound;
  c.peak_slack = r.peak_slack;
  c.ks_ok = r.ks_ok ? 1 : 0;
  c.peak_ok = r.peak_ok ? 1 : 0;
  c.histogram_bins = r.histogram.size();
  *out = c;
  last_error.clear();
  return CM_OK;
}

cm_status cm_gauss_report_bin_ks(const cm_gauss_report* report, size_t bin, double* out) {
  CM_CHECK_NULL(report);
  CM_CHECK_NULL(out);
  return guard([&] {
    require(bin < report->report.bin_ks.size(), ErrorCode::invalid_argument,
            "bin index out of range");
    *out = report->report.bin_ks[bin];
  });
}

cm_status cm_gauss_report_histogram(const cm_gauss_report* report, size_t index,
                                    double* centre, double* density) {
  CM_CHECK_NULL(report);
  CM_CHECK_NULL(centre);
  CM_CHECK_NULL(density);
  return guard([&] {
    require(index < report->report.histogram.size(), ErrorCode::invalid_argument,
            "histogram index out of range");
    *centre = report->report.histogram[index].first;
    *density = report->report.histogram[index].second;
  });
}

/* fiber identity */

cm_status cm_fiber_identity_check(const size_t* ns, size_t n_ns, const double* ells,
                                  size_t n_ells, uint64_t samples, double step_rel,
                                  cm_seed seed, unsigned workers,
                                  cm_fiber_identity_row* rows) {
  CM_CHECK_NULL(ns);
  CM_CHECK_NULL(ells);
  CM_CHECK_NULL(rows);
  return guard([&] {
    const std::vector<FiberIdentityRow> r = fiber_identity_check(
        std::span<const std::size_t>(ns, n_ns), span_of(ells, n_ells), samples, step_rel,
        seed_of(seed), workers_of(workers));
    for (std::size_t i = 0; i < r.size(); ++i) {
      rows[i] = {r[i].n,         r[i].ell,          r[i].samples,
                 r[i].step,      r[i].tolerance,    r[i].max_abs_diff,
                 r[i].max_translation_diff, r[i].min_lower_bound_slack,
                 r[i].pass ? 1 : 0};
    }
  });
}

}  // extern "C"
