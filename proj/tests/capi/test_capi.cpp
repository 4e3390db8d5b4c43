#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "condmean/condmean.h"

extern "C" int condmean_c_smoke(void);

namespace {

struct Law {
  cm_law* p = nullptr;
  ~Law() { cm_law_free(p); }
};

struct GraphHandle {
  cm_graph* p = nullptr;
  ~GraphHandle() { cm_graph_free(p); }
};

double tilt(double t, void* user) { return 1.0 + *static_cast<double*>(user) * (2.0 * t - 1.0); }
double tilt_prime(double, void* user) { return 2.0 * *static_cast<double*>(user); }

}  // namespace

TEST_CASE("the header compiles and works from C") { CHECK(condmean_c_smoke() == 0); }

TEST_CASE("status reporting") {
  CHECK(std::string(cm_version()) == "1.0.0");
  CHECK(std::string(cm_status_name(CM_OK)) == "ok");
  CHECK(std::string(cm_status_name(CM_ERR_DOMAIN)) == "domain");
  cm_law* law = nullptr;
  CHECK(cm_law_uniform(-1.0, 0.0, &law) == CM_ERR_DENSITY_SPEC);
  CHECK(law == nullptr);
  CHECK(std::strlen(cm_last_error()) > 0);
  CHECK(cm_law_uniform(1.0, 0.0, nullptr) == CM_ERR_NULL_POINTER);
  double v = 0.0;
  CHECK(cm_uniform_range_cdf(1, 1.0, 0.5, &v) == CM_ERR_INVALID_ARGUMENT);
  CHECK(cm_uniform_range_cdf(2, 1.0, 0.9, &v) == CM_OK);
  CHECK(v == doctest::Approx(0.99));
  CHECK(std::string(cm_last_error()).empty());
  cm_law_free(nullptr);
}

TEST_CASE("laws and samplers") {
  Law cosine;
  REQUIRE(cm_law_registry("cosine-bump", 0.5, 1.0, &cosine.p) == CM_OK);
  cm_law_info info{};
  REQUIRE(cm_law_get_info(cosine.p, &info) == CM_OK);
  CHECK(info.kind == CM_LAW_SMOOTH);
  CHECK(info.rho_min == doctest::Approx(0.5));
  CHECK(info.rho_max == doctest::Approx(1.5));
  CHECK(info.c_rho_prime == doctest::Approx(std::numbers::pi));
  CHECK(info.constants.c_star == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
  double mass = 0.0;
  CHECK(cm_law_mass(cosine.p, 0.0, 0.5, &mass) == CM_OK);
  CHECK(mass == doctest::Approx(0.5).epsilon(1e-10));

  Law bad;
  CHECK(cm_law_registry("nope", 0.5, 1.0, &bad.p) == CM_ERR_DENSITY_SPEC);

  double b = 0.25;
  Law custom;
  REQUIRE(cm_law_smooth("tilt", 1.0, tilt, tilt_prime, &b, 0.75, 1.25, 0.5, &custom.p) == CM_OK);
  std::vector<double> a(1000), c(1000);
  REQUIRE(cm_sample_iid(custom.p, a.size(), {4, 0}, a.data()) == CM_OK);
  REQUIRE(cm_sample_iid(custom.p, c.size(), {4, 0}, c.data()) == CM_OK);
  CHECK(a == c);
  Law wrong;
  CHECK(cm_law_smooth("tilt", 1.0, tilt, tilt_prime, &b, 0.9, 1.25, 0.5, &wrong.p) ==
        CM_ERR_DENSITY_SPEC);

  cm_sampler* sampler = nullptr;
  REQUIRE(cm_sampler_new(cosine.p, {1, 2}, 3, &sampler) == CM_OK);
  double x = 0.0;
  CHECK(cm_sampler_draw_restricted(sampler, 0.2, 0.3, &x) == CM_OK);
  CHECK((x >= 0.2 && x <= 0.3));
  CHECK(cm_sampler_draw_restricted(sampler, 2.0, 3.0, &x) == CM_ERR_INVALID_ARGUMENT);
  cm_sampler_free(sampler);
}

TEST_CASE("geometry and moduli") {
  const double x[3] = {0.2, 0.5, 0.9};
  double xi = 0, xt = 0, eta[3], y[2];
  REQUIRE(cm_decompose(x, 3, &xi, &xt, eta, y) == CM_OK);
  CHECK(xi == doctest::Approx(1.6 / 3.0));
  CHECK(y[0] == doctest::Approx(-0.7));
  CHECK(cm_decompose(x, 1, &xi, nullptr, nullptr, nullptr) == CM_ERR_INVALID_SAMPLE);

  cm_fiber_geometry g{};
  REQUIRE(cm_fiber_length_cube(x, 3, 1.0, nullptr, &g) == CM_OK);
  CHECK(g.length == doctest::Approx(std::sqrt(3.0) * 0.3));
  double scan = 0.0;
  REQUIRE(cm_fiber_length_bruteforce(x, 3, 1.0, nullptr, 1e-5, &scan) == CM_OK);
  CHECK(std::abs(scan - g.length) <= 2e-5 * std::sqrt(3.0));
  const double outside[2] = {1.5, 0.2};
  CHECK(cm_fiber_length_cube(outside, 2, 1.0, nullptr, &g) == CM_ERR_OUT_OF_SUPPORT);

  double exact = 0, bound = 0;
  REQUIRE(cm_modulus_gaussian(4, 0.1, 1.0, &exact, &bound) == CM_OK);
  CHECK(bound == doctest::Approx(0.07979).epsilon(1e-4));

  Law cosine;
  REQUIRE(cm_law_registry("cosine-bump", 0.5, 1.0, &cosine.p) == CM_OK);
  const double two[2] = {0.3, 0.7};
  cm_fiber_modulus m{};
  REQUIRE(cm_modulus_smooth_numeric(two, 2, cosine.p, 0.1, 256, &m) == CM_OK);
  CHECK((m.nu >= 1.0 / 18.0 && m.nu <= 0.5));
  double z = 0.0;
  REQUIRE(cm_fiber_density_normalization(two, 2, cosine.p, 256, &z) == CM_OK);
  CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
  cm_log_derivative_check ld{};
  REQUIRE(cm_log_derivative_check_at(two, 2, cosine.p, 0.3, 1e-5, 4096, &ld) == CM_OK);
  CHECK(ld.abs_diff <= 1e-6);
  CHECK(ld.within_c1_bound);
  CHECK(cm_log_derivative_check_at(two, 2, cosine.p, 3.0, 1e-5, 4096, &ld) == CM_ERR_DOMAIN);
}

TEST_CASE("bounds through the C interface") {
  cm_bound b{};
  cm_pair_bound pb{};
  REQUIRE(cm_bound_thm42(10, 1.0, 0.05, &b) == CM_OK);
  CHECK(b.value == doctest::Approx(0.5));
  REQUIRE(cm_bound_thm52(10, 1.0, 0.05, 0.05, &pb) == CM_OK);
  CHECK(pb.published.value == doctest::Approx(0.0625));
  CHECK(cm_bound_thm52(10, 1.0, 0.05, 0.01, &pb) == CM_ERR_DOMAIN);
  REQUIRE(cm_bound_wegner_gaussian(16, 0.01, &b) == CM_OK);
  CHECK(b.value == doctest::Approx(0.255323).epsilon(1e-6));
  cm_rcm_params p{};
  REQUIRE(cm_rcm_params_uniform(1.0, 1.0 / 3.0, &p) == CM_OK);
  cm_rcm_check rc{};
  REQUIRE(cm_rcm_check_tail(&p, 9, 0.01, 0.5, &rc) == CM_OK);
  CHECK(rc.rhs == doctest::Approx(0.9399).epsilon(1e-4));
  CHECK(rc.holds);
  cm_smooth_constants k{2.0 * std::numbers::pi, 1.0 / (2.0 * std::numbers::pi),
                        1.0 / (4.0 * std::numbers::pi)};
  cm_conditional_bound cb{};
  REQUIRE(cm_bound_thm61(4, 1.0, 1.5, 0.005, &k, &cb) == CM_OK);
  CHECK(cb.applicable);
  CHECK(cb.bound.value == doctest::Approx(0.0036));
  REQUIRE(cm_bound_thm61(4, 1.0, 1.5, 0.05, &k, &cb) == CM_OK);
  CHECK_FALSE(cb.applicable);
  CHECK(cm_bound_thm61(4, 1.0, 1.5, 0.005, nullptr, &cb) == CM_ERR_NULL_POINTER);
  REQUIRE(cm_evc_bound(50, 0.05, &b) == CM_OK);
  CHECK(b.value == 1.0);
}

TEST_CASE("experiments through the C interface") {
  Law uniform;
  REQUIRE(cm_law_uniform(1.0, 0.0, &uniform.p) == CM_OK);
  cm_experiment cfg;
  cm_experiment_init(&cfg);
  CHECK(cfg.n == 2);
  CHECK(cfg.grid == 256);
  cfg.law = uniform.p;
  CHECK(cm_experiment_validate(&cfg) == CM_ERR_INVALID_ARGUMENT);  // neither delta nor alpha
  cfg.has_delta = 1;
  cfg.delta = 0.1;
  cfg.trials = 40000;
  cfg.seed = {17, 0};
  CHECK(cm_experiment_validate(&cfg) == CM_OK);

  cm_tail_estimate one{}, four{};
  REQUIRE(cm_estimate_modulus_tail(&cfg, &one) == CM_OK);
  cfg.workers = 4;
  REQUIRE(cm_estimate_modulus_tail(&cfg, &four) == CM_OK);
  CHECK(one.hits == four.hits);
  CHECK(one.has_oracle);
  CHECK(std::abs(one.p_hat - one.oracle) <= 4.0 * std::sqrt(0.01 * 0.99 / 40000.0));

  cm_tail_estimate ft{};
  REQUIRE(cm_estimate_fiber_tail(&cfg, 0.0, &ft) == CM_OK);
  CHECK(ft.hits == 0);

  double cuts[3];
  REQUIRE(cm_partition_random({9, 0}, 0, 2, 0.0, 1.0, cuts) == CM_OK);
  CHECK(cuts[0] == 0.0);
  CHECK(cuts[2] == 1.0);
  const double half[3] = {0.0, 0.5, 1.0};
  cm_partition_report rep{};
  REQUIRE(cm_estimate_local_partition(&cfg, half, 3, CM_MU_CONSTANT, 0.45, &rep) == CM_OK);
  CHECK(rep.boxes == 4);
  CHECK(rep.sup_holds);
  CHECK(std::abs(rep.direct.p_hat - 0.19) <= 4.0 * rep.direct.std_error);

  GraphHandle path;
  REQUIRE(cm_graph_path(9, &path.p) == CM_OK);
  CHECK(cm_graph_vertices(path.p) == 9);
  CHECK(cm_graph_central_vertex(path.p) == 4);
  CHECK(std::string(cm_graph_describe(path.p)).size() > 0);
  size_t ball = 0;
  REQUIRE(cm_graph_ball_size(path.p, 4, 4, &ball) == CM_OK);
  CHECK(ball == 9);
  double c_d = 0;
  int d = 0;
  REQUIRE(cm_graph_default_growth(path.p, &c_d, &d) == CM_OK);
  CHECK(c_d == 3.0);
  CHECK(d == 1);
  cm_rcm_report rr{};
  REQUIRE(cm_rcm_experiment(uniform.p, path.p, 4, 4, 0.01, 1.0 / 3.0, 20000, {7, 0}, c_d, d, 2,
                            &rr) == CM_OK);
  CHECK(rr.q_size == 9);
  CHECK(rr.holds);
  CHECK(cm_graph_ball_size(path.p, 20, 1, &ball) == CM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("spectral routines through the C interface") {
  const double m[4] = {0.0, 1.0, 1.0, 0.0};
  double ev[2];
  REQUIRE(cm_eigenvalues_symmetric(m, 2, ev) == CM_OK);
  CHECK(ev[0] == doctest::Approx(-1.0));
  CHECK(ev[1] == doctest::Approx(1.0));
  double vec[4];
  int sweeps = 0;
  REQUIRE(cm_jacobi_eigen(m, 2, ev, vec, &sweeps) == CM_OK);
  CHECK(std::abs(std::abs(vec[0]) - std::sqrt(0.5)) <= 1e-12);
  const double asym[4] = {0.0, 1.0, 0.0, 0.0};
  CHECK(cm_eigenvalues_symmetric(asym, 2, ev) == CM_ERR_DOMAIN);
  size_t count = 0;
  REQUIRE(cm_count_in_interval(ev, 2, 0.9, 0.2, &count) == CM_OK);
  CHECK(count == 1);

  GraphHandle path;
  REQUIRE(cm_graph_path(4, &path.p) == CM_OK);
  const double v[4] = {1.0, 2.0, 3.0, 4.0};
  cm_operator* op = nullptr;
  REQUIRE(cm_operator_from_potential(path.p, v, CM_KINETIC_ADJACENCY, &op) == CM_OK);
  CHECK(cm_operator_size(op) == 4);
  CHECK(cm_operator_xi(op) == doctest::Approx(2.5));
  std::vector<double> h(16), a(16);
  REQUIRE(cm_operator_hamiltonian(op, h.data()) == CM_OK);
  REQUIRE(cm_operator_fluct_part(op, a.data()) == CM_OK);
  CHECK(h[0] == 1.0);
  CHECK(h[1] == 1.0);
  CHECK(a[0] == doctest::Approx(-1.5));
  cm_operator_free(op);

  Law gauss;
  REQUIRE(cm_law_gaussian(0.0, 1.0, &gauss.p) == CM_OK);
  GraphHandle p16;
  REQUIRE(cm_graph_path(16, &p16.p) == CM_OK);
  const double ts[3] = {-1.0, 0.0, 1.0};
  cm_evc_report* evc = nullptr;
  REQUIRE(cm_evc_experiment(p16.p, gauss.p, ts, 3, 0.01, 500, {5, 0}, CM_KINETIC_ADJACENCY, 1,
                            &evc) == CM_OK);
  cm_evc_summary sum{};
  REQUIRE(cm_evc_report_summary(evc, &sum) == CM_OK);
  CHECK(sum.points == 3);
  CHECK(sum.max_identity_error <= 1e-9);
  cm_evc_point pt{};
  REQUIRE(cm_evc_report_point(evc, 1, &pt) == CM_OK);
  CHECK(pt.has_wegner_bound);
  CHECK(cm_evc_report_point(evc, 3, &pt) == CM_ERR_INVALID_ARGUMENT);
  cm_evc_report_free(evc);

  cm_gauss_report* gr = nullptr;
  REQUIRE(cm_gaussian_independence_check(4, 100000, 5, 0.05, {4, 0}, 2, 0.02, 0.05, &gr) == CM_OK);
  cm_gauss_summary gs{};
  REQUIRE(cm_gauss_report_summary(gr, &gs) == CM_OK);
  CHECK(gs.ks_ok);
  CHECK(gs.peak_ok);
  double ks = 0, centre = 0, dens = 0;
  CHECK(cm_gauss_report_bin_ks(gr, 0, &ks) == CM_OK);
  CHECK(cm_gauss_report_histogram(gr, 0, &centre, &dens) == CM_OK);
  cm_gauss_report_free(gr);

  const size_t ns[2] = {2, 3};
  const double ells[1] = {1.0};
  cm_fiber_identity_row rows[2];
  REQUIRE(cm_fiber_identity_check(ns, 2, ells, 1, 100, 1e-4, {11, 0}, 1, rows) == CM_OK);
  CHECK(rows[0].pass);
  CHECK(rows[1].n == 3);
}
