#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace condmean {

namespace {

double as_real(std::size_t n) { return static_cast<double>(n); }

void check_n(std::size_t n, std::size_t min_n = 2) {
  require(n >= min_n, ErrorCode::invalid_argument, "sample size too small");
}

void check_ell(double ell) {
  require(std::isfinite(ell) && ell > 0.0, ErrorCode::invalid_argument,
          "ell must be positive");
}

void check_delta(double delta, double ell) {
  if (!(delta > 0.0 && delta <= ell))
    fail(ErrorCode::domain, "delta must satisfy 0 < delta <= ell");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::domain, "alpha must lie in (0, 1)");
}

void check_s(double s) {
  if (!(std::isfinite(s) && s > 0.0))
    fail(ErrorCode::domain, "s must be positive");
}

}  // namespace

ProbabilityBound make_bound(double raw) {
  return {std::clamp(raw, 0.0, 1.0), raw};
}

ProbabilityBound bound_lemma41(std::size_t n, double ell, double delta) {
  check_n(n);
  check_ell(ell);
  check_delta(delta, ell);
  return make_bound(as_real(n) * delta / ell);
}

ProbabilityBound bound_thm42(std::size_t n, double ell, double delta) {
  return bound_lemma41(n, ell, delta);
}

ProbabilityBound bound_thm42_alpha(std::size_t n, double ell, double s,
                                   double alpha) {
  check_n(n);
  check_ell(ell);
  check_s(s);
  check_alpha(alpha);
  return make_bound(as_real(n) * std::pow(s, alpha) / ell);
}

PairBound bound_lemma51(std::size_t n, double rho_max, double r) {
  check_n(n);
  require(std::isfinite(rho_max) && rho_max > 0.0, ErrorCode::invalid_argument,
          "rho_max must be positive");
  require(std::isfinite(r) && r >= 0.0, ErrorCode::invalid_argument,
          "r must be nonnegative");
  const double nn = as_real(n);
  // Pair events A_ij at t = r N^{-1/2}: N(N-1) (rho_max t)^2 / 4.
  const double t = r / std::sqrt(nn);
  return {make_bound(nn * (nn - 1.0) * rho_max * rho_max * t * t / 4.0),
          make_bound(rho_max * rho_max * r * r * nn / 4.0)};
}

PairBound bound_lemma51_uniform(std::size_t n, double ell, double r) {
  check_ell(ell);
  return bound_lemma51(n, 1.0 / ell, r);
}

PairBound bound_thm52(std::size_t n, double ell, double delta, double s) {
  check_n(n);
  check_ell(ell);
  if (!(delta > 0.0 && delta <= s && s <= ell))
    fail(ErrorCode::domain, "need 0 < delta <= s <= ell");
  const double nn = as_real(n);
  const double scale = delta * delta / (4.0 * ell * ell);
  return {make_bound(nn * (nn - 1.0) * scale), make_bound(nn * nn * scale)};
}

PairBound bound_thm52_alpha(std::size_t n, double ell, double s, double alpha) {
  check_n(n);
  check_ell(ell);
  check_s(s);
  check_alpha(alpha);
  const double nn = as_real(n);
  const double scale = std::pow(s, 2.0 * alpha) / (4.0 * ell * ell);
  return {make_bound(nn * (nn - 1.0) * scale), make_bound(nn * nn * scale)};
}

double RcmParams::threshold(std::size_t q_size, double s) const {
  return c_prime * std::pow(as_real(q_size), a_prime) * std::pow(s, b_prime);
}

double RcmParams::rhs(std::size_t q_size, double s) const {
  return c_double * std::pow(as_real(q_size), a_double) * std::pow(s, b_double);
}

RcmParams rcm_params_uniform(double ell, double alpha) {
  check_ell(ell);
  check_alpha(alpha);
  RcmParams p;
  p.c_prime = 1.0;
  p.a_prime = 0.0;
  p.b_prime = 1.0 - alpha;
  p.c_double = 1.0 / (4.0 * ell * ell);
  p.a_double = 2.0;
  p.b_double = 2.0 * alpha;
  return p;
}

RcmCheck rcm_check(const RcmParams& params, std::size_t q_size, double s,
                   double empirical_tail) {
  check_n(q_size);
  check_s(s);
  RcmCheck c;
  c.threshold = params.threshold(q_size, s);
  c.rhs = std::min(1.0, params.rhs(q_size, s));
  c.holds = empirical_tail <= c.rhs;
  return c;
}

ConditionalBound bound_thm61(std::size_t n, double ell, double rho_max,
                             double delta, const SmoothConstants& constants) {
  check_n(n);
  check_ell(ell);
  require(std::isfinite(rho_max) && rho_max > 0.0, ErrorCode::invalid_argument,
          "rho_max must be positive");
  const double nn = as_real(n);
  ConditionalBound b;
  b.delta_max = constants.c_star * std::pow(nn, -1.5);
  b.applicable = delta > 0.0 && delta <= b.delta_max;
  if (b.applicable)
    b.bound = make_bound(4.0 * rho_max * rho_max * nn * nn * delta * delta /
                         (ell * ell));
  return b;
}

ProbabilityBound bound_wegner_gaussian(std::size_t volume, double interval_len) {
  require(volume >= 1, ErrorCode::invalid_argument, "volume must be positive");
  require(std::isfinite(interval_len) && interval_len >= 0.0,
          ErrorCode::invalid_argument, "interval length must be nonnegative");
  return make_bound(std::pow(as_real(volume), 1.5) * interval_len /
                    std::sqrt(2.0 * std::numbers::pi));
}

ProbabilityBound evc_bound(std::size_t volume, double nu) {
  require(nu >= 0.0 && nu <= 1.0, ErrorCode::invalid_argument,
          "nu must be a probability");
  return make_bound(as_real(volume) * nu);
}

}  // namespace condmean
