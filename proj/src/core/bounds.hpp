#pragma once

#include <cstddef>

#include "core/distributions.hpp"

namespace condmean {

/// A probability bound: `raw` is the formula's value, `value` = clamp(raw, 0, 1).
struct ProbabilityBound {
  double value = 0.0;
  double raw = 0.0;
};

ProbabilityBound make_bound(double raw);

/// Fiber-tail bounds are reported in both forms the proof displays:
/// the pairwise-union sum N(N-1)(...) and the published N^2-relaxed form.
struct PairBound {
  ProbabilityBound pairwise;
  ProbabilityBound published;
};

/// sum_i P(X_i - a_i < delta) = N delta / ell for uniform marginals; 0 < delta <= ell.
ProbabilityBound bound_lemma41(std::size_t n, double ell, double delta);

/// P(nu > s / delta) <= N delta / ell; 0 < delta <= ell.
ProbabilityBound bound_thm42(std::size_t n, double ell, double delta);
/// With delta = s^alpha: N s^alpha / ell.
ProbabilityBound bound_thm42_alpha(std::size_t n, double ell, double s, double alpha);

/// P(|fiber| < r) <= rho_max^2 r^2 N / 4 (pairwise: (N-1) rho_max^2 r^2 / 4).
PairBound bound_lemma51(std::size_t n, double rho_max, double r);
/// Uniform[0, ell] specialization, rho_max = 1 / ell.
PairBound bound_lemma51_uniform(std::size_t n, double ell, double r);

/// P(nu > s / delta) <= N^2 delta^2 / (4 ell^2); 0 < delta <= s <= ell.
/// Pairwise form N(N-1) delta^2 / (4 ell^2).
PairBound bound_thm52(std::size_t n, double ell, double delta, double s);
/// With delta = s^alpha: N^2 s^(2 alpha) / (4 ell^2).
PairBound bound_thm52_alpha(std::size_t n, double ell, double s, double alpha);

/// Regularity-of-the-conditional-mean parameters:
/// P(nu_|Q|(s) >= C'|Q|^A' s^B') <= C''|Q|^A'' s^B''.
struct RcmParams {
  double c_prime = 1.0;
  double c_double = 1.0;
  double a_prime = 0.0;
  double a_double = 0.0;
  double b_prime = 1.0;
  double b_double = 1.0;

  double threshold(std::size_t q_size, double s) const;
  double rhs(std::size_t q_size, double s) const;
};

/// Parameters realized by Uniform[c, c + ell] marginals:
/// C' = 1, A' = 0, B' = 1 - alpha, C'' = 1 / (4 ell^2), A'' = 2, B'' = 2 alpha.
RcmParams rcm_params_uniform(double ell, double alpha = 1.0 / 3.0);

struct RcmCheck {
  bool holds = false;
  double threshold = 0.0;  ///< C'|Q|^A' s^B', defines the event
  double rhs = 0.0;        ///< C''|Q|^A'' s^B'', clamped to 1
};

RcmCheck rcm_check(const RcmParams& params, std::size_t q_size, double s,
                   double empirical_tail);

/// Smooth-density tail bound 4 rho_max^2 N^2 delta^2 / ell^2, valid only for
/// 0 < delta <= c_* N^{-3/2}.
struct ConditionalBound {
  bool applicable = false;
  double delta_max = 0.0;  ///< c_* N^{-3/2}
  ProbabilityBound bound;  ///< meaningful only when applicable
};

ConditionalBound bound_thm61(std::size_t n, double ell, double rho_max,
                             double delta, const SmoothConstants& constants);

/// |Lambda|^{3/2} |I| / sqrt(2 pi).
ProbabilityBound bound_wegner_gaussian(std::size_t volume, double interval_len);

/// P(tr P_I >= 1) <= |Lambda| nu.
ProbabilityBound evc_bound(std::size_t volume, double nu);

}  // namespace condmean
