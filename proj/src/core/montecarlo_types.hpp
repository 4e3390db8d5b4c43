#pragma once

#include <cstdint>
#include <optional>

namespace condmean {

/// Bound assertions allow this many standard errors of Monte Carlo slack.
inline constexpr double kBoundSlackSigmas = 4.0;

/// Frequency estimate of a tail probability with a Wilson 95% interval.
struct TailEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;  ///< sqrt(p_hat (1 - p_hat) / trials)
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  std::optional<double> oracle;  ///< exact value when one is available
};

TailEstimate make_tail_estimate(std::uint64_t hits, std::uint64_t trials);

}  // namespace condmean
