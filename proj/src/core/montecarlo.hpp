#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "core/bounds.hpp"
#include "core/distributions.hpp"
#include "core/geometry.hpp"
#include "core/graph.hpp"
#include "core/montecarlo_types.hpp"
#include "core/rng.hpp"

namespace condmean {

enum class Mode { uniform_exact, smooth_numeric, gaussian_closed_form };

const char* mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

/// One tail experiment. Exactly one of `delta` (event nu > s / delta) or
/// `alpha` (event nu > s^{1 - alpha}) must be set.
struct ExperimentConfig {
  DensitySpec law;
  std::size_t n = 2;
  std::uint64_t trials = 100'000;
  double s = 0.1;
  std::optional<double> delta;
  std::optional<double> alpha;
  SeedSpec seed;
  Mode mode = Mode::uniform_exact;
  std::size_t grid = 256;  ///< smooth-numeric fiber grid
  bool clamp = false;      ///< compare min(nu, 1) instead of the raw ratio

  double event_threshold() const;
  /// Throws invalid_argument describing the first inconsistency.
  void validate() const;
};

/// Frequency of {nu > threshold} (strict). For uniform laws the exact value
/// is attached as `oracle` via nu > thr <=> |fiber| < sqrt(N) s / thr.
TailEstimate estimate_modulus_tail(const ExperimentConfig& cfg, unsigned workers = 1);

/// Frequency of {|fiber| < r}; bounded-support laws only.
TailEstimate estimate_fiber_tail(const ExperimentConfig& cfg, double r,
                                 unsigned workers = 1);

/// Intervals J_k = [cut_k, cut_{k+1}] covering the support.
class PartitionSpec {
 public:
  explicit PartitionSpec(std::vector<double> cut_points);

  /// `intervals` pieces of [lo, hi] with uniformly drawn interior cuts.
  static PartitionSpec random(Stream& stream, std::size_t intervals, double lo, double hi);

  std::size_t intervals() const { return cuts_.size() - 1; }
  double lo(std::size_t k) const { return cuts_[k]; }
  double hi(std::size_t k) const { return cuts_[k + 1]; }
  std::span<const double> cut_points() const { return cuts_; }
  bool covers(const DensitySpec& law) const;

 private:
  std::vector<double> cuts_;
};

/// A statistic of the fluctuations giving the left end of the window.
struct MuRule {
  enum class Kind { constant, median_eta };
  Kind kind = Kind::constant;
  double value = 0.0;  ///< the constant, or an offset added to median(eta)

  double operator()(std::span<const double> x, double xi) const;
};

struct BoxEstimate {
  std::vector<std::size_t> index;  ///< interval index of each coordinate
  double mass = 0.0;               ///< exact p_k
  TailEstimate conditional;        ///< P_k(xi in [mu, mu + s])
};

struct PartitionReport {
  TailEstimate direct;
  double decomposed = 0.0;  ///< sum_k p_k * conditional_k
  double decomposed_std_error = 0.0;
  double sup_box = 0.0;
  std::vector<BoxEstimate> boxes;  ///< boxes with positive mass
  bool agree = false;      ///< |direct - decomposed| <= 4 combined stderr
  bool sup_holds = false;  ///< direct <= sup_box + 4 stderr(direct)
};

inline constexpr std::size_t kMaxPartitionBoxes = 4096;

/// Estimates P(xi in [mu, mu + s]) directly and through the box
/// decomposition, sampling each box from the law restricted to it with
/// cfg.trials / (#boxes) draws (at least 100).
PartitionReport estimate_local_partition(const ExperimentConfig& cfg,
                                         const PartitionSpec& partition,
                                         const MuRule& mu, unsigned workers = 1);

struct RcmReport {
  std::size_t q_size = 0;
  std::size_t radius = 0;
  double s = 0.0;
  double alpha = 0.0;
  TailEstimate tail;
  RcmCheck check;
  bool holds = false;         ///< p_hat <= rhs + 4 stderr
  bool growth_holds = false;  ///< |Q| <= c_d radius^d
  double growth_bound = 0.0;
};

/// Regularity check on Q = B_radius(center) with uniform potentials.
RcmReport rcm_experiment(const DensitySpec& law, const Graph& graph,
                         std::size_t center, std::size_t radius, double s,
                         double alpha, std::uint64_t trials, SeedSpec seed,
                         GraphGrowth growth, unsigned workers = 1);

struct GaussCheckReport {
  std::size_t n = 0;
  std::uint64_t samples = 0;
  std::size_t bins = 0;
  std::vector<double> bin_ks;  ///< KS distance of xi | eta_1-bin vs xi
  double max_ks = 0.0;
  double ks_tolerance = 0.0;
  double bin_width = 0.0;
  double peak_density = 0.0;   ///< histogram peak of xi
  double density_bound = 0.0;  ///< sqrt(N / (2 pi))
  double peak_slack = 0.0;
  bool ks_ok = false;
  bool peak_ok = false;
  std::vector<std::pair<double, double>> histogram;  ///< (bin centre, density)
};

/// Standard-normal samples: xi should be independent of eta_1 and its
/// density should stay below sqrt(N / (2 pi)).
GaussCheckReport gaussian_independence_check(std::size_t n, std::uint64_t samples,
                                             std::size_t bins, double bin_width,
                                             SeedSpec seed, unsigned workers = 1,
                                             double ks_tolerance = 0.01,
                                             double peak_slack = 0.05);

struct FiberIdentityRow {
  std::size_t n = 0;
  double ell = 0.0;
  std::uint64_t samples = 0;
  double step = 0.0;
  double tolerance = 0.0;              ///< 2 step sqrt(N)
  double max_abs_diff = 0.0;           ///< closed form vs line scan
  double max_translation_diff = 0.0;   ///< length change under X + t(1,...,1)
  double min_lower_bound_slack = 0.0;  ///< min(length - sqrt(N) x_min)
  bool pass = false;
};

/// Uniform samples cycle through the (n, ell) grid; step = step_rel * ell.
std::vector<FiberIdentityRow> fiber_identity_check(std::span<const std::size_t> ns,
                                                   std::span<const double> ells,
                                                   std::uint64_t samples,
                                                   double step_rel, SeedSpec seed,
                                                   unsigned workers = 1);

}  // namespace condmean
