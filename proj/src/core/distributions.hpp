#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace condmean {

struct UniformLaw {
  double ell = 1.0;
  double offset = 0.0;
};

struct GaussianLaw {
  double mean = 0.0;
  double variance = 1.0;
};

/// Proof constants of the smooth-density tail theorem:
/// c1 = C'_rho / rho_min, ell_star = 1 / c1, c_star = ell_star / 2.
/// A constant density has c1 = 0 and infinite ell_star, c_star.
struct SmoothConstants {
  double c1 = 0.0;
  double ell_star = 0.0;
  double c_star = 0.0;
};

/// A density on [0, ell], bounded below and above, with bounded derivative.
/// The bounds are declared, not estimated; the constructor verifies them on
/// a 10^4-point grid and checks that the density integrates to one within
/// 1e-8.
class SmoothLaw {
 public:
  using Function = std::function<double(double)>;

  SmoothLaw(std::string name, double ell, Function rho, Function rho_prime,
            double rho_min, double rho_max, double c_rho_prime);

  const std::string& name() const { return name_; }
  double ell() const { return ell_; }
  double rho(double t) const { return (*rho_)(t); }
  double rho_prime(double t) const { return (*rho_prime_)(t); }
  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }
  double c_rho_prime() const { return c_rho_prime_; }
  SmoothConstants constants() const;

  /// Mass of [0, t] by adaptive Simpson.
  double cdf(double t) const;

 private:
  std::string name_;
  double ell_;
  std::shared_ptr<const Function> rho_;
  std::shared_ptr<const Function> rho_prime_;
  double rho_min_;
  double rho_max_;
  double c_rho_prime_;
};

enum class LawKind { uniform, gaussian, smooth };

/// Marginal law of the IID sample.
class DensitySpec {
 public:
  /// Uniform[0, 1].
  DensitySpec() : law_(UniformLaw{}) {}

  static DensitySpec uniform(double ell, double offset = 0.0);
  static DensitySpec gaussian(double mean = 0.0, double variance = 1.0);
  static DensitySpec smooth(SmoothLaw law);

  /// Built-in smooth families on [0, ell]:
  ///   "cosine-bump"  rho(t) = (1 + b cos(2 pi t / ell)) / ell, b in [0, 1)
  ///   "linear-tilt"  rho(t) = (1 + b (2 t / ell - 1)) / ell,   b in [0, 1)
  static DensitySpec from_registry(const std::string& name, double parameter,
                                   double ell = 1.0);

  LawKind kind() const;
  const UniformLaw* as_uniform() const { return std::get_if<UniformLaw>(&law_); }
  const GaussianLaw* as_gaussian() const { return std::get_if<GaussianLaw>(&law_); }
  const SmoothLaw* as_smooth() const { return std::get_if<SmoothLaw>(&law_); }

  /// sup of the density.
  double rho_max() const;
  /// Probability mass of [a, b].
  double mass(double a, double b) const;
  bool bounded_support() const { return kind() != LawKind::gaussian; }
  double support_lo() const;
  double support_hi() const;

 private:
  using Law = std::variant<UniformLaw, GaussianLaw, SmoothLaw>;
  explicit DensitySpec(Law law) : law_(std::move(law)) {}
  Law law_;
};

/// Per-stream sampler. Holds a reference to `spec`, which must outlive it.
class Sampler {
 public:
  Sampler(const DensitySpec& spec, SeedSpec seed, std::uint64_t substream = 0);

  double draw();
  void fill(std::span<double> out);

  /// Draw from the law restricted to [a, b] (which must carry positive mass).
  double draw_restricted(double a, double b);

  Stream& stream() { return stream_; }

 private:
  double draw_smooth(const SmoothLaw& law, double lo, double hi);

  const DensitySpec* spec_;
  Stream stream_;
};

inline constexpr std::uint64_t kMaxProposalsPerDraw = 1'000'000;

Sample sample_iid(const DensitySpec& spec, std::size_t n, SeedSpec seed);

/// P(W <= w) for the range W of n IID Uniform[0, ell] variables.
double uniform_range_cdf(std::size_t n, double ell, double w);

/// Exact P(|fiber| < r) = P(W > ell - r / sqrt(n)) for uniform marginals.
double fiber_length_tail_exact_uniform(std::size_t n, double ell, double r);

/// sup of the density of the mean of n IID N(0, 1): sqrt(n / (2 pi)).
double gaussian_mean_density_bound(std::size_t n);

}  // namespace condmean
