#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core/distributions.hpp"
#include "core/geometry.hpp"

namespace condmean {

struct ModulusQuery {
  double s = 0.0;      ///< interval width for the mean xi
  bool clamp = true;   ///< value() reports min(raw, 1) when set
};

/// Conditional continuity modulus on one fiber.
/// `nu` is always min(raw, 1); `raw` is +inf for a zero-length fiber (point
/// mass).
struct FiberModulus {
  double nu = 1.0;
  double raw = INFINITY;

  bool point_mass() const { return std::isinf(raw); }
  double value(bool clamp) const { return clamp ? nu : raw; }
};

/// Uniform marginals: the conditional law on the fiber is uniform, so
/// raw = sqrt(N) s / |fiber|.
FiberModulus modulus_uniform_exact(const FiberGeometry& geom,
                                   const ModulusQuery& q, std::size_t n);

struct GaussianModulus {
  double exact = 0.0;         ///< sup_t P(xi in [t, t+s])
  double linear_bound = 0.0;  ///< sqrt(N) s / sqrt(2 pi sigma^2)
};

/// Gaussian marginals N(mu, sigma^2): xi is independent of the fluctuations,
/// so the modulus is deterministic.
GaussianModulus modulus_gaussian(std::size_t n, double s, double variance = 1.0);

/// Conditional density of xi_tilde along the fiber through a sample, for a
/// smooth law on [0, ell]. The fiber parameter u runs over [0, length] from
/// the end where the smallest coordinate touches 0; coordinates are
/// X_j(u) = X_j - min X + u / sqrt(N).
///
/// The unnormalized density prod_j rho(X_j(u)) is tabulated on `grid`
/// (rounded up to even) uniform intervals and normalized by composite
/// Simpson. cdf() integrates the Simpson parabolas exactly, so cdf(length)
/// is 1 up to rounding.
class FiberDensity {
 public:
  FiberDensity(std::span<const double> x, const SmoothLaw& law, std::size_t grid);

  double length() const { return length_; }
  std::size_t n() const { return coords_.size(); }

  /// Normalized density evaluated directly from rho (not interpolated).
  double density(double u) const;
  /// N^{-1/2} sum_j rho'(X_j(u)) / rho(X_j(u)), the log-derivative of p.
  double log_derivative(double u) const;

  double cdf(double u) const;
  /// Composite Simpson of the normalized node values.
  double normalization() const;
  double max_density() const { return max_density_; }

  /// sup over windows [a, a + width] inside the fiber of the conditional
  /// mass; windows step by width / 16 with the end-aligned window included.
  /// This underestimates the exact sup by at most max_density * width / 16.
  double window_sup(double width) const;

 private:
  double unnormalized(double u) const;

  const SmoothLaw* law_;
  std::vector<double> coords_;  // X_j - min X
  double length_ = 0.0;
  double inv_sqrt_n_ = 0.0;
  double h_ = 0.0;
  double z_ = 1.0;
  double max_density_ = 0.0;
  std::vector<double> nodes_;       // normalized p at grid nodes
  std::vector<double> cumulative_;  // cdf at even nodes
};

inline constexpr std::size_t kMinSmoothGrid = 256;

/// Numeric modulus for a smooth law. For windows shorter than the fiber,
/// raw = nu = window_sup. When the window covers the whole fiber, nu = 1
/// and raw = window * max density (>= 1), which equals sqrt(N) s / |fiber|
/// for a constant density.
FiberModulus modulus_smooth_numeric(std::span<const double> x,
                                    const DensitySpec& spec,
                                    const ModulusQuery& q,
                                    std::size_t grid = kMinSmoothGrid);

struct LogDerivativeCheck {
  double density = 0.0;
  double fd_derivative = 0.0;        ///< central difference of p
  double analytic_derivative = 0.0;  ///< N^{-1/2} p sum rho'/rho
  double abs_diff = 0.0;
  double log_derivative_fd = 0.0;    ///< fd_derivative / p
  double log_derivative = 0.0;       ///< analytic_derivative / p
  double log_abs_diff = 0.0;
  double c1_bound = 0.0;             ///< C_1 sqrt(N)
  bool within_c1_bound = false;      ///< |p'/p| <= C_1 sqrt(N) (1 + 1e-6)
};

/// Compares the two derivative computations at fiber offset u, which must
/// satisfy h <= u <= length - h.
LogDerivativeCheck log_derivative_check(std::span<const double> x,
                                        const DensitySpec& spec, double u,
                                        double h = 1e-5,
                                        std::size_t grid = 4096);

}  // namespace condmean
