#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace condmean {

/// A point X in R^N of IID draws.
class Sample {
 public:
  Sample() = default;
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {}

  std::span<const double> values() const { return values_; }
  std::size_t n() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Mean / fluctuation split of a sample along the direction (1, ..., 1).
struct Decomposition {
  double xi = 0.0;        ///< sample mean
  double xi_tilde = 0.0;  ///< sqrt(N) * xi, the Euclidean coordinate along (1,...,1)
  std::vector<double> eta;  ///< X_i - xi
  std::vector<double> y;    ///< X_i - X_N, i < N (fiber label)
};

/// The fiber through a sample: the segment of the line X + t (1,...,1)
/// inside the support box. `length` is measured in the normalized parameter
/// xi_tilde; the corresponding range of the mean xi is length / sqrt(N).
/// Extremal coordinates are reported after subtracting the box offsets.
struct FiberGeometry {
  double length = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double range = 0.0;
};

Decomposition decompose(std::span<const double> x);
inline Decomposition decompose(const Sample& s) { return decompose(s.values()); }

/// Exact fiber length inside the box prod_i [a_i, a_i + ell]; `offsets` may
/// be empty (all a_i = 0). Boundary points are in the box; coordinates
/// outside it by more than 1e-12 * ell raise out_of_support.
FiberGeometry fiber_length_cube(std::span<const double> x, double ell,
                                std::span<const double> offsets = {});
inline FiberGeometry fiber_length_cube(const Sample& s, double ell,
                                       std::span<const double> offsets = {}) {
  return fiber_length_cube(s.values(), ell, offsets);
}

/// Line-scan measurement of the same length: marches t in steps of `step`
/// along (1,...,1)/sqrt(N) from X in both directions and counts the steps
/// that stay inside the box. Agrees with fiber_length_cube within 2 * step.
double fiber_length_bruteforce(std::span<const double> x, double ell,
                               std::span<const double> offsets, double step);

}  // namespace condmean
