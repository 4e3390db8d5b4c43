#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace condmean {

namespace {

void check_sample(std::span<const double> x) {
  require(x.size() >= 2, ErrorCode::invalid_sample,
          "sample must have at least two values");
  for (double v : x)
    require(std::isfinite(v), ErrorCode::invalid_sample,
            "sample contains a non-finite value");
}

void check_box(std::span<const double> x, double ell,
               std::span<const double> offsets) {
  require(std::isfinite(ell) && ell > 0.0, ErrorCode::invalid_argument,
          "box side ell must be positive");
  require(offsets.empty() || offsets.size() == x.size(),
          ErrorCode::invalid_argument, "offsets must match the sample size");
}

double offset_at(std::span<const double> offsets, std::size_t i) {
  return offsets.empty() ? 0.0 : offsets[i];
}

}  // namespace

Decomposition decompose(std::span<const double> x) {
  check_sample(x);
  const std::size_t n = x.size();
  Decomposition d;
  d.xi = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  d.xi_tilde = std::sqrt(static_cast<double>(n)) * d.xi;
  d.eta.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.eta[i] = x[i] - d.xi;
  d.y.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d.y[i] = x[i] - x[n - 1];
  return d;
}

FiberGeometry fiber_length_cube(std::span<const double> x, double ell,
                                std::span<const double> offsets) {
  check_sample(x);
  check_box(x, ell, offsets);
  const double slack = 1e-12 * ell;
  FiberGeometry g;
  g.x_min = x[0] - offset_at(offsets, 0);
  g.x_max = g.x_min;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double shifted = x[i] - offset_at(offsets, i);
    if (shifted < -slack || shifted > ell + slack)
      fail(ErrorCode::out_of_support, "sample lies outside the support box");
    g.x_min = std::min(g.x_min, shifted);
    g.x_max = std::max(g.x_max, shifted);
  }
  g.range = g.x_max - g.x_min;
  g.length = std::sqrt(static_cast<double>(x.size())) *
             std::max(0.0, ell - g.range);
  return g;
}

double fiber_length_bruteforce(std::span<const double> x, double ell,
                               std::span<const double> offsets, double step) {
  check_sample(x);
  check_box(x, ell, offsets);
  require(std::isfinite(step) && step > 0.0, ErrorCode::invalid_argument,
          "step must be positive");
  // Validates support membership with the same slack as the closed form.
  fiber_length_cube(x, ell, offsets);

  const std::size_t n = x.size();
  const double per_step = step / std::sqrt(static_cast<double>(n));
  auto inside = [&](double shift) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[i] - offset_at(offsets, i) + shift;
      if (v < 0.0 || v > ell) return false;
    }
    return true;
  };
  auto march = [&](double direction) {
    long k = 0;
    while (inside(direction * static_cast<double>(k + 1) * per_step)) ++k;
    return static_cast<double>(k);
  };
  return (march(1.0) + march(-1.0)) * step;
}

}  // namespace condmean
