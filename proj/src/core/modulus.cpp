#include "core/modulus.hpp"

#include <algorithm>
#include <numbers>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace condmean {

namespace {

void check_width(double s) {
  require(std::isfinite(s) && s >= 0.0, ErrorCode::invalid_argument,
          "interval width s must be finite and nonnegative");
}

const SmoothLaw& smooth_law_of(const DensitySpec& spec) {
  const SmoothLaw* law = spec.as_smooth();
  require(law != nullptr, ErrorCode::density_spec,
          "numeric modulus needs a smooth density");
  return *law;
}

}  // namespace

FiberModulus modulus_uniform_exact(const FiberGeometry& geom,
                                   const ModulusQuery& q, std::size_t n) {
  check_width(q.s);
  require(n >= 2, ErrorCode::invalid_sample, "n must be at least 2");
  if (!(geom.length > 0.0)) return {1.0, INFINITY};
  const double raw = std::sqrt(static_cast<double>(n)) * q.s / geom.length;
  return {std::min(raw, 1.0), raw};
}

GaussianModulus modulus_gaussian(std::size_t n, double s, double variance) {
  check_width(s);
  require(n >= 1, ErrorCode::invalid_argument, "n must be positive");
  require(std::isfinite(variance) && variance > 0.0,
          ErrorCode::invalid_argument, "variance must be positive");
  // xi ~ N(mu, sigma^2 / n); the best window is centred on mu.
  const double half = 0.5 * s * std::sqrt(static_cast<double>(n) / variance);
  GaussianModulus m;
  m.exact = normal_cdf(half) - normal_cdf(-half);
  m.linear_bound = std::sqrt(static_cast<double>(n) /
                             (2.0 * std::numbers::pi * variance)) * s;
  return m;
}

FiberDensity::FiberDensity(std::span<const double> x, const SmoothLaw& law,
                           std::size_t grid)
    : law_(&law) {
  require(grid >= 2, ErrorCode::invalid_argument, "grid must be >= 2");
  const FiberGeometry geom = fiber_length_cube(x, law.ell());
  coords_.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) coords_[j] = x[j] - geom.x_min;
  length_ = geom.length;
  inv_sqrt_n_ = 1.0 / std::sqrt(static_cast<double>(x.size()));
  if (!(length_ > 0.0)) return;

  const std::size_t intervals = grid + (grid % 2);
  h_ = length_ / static_cast<double>(intervals);
  nodes_.resize(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double value = unnormalized(static_cast<double>(k) * h_);
    if (value < 0.0) fail(ErrorCode::density_spec, "density is negative");
    nodes_[k] = value;
  }
  z_ = simpson_nodes(nodes_, h_);
  require(z_ > 0.0, ErrorCode::density_spec, "fiber density integrates to zero");
  for (double& v : nodes_) v /= z_;
  max_density_ = *std::max_element(nodes_.begin(), nodes_.end());

  cumulative_.resize(intervals / 2 + 1);
  cumulative_[0] = 0.0;
  for (std::size_t m = 0; m < intervals / 2; ++m) {
    cumulative_[m + 1] = cumulative_[m] + h_ / 3.0 *
        (nodes_[2 * m] + 4.0 * nodes_[2 * m + 1] + nodes_[2 * m + 2]);
  }
}

double FiberDensity::unnormalized(double u) const {
  const double shift = u * inv_sqrt_n_;
  const double ell = law_->ell();
  double product = 1.0;
  for (double c : coords_) product *= law_->rho(std::min(c + shift, ell));
  return product;
}

double FiberDensity::density(double u) const {
  if (!(length_ > 0.0) || u < 0.0 || u > length_) return 0.0;
  return unnormalized(u) / z_;
}

double FiberDensity::log_derivative(double u) const {
  const double shift = u * inv_sqrt_n_;
  double sum = 0.0;
  for (double c : coords_) {
    const double v = std::min(c + shift, law_->ell());
    sum += law_->rho_prime(v) / law_->rho(v);
  }
  return inv_sqrt_n_ * sum;
}

double FiberDensity::cdf(double u) const {
  if (!(length_ > 0.0)) return u >= 0.0 ? 1.0 : 0.0;
  if (u <= 0.0) return 0.0;
  if (u >= length_) return cumulative_.back();
  const std::size_t pairs = cumulative_.size() - 1;
  std::size_t m = static_cast<std::size_t>(u / (2.0 * h_));
  m = std::min(m, pairs - 1);
  // Exact integral of the Simpson parabola through nodes 2m, 2m+1, 2m+2
  // from its left end to offset tau = r h.
  const double r = (u - 2.0 * static_cast<double>(m) * h_) / h_;
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double w0 = 0.5 * (r3 / 3.0 - 1.5 * r2 + 2.0 * r);
  const double w1 = -(r3 / 3.0 - r2);
  const double w2 = 0.5 * (r3 / 3.0 - 0.5 * r2);
  return cumulative_[m] + h_ * (w0 * nodes_[2 * m] + w1 * nodes_[2 * m + 1] +
                                w2 * nodes_[2 * m + 2]);
}

double FiberDensity::normalization() const {
  if (!(length_ > 0.0)) return 1.0;
  return simpson_nodes(nodes_, h_);
}

double FiberDensity::window_sup(double width) const {
  if (!(length_ > 0.0) || width >= length_) return 1.0;
  if (width <= 0.0) return 0.0;
  const double step = width / 16.0;
  const double last = length_ - width;
  double best = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double a = std::min(static_cast<double>(k) * step, last);
    best = std::max(best, cdf(a + width) - cdf(a));
    if (a >= last) break;
  }
  return std::clamp(best, 0.0, 1.0);
}

FiberModulus modulus_smooth_numeric(std::span<const double> x,
                                    const DensitySpec& spec,
                                    const ModulusQuery& q, std::size_t grid) {
  check_width(q.s);
  require(grid >= kMinSmoothGrid, ErrorCode::invalid_argument,
          "smooth modulus grid must be >= 256");
  const SmoothLaw& law = smooth_law_of(spec);
  const FiberDensity fiber(x, law, grid);
  if (!(fiber.length() > 0.0)) return {1.0, INFINITY};
  const double width = std::sqrt(static_cast<double>(x.size())) * q.s;
  if (width >= fiber.length()) return {1.0, width * fiber.max_density()};
  const double sup = fiber.window_sup(width);
  return {sup, sup};
}

LogDerivativeCheck log_derivative_check(std::span<const double> x,
                                        const DensitySpec& spec, double u,
                                        double h, std::size_t grid) {
  const SmoothLaw& law = smooth_law_of(spec);
  require(std::isfinite(h) && h > 0.0, ErrorCode::invalid_argument,
          "finite-difference step must be positive");
  const FiberDensity fiber(x, law, grid);
  if (!(u - h >= 0.0 && u + h <= fiber.length()))
    fail(ErrorCode::domain, "log-derivative point must be interior to the fiber");

  LogDerivativeCheck c;
  c.density = fiber.density(u);
  c.fd_derivative = (fiber.density(u + h) - fiber.density(u - h)) / (2.0 * h);
  c.log_derivative = fiber.log_derivative(u);
  c.analytic_derivative = c.density * c.log_derivative;
  c.abs_diff = std::abs(c.fd_derivative - c.analytic_derivative);
  c.log_derivative_fd = c.fd_derivative / c.density;
  c.log_abs_diff = std::abs(c.log_derivative_fd - c.log_derivative);
  c.c1_bound = law.constants().c1 * std::sqrt(static_cast<double>(x.size()));
  c.within_c1_bound = std::abs(c.log_derivative) <= c.c1_bound * (1.0 + 1e-6);
  return c;
}

}  // namespace condmean
