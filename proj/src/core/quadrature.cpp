#include "core/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace condmean {

QuadratureResult simpson(const std::function<double(double)>& f, double a,
                         double b, double tolerance, int max_level) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b,
          ErrorCode::invalid_argument, "simpson: invalid interval");
  if (a == b) return {0.0, 1, true};

  // Trapezoid sums T_k on 2^k intervals; S_k = (4 T_k - T_{k-1}) / 3.
  double intervals = 1.0;
  double h = b - a;
  double trap = 0.5 * h * (f(a) + f(b));
  double previous = 0.0;
  QuadratureResult result;
  for (int level = 1; level <= max_level; ++level) {
    double midpoints = 0.0;
    for (long i = 0; i < static_cast<long>(intervals); ++i)
      midpoints += f(a + (static_cast<double>(i) + 0.5) * h);
    const double refined = 0.5 * trap + 0.5 * h * midpoints;
    const double current = (4.0 * refined - trap) / 3.0;
    trap = refined;
    intervals *= 2.0;
    h *= 0.5;
    result.value = current;
    result.nodes = static_cast<std::size_t>(intervals) + 1;
    if (level >= 4 && std::abs(current - previous) < tolerance) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
  return result;
}

double simpson_nodes(std::span<const double> values, double h) {
  require(values.size() >= 3 && values.size() % 2 == 1,
          ErrorCode::invalid_argument,
          "simpson_nodes: need an odd number of nodes >= 3");
  double odd = 0.0;
  double even = 0.0;
  const std::size_t last = values.size() - 1;
  for (std::size_t i = 1; i < last; ++i) (i % 2 ? odd : even) += values[i];
  return h / 3.0 * (values.front() + values[last] + 4.0 * odd + 2.0 * even);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace condmean
