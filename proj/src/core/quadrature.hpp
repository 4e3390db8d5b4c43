#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace condmean {

struct QuadratureResult {
  double value = 0.0;
  std::size_t nodes = 0;
  bool converged = false;
};

/// Composite Simpson on 2^k + 1 uniform nodes, doubling k until two
/// successive refinements differ by less than `tolerance`.
QuadratureResult simpson(const std::function<double(double)>& f, double a,
                         double b, double tolerance = 1e-10,
                         int max_level = 22);

/// Composite Simpson over precomputed values at uniform spacing `h`.
/// Requires an odd number (>= 3) of nodes.
double simpson_nodes(std::span<const double> values, double h);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace condmean
