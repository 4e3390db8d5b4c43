#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "core/error.hpp"
#include "core/quadrature.hpp"

using namespace condmean;

TEST_CASE("refined Simpson integrates smooth functions") {
  const auto r = simpson([](double t) { return std::sin(t); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
  CHECK((r.nodes - 1) % 2 == 0);

  const auto c = simpson([](double t) { return t * t * t; }, 0.0, 1.0);
  CHECK(c.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(simpson([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("nodal Simpson is exact for cubics") {
  std::vector<double> v;
  const double h = 0.25;
  for (int i = 0; i <= 8; ++i) {
    const double t = i * h;
    v.push_back(t * t * t - t);
  }
  CHECK(simpson_nodes(v, h) == doctest::Approx(4.0 - 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(simpson_nodes(std::vector<double>{1.0, 2.0}, h), Error);
}

TEST_CASE("normal CDF matches tabulated values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(2.0) - normal_cdf(-2.0) == doctest::Approx(0.9544997361036416).epsilon(1e-12));
}
