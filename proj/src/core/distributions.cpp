#include "core/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace condmean {

namespace {

constexpr std::size_t kValidationGrid = 10'000;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

SmoothLaw::SmoothLaw(std::string name, double ell, Function rho,
                     Function rho_prime, double rho_min, double rho_max,
                     double c_rho_prime)
    : name_(std::move(name)),
      ell_(ell),
      rho_(std::make_shared<const Function>(std::move(rho))),
      rho_prime_(std::make_shared<const Function>(std::move(rho_prime))),
      rho_min_(rho_min),
      rho_max_(rho_max),
      c_rho_prime_(c_rho_prime) {
  require(positive_finite(ell), ErrorCode::density_spec, "ell must be positive");
  require(*rho_ && *rho_prime_, ErrorCode::density_spec,
          "density and derivative must be callable");
  require(positive_finite(rho_min) && positive_finite(rho_max) &&
              rho_min <= rho_max,
          ErrorCode::density_spec, "need 0 < rho_min <= rho_max");
  require(std::isfinite(c_rho_prime) && c_rho_prime >= 0.0,
          ErrorCode::density_spec, "C'_rho must be nonnegative");

  const double tol = 1e-12 * std::max(1.0, rho_max);
  for (std::size_t k = 0; k <= kValidationGrid; ++k) {
    const double t = ell * static_cast<double>(k) / kValidationGrid;
    const double value = (*rho_)(t);
    if (!(value >= rho_min - tol && value <= rho_max + tol))
      fail(ErrorCode::density_spec,
           "density violates declared bounds at t = " + std::to_string(t));
    if (k > 0 && k < kValidationGrid) {
      const double slope = (*rho_prime_)(t);
      if (!(std::abs(slope) <= c_rho_prime + tol * std::max(1.0, c_rho_prime)))
        fail(ErrorCode::density_spec,
             "derivative exceeds declared bound at t = " + std::to_string(t));
    }
  }
  const auto total = simpson(*rho_, 0.0, ell);
  if (!(std::abs(total.value - 1.0) <= 1e-8))
    fail(ErrorCode::density_spec, "density does not integrate to 1 (got " +
                                      std::to_string(total.value) + ")");
}

SmoothConstants SmoothLaw::constants() const {
  SmoothConstants c;
  c.c1 = c_rho_prime_ / rho_min_;
  c.ell_star = c.c1 > 0.0 ? 1.0 / c.c1 : INFINITY;
  c.c_star = c.ell_star / 2.0;
  return c;
}

double SmoothLaw::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= ell_) return 1.0;
  return simpson(*rho_, 0.0, t, 1e-12).value;
}

DensitySpec DensitySpec::uniform(double ell, double offset) {
  require(positive_finite(ell), ErrorCode::density_spec, "uniform: ell must be positive");
  require(std::isfinite(offset), ErrorCode::density_spec, "uniform: offset must be finite");
  return DensitySpec(UniformLaw{ell, offset});
}

DensitySpec DensitySpec::gaussian(double mean, double variance) {
  require(std::isfinite(mean), ErrorCode::density_spec, "gaussian: mean must be finite");
  require(positive_finite(variance), ErrorCode::density_spec,
          "gaussian: variance must be positive");
  return DensitySpec(GaussianLaw{mean, variance});
}

DensitySpec DensitySpec::smooth(SmoothLaw law) { return DensitySpec(std::move(law)); }

DensitySpec DensitySpec::from_registry(const std::string& name, double b,
                                       double ell) {
  require(positive_finite(ell), ErrorCode::density_spec, "ell must be positive");
  require(std::isfinite(b) && b >= 0.0 && b < 1.0, ErrorCode::density_spec,
          "registry density parameter must lie in [0, 1)");
  using std::numbers::pi;
  if (name == "cosine-bump") {
    const double omega = 2.0 * pi / ell;
    return smooth(SmoothLaw(
        name, ell, [=](double t) { return (1.0 + b * std::cos(omega * t)) / ell; },
        [=](double t) { return -b * omega * std::sin(omega * t) / ell; },
        (1.0 - b) / ell, (1.0 + b) / ell, b * omega / ell));
  }
  if (name == "linear-tilt") {
    return smooth(SmoothLaw(
        name, ell, [=](double t) { return (1.0 + b * (2.0 * t / ell - 1.0)) / ell; },
        [=](double) { return 2.0 * b / (ell * ell); }, (1.0 - b) / ell,
        (1.0 + b) / ell, 2.0 * b / (ell * ell)));
  }
  fail(ErrorCode::density_spec, "unknown registry density '" + name + "'");
}

LawKind DensitySpec::kind() const {
  switch (law_.index()) {
    case 0: return LawKind::uniform;
    case 1: return LawKind::gaussian;
    default: return LawKind::smooth;
  }
}

double DensitySpec::rho_max() const {
  if (auto u = as_uniform()) return 1.0 / u->ell;
  if (auto g = as_gaussian()) return 1.0 / std::sqrt(2.0 * std::numbers::pi * g->variance);
  return as_smooth()->rho_max();
}

double DensitySpec::support_lo() const {
  if (auto u = as_uniform()) return u->offset;
  if (as_gaussian()) return -INFINITY;
  return 0.0;
}

double DensitySpec::support_hi() const {
  if (auto u = as_uniform()) return u->offset + u->ell;
  if (as_gaussian()) return INFINITY;
  return as_smooth()->ell();
}

double DensitySpec::mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  if (auto g = as_gaussian()) {
    const double sd = std::sqrt(g->variance);
    return normal_cdf((b - g->mean) / sd) - normal_cdf((a - g->mean) / sd);
  }
  const double lo = std::max(a, support_lo());
  const double hi = std::min(b, support_hi());
  if (!(hi > lo)) return 0.0;
  if (auto u = as_uniform()) return (hi - lo) / u->ell;
  const SmoothLaw& s = *as_smooth();
  return std::clamp(s.cdf(hi) - s.cdf(lo), 0.0, 1.0);
}

Sampler::Sampler(const DensitySpec& spec, SeedSpec seed, std::uint64_t substream)
    : spec_(&spec), stream_(seed, substream) {}

double Sampler::draw_smooth(const SmoothLaw& law, double lo, double hi) {
  const double envelope = law.rho_max();
  for (std::uint64_t k = 0; k < kMaxProposalsPerDraw; ++k) {
    const double t = lo + (hi - lo) * stream_.uniform();
    const double value = law.rho(t);
    if (value < 0.0) fail(ErrorCode::density_spec, "density is negative");
    if (stream_.uniform() * envelope <= value) return t;
  }
  fail(ErrorCode::density_spec,
       "rejection sampling exhausted its proposal budget; check rho_max");
}

double Sampler::draw() {
  if (auto u = spec_->as_uniform()) return u->offset + u->ell * stream_.uniform();
  if (auto g = spec_->as_gaussian()) return g->mean + std::sqrt(g->variance) * stream_.normal();
  const SmoothLaw& s = *spec_->as_smooth();
  return draw_smooth(s, 0.0, s.ell());
}

void Sampler::fill(std::span<double> out) {
  for (double& v : out) v = draw();
}

double Sampler::draw_restricted(double a, double b) {
  const double lo = std::max(a, spec_->support_lo());
  const double hi = std::min(b, spec_->support_hi());
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
          ErrorCode::invalid_argument,
          "restricted draw needs a bounded interval meeting the support");
  if (spec_->as_uniform()) return lo + (hi - lo) * stream_.uniform();
  if (auto s = spec_->as_smooth()) return draw_smooth(*s, lo, hi);
  // Gaussian restricted to a bounded interval: rejection from uniform with
  // the density's sup on [lo, hi] as envelope.
  const GaussianLaw& g = *spec_->as_gaussian();
  const double sd = std::sqrt(g.variance);
  auto weight = [&](double t) { return std::exp(-0.5 * std::pow((t - g.mean) / sd, 2)); };
  const double peak = weight(std::clamp(g.mean, lo, hi));
  for (std::uint64_t k = 0; k < kMaxProposalsPerDraw; ++k) {
    const double t = lo + (hi - lo) * stream_.uniform();
    if (stream_.uniform() * peak <= weight(t)) return t;
  }
  fail(ErrorCode::density_spec, "restricted gaussian draw exhausted its budget");
}

Sample sample_iid(const DensitySpec& spec, std::size_t n, SeedSpec seed) {
  require(n >= 1, ErrorCode::invalid_argument, "sample size must be positive");
  Sampler sampler(spec, seed);
  std::vector<double> values(n);
  sampler.fill(values);
  return Sample(std::move(values));
}

double uniform_range_cdf(std::size_t n, double ell, double w) {
  require(n >= 2, ErrorCode::invalid_argument, "range CDF needs n >= 2");
  require(positive_finite(ell), ErrorCode::invalid_argument, "ell must be positive");
  const double x = std::clamp(w / ell, 0.0, 1.0);
  const double nn = static_cast<double>(n);
  return nn * std::pow(x, nn - 1.0) - (nn - 1.0) * std::pow(x, nn);
}

double fiber_length_tail_exact_uniform(std::size_t n, double ell, double r) {
  require(n >= 2, ErrorCode::invalid_argument, "fiber tail needs n >= 2");
  require(positive_finite(ell), ErrorCode::invalid_argument, "ell must be positive");
  require(std::isfinite(r) && r >= 0.0, ErrorCode::invalid_argument, "r must be >= 0");
  const double nn = static_cast<double>(n);
  // 1 - CDF(ell - r / sqrt(n)) written as 1 - (1-x)^(n-1) (1 + (n-1) x),
  // x = r / (sqrt(n) ell), which keeps small tails accurate.
  const double x = std::clamp(r / (std::sqrt(nn) * ell), 0.0, 1.0);
  const double tail =
      -std::expm1((nn - 1.0) * std::log1p(-x) + std::log1p((nn - 1.0) * x));
  return x >= 1.0 ? 1.0 : std::clamp(tail, 0.0, 1.0);
}

double gaussian_mean_density_bound(std::size_t n) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be positive");
  return std::sqrt(static_cast<double>(n) / (2.0 * std::numbers::pi));
}

}  // namespace condmean
