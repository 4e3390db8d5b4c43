#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/bounds.hpp"
#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/parallel.hpp"

namespace condmean {

Matrix::Matrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
  require(data_.size() == n * n, ErrorCode::invalid_argument,
          "matrix data must have n*n entries");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

double Matrix::off_diagonal_norm() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) sum += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(sum);
}

bool Matrix::is_symmetric(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tolerance) return false;
  return true;
}

EigenDecomposition jacobi_eigen(const Matrix& input, bool want_vectors) {
  const std::size_t n = input.size();
  const double norm = input.frobenius_norm();
  require(std::isfinite(norm), ErrorCode::domain, "matrix has non-finite entries");
  if (!input.is_symmetric(1e-12 * std::max(1.0, norm)))
    fail(ErrorCode::domain, "matrix is not symmetric");

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();

  EigenDecomposition result;
  const double target = 1e-12 * norm;
  constexpr int kMaxSweeps = 100;
  while (a.off_diagonal_norm() > target) {
    require(result.sweeps < kMaxSweeps, ErrorCode::domain,
            "Jacobi iteration did not converge");
    ++result.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          a(r, p) = a(p, r) = g - s * (h + g * tau);
          a(r, q) = a(q, r) = h + s * (g - h * tau);
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double g = v(r, p);
            const double h = v(r, q);
            v(r, p) = g - s * (h + g * tau);
            v(r, q) = h + s * (g - h * tau);
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  result.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) result.values[k] = a(order[k], order[k]);
  if (want_vectors) {
    result.vectors = Matrix(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t r = 0; r < n; ++r) result.vectors(r, k) = v(r, order[k]);
  }
  return result;
}

std::vector<double> eigenvalues_symmetric(const Matrix& a) {
  return jacobi_eigen(a, false).values;
}

OperatorInstance build_operator(const Graph& graph, std::span<const double> potential,
                                Kinetic kinetic) {
  const std::size_t n = graph.vertices();
  require(potential.size() == n, ErrorCode::invalid_argument,
          "potential size must equal the number of vertices");
  require(n <= kMaxOperatorVolume, ErrorCode::invalid_argument,
          "operator volume exceeds the dense-solver cap of 400");
  OperatorInstance op;
  op.potential.assign(potential.begin(), potential.end());
  op.hamiltonian = Matrix(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& nb = graph.neighbors(x);
    for (std::size_t y : nb)
      op.hamiltonian(x, y) = kinetic == Kinetic::adjacency ? 1.0 : -1.0;
    op.hamiltonian(x, x) = potential[x] +
        (kinetic == Kinetic::laplacian ? static_cast<double>(nb.size()) : 0.0);
  }
  op.xi = std::accumulate(potential.begin(), potential.end(), 0.0) /
          static_cast<double>(n);
  op.fluct_part = op.hamiltonian;
  for (std::size_t x = 0; x < n; ++x) op.fluct_part(x, x) -= op.xi;
  return op;
}

OperatorInstance build_operator(const Graph& graph, const DensitySpec& law,
                                SeedSpec seed, Kinetic kinetic) {
  Sampler sampler(law, seed);
  std::vector<double> potential(graph.vertices());
  sampler.fill(potential);
  return build_operator(graph, potential, kinetic);
}

SpectralCount count_in_interval(std::span<const double> eigs, double t, double s) {
  require(std::isfinite(t) && std::isfinite(s) && s >= 0.0,
          ErrorCode::invalid_argument, "interval needs finite t and s >= 0");
  const auto lo = std::lower_bound(eigs.begin(), eigs.end(), t);
  const auto hi = std::upper_bound(lo, eigs.end(), t + s);
  return {t, s, static_cast<std::size_t>(hi - lo)};
}

namespace {

struct EvcPartial {
  std::vector<std::uint64_t> hits;
  double modulus_sum = 0.0;
  double max_identity_error = 0.0;
};

}  // namespace

EvcReport evc_experiment(const Graph& graph, const DensitySpec& law,
                         std::span<const double> t_values, double s,
                         std::uint64_t trials, SeedSpec seed, Kinetic kinetic,
                         unsigned workers) {
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be positive");
  require(!t_values.empty(), ErrorCode::invalid_argument, "need at least one t");
  require(std::isfinite(s) && s >= 0.0, ErrorCode::invalid_argument, "s must be >= 0");
  const std::size_t n = graph.vertices();
  require(n >= 2, ErrorCode::invalid_argument, "graph needs at least two vertices");
  require(n <= kMaxOperatorVolume, ErrorCode::invalid_argument,
          "operator volume exceeds the dense-solver cap of 400");
  const UniformLaw* uniform = law.as_uniform();
  std::vector<double> offsets;
  if (uniform) offsets.assign(n, uniform->offset);

  auto partials = run_chunks<EvcPartial>(
      trials, workers, [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
        EvcPartial part;
        part.hits.assign(t_values.size(), 0);
        Sampler sampler(law, seed, chunk);
        std::vector<double> potential(n);
        for (std::uint64_t k = 0; k < count; ++k) {
          sampler.fill(potential);
          const OperatorInstance op = build_operator(graph, potential, kinetic);
          const std::vector<double> lambda = eigenvalues_symmetric(op.hamiltonian);
          const std::vector<double> mu = eigenvalues_symmetric(op.fluct_part);
          for (std::size_t j = 0; j < n; ++j)
            part.max_identity_error = std::max(
                part.max_identity_error, std::abs(lambda[j] - (op.xi + mu[j])));
          for (std::size_t i = 0; i < t_values.size(); ++i)
            if (count_in_interval(lambda, t_values[i], s).count >= 1) ++part.hits[i];
          if (uniform) {
            const FiberGeometry g = fiber_length_cube(potential, uniform->ell, offsets);
            part.modulus_sum += g.length > 0.0
                ? std::min(1.0, std::sqrt(static_cast<double>(n)) * s / g.length)
                : 1.0;
          }
        }
        return part;
      });

  EvcReport report;
  report.volume = n;
  report.s = s;
  report.trials = trials;
  std::vector<std::uint64_t> hits(t_values.size(), 0);
  double modulus_sum = 0.0;
  for (const auto& part : partials) {
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += part.hits[i];
    modulus_sum += part.modulus_sum;
    report.max_identity_error = std::max(report.max_identity_error, part.max_identity_error);
  }
  if (uniform) report.mean_modulus = modulus_sum / static_cast<double>(trials);

  for (std::size_t i = 0; i < t_values.size(); ++i) {
    EvcPoint p;
    p.t = t_values[i];
    p.tail = make_tail_estimate(hits[i], trials);
    if (const GaussianLaw* g = law.as_gaussian()) {
      p.wegner_bound = bound_wegner_gaussian(n, s / std::sqrt(g->variance)).value;
      p.holds = p.tail.p_hat <= *p.wegner_bound + kBoundSlackSigmas * p.tail.std_error;
    }
    if (uniform)
      p.evc_diagnostic = std::min(1.0, static_cast<double>(n) * report.mean_modulus);
    report.points.push_back(p);
  }
  return report;
}

}  // namespace condmean
