#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "core/distributions.hpp"
#include "core/graph.hpp"
#include "core/montecarlo_types.hpp"
#include "core/rng.hpp"

namespace condmean {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  Matrix(std::size_t n, std::vector<double> row_major);

  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

  double frobenius_norm() const;
  double off_diagonal_norm() const;
  bool is_symmetric(double tolerance) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< column k is the eigenvector of values[k]; empty unless requested
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// 1e-12 * ||A||_F. Input must be symmetric within 1e-12 * max(1, ||A||_F).
EigenDecomposition jacobi_eigen(const Matrix& a, bool want_vectors = false);
std::vector<double> eigenvalues_symmetric(const Matrix& a);

enum class Kinetic { adjacency, laplacian };

/// H = K + diag(V), with K the adjacency matrix (unit hopping) or the graph
/// Laplacian D - A. `fluct_part` is A(omega) = H - xi * Identity.
struct OperatorInstance {
  std::vector<double> potential;
  Matrix hamiltonian;
  double xi = 0.0;
  Matrix fluct_part;
};

OperatorInstance build_operator(const Graph& graph, std::span<const double> potential,
                                Kinetic kinetic = Kinetic::adjacency);
OperatorInstance build_operator(const Graph& graph, const DensitySpec& law,
                                SeedSpec seed, Kinetic kinetic = Kinetic::adjacency);

struct SpectralCount {
  double t = 0.0;
  double s = 0.0;
  std::size_t count = 0;  ///< eigenvalues in the closed interval [t, t + s]
};

SpectralCount count_in_interval(std::span<const double> sorted_eigs, double t, double s);

struct EvcPoint {
  double t = 0.0;
  TailEstimate tail;                       ///< P(tr P_I >= 1)
  std::optional<double> wegner_bound;      ///< Gaussian law: |L|^{3/2}|I| / sqrt(2 pi sigma^2)
  std::optional<double> evc_diagnostic;    ///< uniform law: min(1, |L| E[min(1, sqrt(N) s / |fiber|)])
  bool holds = true;                       ///< p_hat <= wegner_bound + 4 stderr (Gaussian only)
};

struct EvcReport {
  std::size_t volume = 0;
  double s = 0.0;
  std::uint64_t trials = 0;
  std::vector<EvcPoint> points;
  double max_identity_error = 0.0;  ///< max |lambda_j(H) - (xi + mu_j(A))|
  double mean_modulus = 0.0;        ///< uniform law: E[min(1, sqrt(N) s / |fiber|)]
};

/// Eigenvalue-concentration experiment. Every trial draws one potential,
/// diagonalizes H and A separately, checks lambda = xi + mu, and counts
/// eigenvalues in [t, t + s] for each t (the realizations are shared across
/// the t sweep).
EvcReport evc_experiment(const Graph& graph, const DensitySpec& law,
                         std::span<const double> t_values, double s,
                         std::uint64_t trials, SeedSpec seed,
                         Kinetic kinetic = Kinetic::adjacency,
                         unsigned workers = 1);

inline constexpr std::size_t kMaxOperatorVolume = 400;

}  // namespace condmean
