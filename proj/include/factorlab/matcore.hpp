#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace factorlab {

using Complex = std::complex<double>;

/// Dense complex matrix. Operators, vectors (d x 1) and unitaries all use it.
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

using Rng = std::mt19937_64;

inline constexpr std::size_t kDefaultCapacity = 4096;
inline constexpr std::uint64_t kDefaultSeed = 0xF0CC;

struct Tolerance {
  double rank_tol = 1e-9;     ///< relative singular/eigen value cut-off
  double eq_tol = 1e-9;       ///< absolute matrix-equality threshold
  double cluster_gap = 1e-8;  ///< eigenvalue clustering gap

  /// Throws ContractViolation unless every field lies in (0, 1).
  void validate() const;
  /// All three thresholds multiplied by `factor`, clamped below 1.
  Tolerance scaled(double factor) const;
};

bool all_finite(const MatrixC& a);

/// Largest singular value.
double op_norm(const MatrixC& a);

/// Kronecker product with the a-index major ordering.
/// Throws CapacityError if either result dimension exceeds `cap`.
MatrixC kron(const MatrixC& a, const MatrixC& b, std::size_t cap = kDefaultCapacity);
MatrixC kron_all(std::span<const MatrixC> factors, std::size_t cap = kDefaultCapacity);

struct EigenCluster {
  double value = 0.0;  ///< mean of the clustered eigenvalues
  MatrixC vectors;     ///< orthonormal columns spanning the eigenspace

  std::size_t multiplicity() const { return static_cast<std::size_t>(vectors.cols()); }
  MatrixC projector() const { return vectors * vectors.adjoint(); }
};

/// Eigendecomposition of a Hermitian matrix with eigenvalues clustered
/// greedily in ascending order: a new cluster starts whenever the gap to the
/// previous eigenvalue exceeds cluster_gap * (1 + |a|).
std::vector<EigenCluster> hermitian_eig(const MatrixC& a, const Tolerance& tol = {});

/// Orthonormal basis of ker(a); singular values at or below
/// rank_tol * sigma_max count as zero.
MatrixC nullspace_basis(const MatrixC& a, const Tolerance& tol = {});

/// As above with the cut-off rank_tol * max(sigma_max, scale_floor). Used when
/// the caller knows the natural scale of `a` and a tiny sigma_max is noise.
MatrixC nullspace_basis(const MatrixC& a, double rank_tol, double scale_floor);

/// Orthonormal basis of range(a), same cut-off rule as nullspace_basis.
MatrixC range_basis(const MatrixC& a, double rank_tol, double scale_floor = 0.0);

std::size_t numerical_rank(const MatrixC& a, double rank_tol);

enum class SvdVectors { thin, full_v };

struct SvdResult {
  Eigen::VectorXd values;  ///< descending
  MatrixC u;               ///< thin
  MatrixC v;               ///< thin or full
  bool used_fallback = false;
};

/// Divide-and-conquer SVD whose output is validated (finite, Frobenius
/// identity, reconstruction, orthonormal factors); recomputed with Jacobi
/// when the validation fails.
SvdResult checked_svd(const MatrixC& a, SvdVectors vectors = SvdVectors::thin);

enum class SubspaceMode { intersect, sum, complement_within };

/// Subspace algebra on orthonormal column sets of a common ambient space.
MatrixC subspace_ops(const MatrixC& u, const MatrixC& v, SubspaceMode mode,
                     const Tolerance& tol = {});

/// Orthogonal projector onto span of the orthonormal columns of u.
inline MatrixC projector(const MatrixC& u) { return u * u.adjoint(); }

/// Sine of the largest principal angle between span(u) and span(v), i.e.
/// |P_u - P_v|. Returns 1 when the dimensions differ.
double span_deviation(const MatrixC& u, const MatrixC& v);

/// Column-major vectorisation of a square matrix and its inverse.
VectorC vec(const MatrixC& a);
MatrixC unvec(const Eigen::Ref<const VectorC>& v, std::size_t d);

MatrixC identity(std::size_t d);

MatrixC random_gaussian(std::size_t rows, std::size_t cols, Rng& rng);
VectorC random_unit_vector(std::size_t d, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
MatrixC random_unitary(std::size_t d, Rng& rng);

}  // namespace factorlab
