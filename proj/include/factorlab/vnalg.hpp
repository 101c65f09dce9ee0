#pragma once

#include "factorlab/matcore.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace factorlab {

/// A unital *-subalgebra of B(C^d), stored as a Hilbert-Schmidt orthonormal
/// basis. The basis lives in a d^2 x k "frame" whose columns are the
/// column-major vectorised basis elements, so tr(A* B) is a plain dot product
/// and meets/joins reduce to subspace operations.
class AlgebraBasis {
 public:
  AlgebraBasis() = default;

  /// Wraps an orthonormal frame and certifies the algebra invariants
  /// (orthonormality, identity, adjoint and product closure).
  /// Throws ContractViolation when any of them fails.
  static AlgebraBasis from_frame(std::size_t d, MatrixC frame, const Tolerance& tol = {});
  /// Same, but orthonormalises an arbitrary spanning set first.
  static AlgebraBasis from_span(std::size_t d, std::span<const MatrixC> elements,
                                const Tolerance& tol = {});

  static AlgebraBasis scalars(std::size_t d);
  static AlgebraBasis full(std::size_t d);

  std::size_t ambient_dim() const { return d_; }
  std::size_t dim() const { return static_cast<std::size_t>(frame_.cols()); }
  const MatrixC& frame() const { return frame_; }

  MatrixC element(std::size_t i) const;
  std::vector<MatrixC> elements() const;

  /// Frobenius distance from `x` to the span.
  double membership_residual(const MatrixC& x) const;
  /// Orthogonal projection of `x` onto the span.
  MatrixC project(const MatrixC& x) const;

  /// U A U* for every element; U must be unitary of size d.
  AlgebraBasis conjugated(const MatrixC& u) const;

 private:
  AlgebraBasis(std::size_t d, MatrixC frame) : d_(d), frame_(std::move(frame)) {}

  std::size_t d_ = 0;
  MatrixC frame_;
};

/// Largest deviation between the spans of two algebras (sine of the largest
/// principal angle, 1 if dimensions differ).
double span_deviation(const AlgebraBasis& a, const AlgebraBasis& b);

/// Smallest *-algebra containing the identity and every generator.
AlgebraBasis generate_algebra(std::size_t d, std::span<const MatrixC> generators,
                              const Tolerance& tol = {});

AlgebraBasis commutant(const AlgebraBasis& x, const Tolerance& tol = {});
AlgebraBasis join_algebras(const AlgebraBasis& x, const AlgebraBasis& y, const Tolerance& tol = {});
AlgebraBasis meet_algebras(const AlgebraBasis& x, const AlgebraBasis& y, const Tolerance& tol = {});

struct TensorSplit {
  MatrixC unitary;  ///< C^g (x) C^g' -> ambient, column index i * g' + j
  std::size_t dim_g = 0;
  std::size_t dim_g_prime = 0;
};

struct FactorCertificate {
  bool is_factor = false;
  std::size_t center_dim = 0;
  std::optional<MatrixC> minimal_projection;
  std::optional<TensorSplit> split;
};

/// Center dimension via x meet x'; cross-checked against dim(x join x') = d^2.
FactorCertificate is_factor(const AlgebraBasis& x, const Tolerance& tol = {});

/// A non-zero projection P in x whose compression P x P is one-dimensional.
MatrixC minimal_projection(const AlgebraBasis& x, std::uint64_t seed = kDefaultSeed,
                           const Tolerance& tol = {});

/// Dimension of the compressed algebra {P A P} restricted to range(P).
std::size_t compressed_dim(const AlgebraBasis& x, const MatrixC& range, const Tolerance& tol = {});

/// U with U (A (x) 1) U* spanning x and U (1 (x) B) U* spanning x'.
FactorCertificate tensor_split(const AlgebraBasis& x, std::uint64_t seed = kDefaultSeed,
                               const Tolerance& tol = {});

/// Tensor coordinates for a family of mutually commuting factors that jointly
/// generate everything, anchored at a product vector omega.
///
/// Leg p gets the orthonormal basis legs[p] of span(F_p omega) with omega as
/// its first column; `unitary` maps e_{i_1} (x) ... (x) e_{i_m} to
/// X_{i_1} ... X_{i_m} omega, where X_i in F_p sends omega to legs[p].col(i).
/// Leg 0 is the most significant tensor index.
struct ProductFrame {
  MatrixC unitary;
  std::vector<MatrixC> legs;
  std::vector<std::size_t> leg_dims;
};

/// Builds and certifies a ProductFrame; throws InconsistencyError (law
/// "product-frame") when a certificate fails.
ProductFrame product_frame(std::span<const AlgebraBasis> factors, const VectorC& omega,
                           const Tolerance& tol = {});

/// Tr over every leg except `keep`, divided by the traced dimension.
MatrixC reduced_operator(const MatrixC& w, std::span<const std::size_t> dims, std::size_t keep);

/// 1 (x) ... (x) a (x) ... (x) 1 with `a` on leg `at`.
MatrixC embed_leg(const MatrixC& a, std::span<const std::size_t> dims, std::size_t at);

}  // namespace factorlab
