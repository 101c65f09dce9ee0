#pragma once

// Data-parallel inner loops. The default entry points run under OpenMP; the
// `reference` namespace holds the plain serial versions that the tests and the
// benchmark compare against. Results agree with the reference up to rounding;
// partition_product multiplies fixed chunks so its value does not depend on the
// thread count.

#include "factorlab/matcore.hpp"

#include <span>

namespace factorlab::kernels {

/// Column g * frame.cols() + j holds vec(gens[g] * unvec(frame.col(j))).
MatrixC left_products(std::span<const MatrixC> gens, const MatrixC& frame, std::size_t d);

/// Column j holds vec(Y b - b Y) with Y = unvec(n.col(j)).
MatrixC commutator_columns(const MatrixC& b, const MatrixC& n, std::size_t d);

/// max over pairs of the Frobenius norm of (X Y - Y X) q.
double max_commutator_on_subspace(std::span<const MatrixC> xs, std::span<const MatrixC> ys,
                                  const MatrixC& q);

/// prod_k (1 + masses[k]).
Complex partition_product(std::span<const Complex> masses);

namespace reference {
MatrixC left_products(std::span<const MatrixC> gens, const MatrixC& frame, std::size_t d);
MatrixC commutator_columns(const MatrixC& b, const MatrixC& n, std::size_t d);
double max_commutator_on_subspace(std::span<const MatrixC> xs, std::span<const MatrixC> ys,
                                  const MatrixC& q);
Complex partition_product(std::span<const Complex> masses);
}  // namespace reference

}  // namespace factorlab::kernels
