#pragma once

// Small helpers shared by the unit tests.

#include "factorlab/matcore.hpp"

#include <doctest.h>

#include <cstdint>
#include <random>

namespace factorlab::testing {

inline MatrixC pauli_x() {
  MatrixC m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline MatrixC pauli_z() {
  MatrixC m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline MatrixC basis_vector(std::size_t d, std::size_t i) {
  MatrixC v = MatrixC::Zero(d, 1);
  v(i, 0) = 1.0;
  return v;
}

// Matrix units E_ij of M_n, HS-normalised already.
inline MatrixC matrix_unit(std::size_t n, std::size_t i, std::size_t j) {
  MatrixC e = MatrixC::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Hermitian matrix with the given spectrum in a random basis.
inline MatrixC hermitian_with_spectrum(const Eigen::VectorXd& values, Rng& rng) {
  const MatrixC u = random_unitary(static_cast<std::size_t>(values.size()), rng);
  return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace factorlab::testing

#include <numeric>
#include <vector>

namespace factorlab::testing {

// Reshape of xi into rows indexed by the sites in `mask`, columns by the rest
// (site 0 most significant on both sides).
inline MatrixC fold_out(const VectorC& xi, const std::vector<std::size_t>& dims, std::uint32_t mask) {
  std::size_t rows = 1;
  std::size_t cols = 1;
  for (std::size_t p = 0; p < dims.size(); ++p) ((mask >> p) & 1u ? rows : cols) *= dims[p];
  MatrixC out = MatrixC::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const std::size_t total = rows * cols;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::vector<std::size_t> digit(dims.size());
    for (std::size_t p = dims.size(); p-- > 0;) {
      digit[p] = rem % dims[p];
      rem /= dims[p];
    }
    std::size_t r = 0;
    std::size_t c = 0;
    for (std::size_t p = 0; p < dims.size(); ++p) {
      if ((mask >> p) & 1u) {
        r = r * dims[p] + digit[p];
      } else {
        c = c * dims[p] + digit[p];
      }
    }
    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = xi(static_cast<Eigen::Index>(idx));
  }
  return out;
}

// Largest second Schmidt coefficient over all bipartitions, relative to |xi|.
inline double schmidt_defect(const VectorC& xi, const std::vector<std::size_t>& dims) {
  double worst = 0.0;
  const std::uint32_t full = (1u << dims.size()) - 1;
  for (std::uint32_t a = 1; a < full; ++a) {
    Eigen::JacobiSVD<MatrixC> svd(fold_out(xi, dims, a));
    const auto& s = svd.singularValues();
    if (s.size() > 1) worst = std::max(worst, s(1) / xi.norm());
  }
  return worst;
}

inline VectorC product_vector(const std::vector<VectorC>& legs) {
  MatrixC out = MatrixC::Ones(1, 1);
  for (const auto& l : legs) out = kron(out, l);
  return out.col(0);
}

}  // namespace factorlab::testing
