#include "factorlab/kernels.hpp"

#include "factorlab/error.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace factorlab::kernels {

namespace {

constexpr std::size_t kProductChunks = 64;

void check_square(const MatrixC& m, std::size_t d, const char* who) {
  if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d) {
    throw ContractViolation(std::string(who) + ": operator size mismatch");
  }
}

Complex chunk_product(std::span<const Complex> masses, std::size_t lo, std::size_t hi) {
  Complex acc(1.0, 0.0);
  for (std::size_t k = lo; k < hi; ++k) acc *= Complex(1.0, 0.0) + masses[k];
  return acc;
}

}  // namespace

MatrixC left_products(std::span<const MatrixC> gens, const MatrixC& frame, std::size_t d) {
  for (const auto& g : gens) check_square(g, d, "left_products");
  const auto nb = static_cast<std::size_t>(frame.cols());
  const auto total = static_cast<std::int64_t>(gens.size() * nb);
  MatrixC out(d * d, total);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto g = static_cast<std::size_t>(k) / nb;
    const auto j = static_cast<std::size_t>(k) % nb;
    const Eigen::Map<const MatrixC> b(frame.col(j).data(), d, d);
    Eigen::Map<MatrixC> dst(out.col(k).data(), d, d);
    dst.noalias() = gens[g] * b;
  }
  return out;
}

MatrixC commutator_columns(const MatrixC& b, const MatrixC& n, std::size_t d) {
  check_square(b, d, "commutator_columns");
  const auto cols = static_cast<std::int64_t>(n.cols());
  MatrixC out(d * d, cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    const Eigen::Map<const MatrixC> y(n.col(j).data(), d, d);
    Eigen::Map<MatrixC> dst(out.col(j).data(), d, d);
    dst.noalias() = y * b;
    dst.noalias() -= b * y;
  }
  return out;
}

double max_commutator_on_subspace(std::span<const MatrixC> xs, std::span<const MatrixC> ys,
                                  const MatrixC& q) {
  const auto total = static_cast<std::int64_t>(xs.size() * ys.size());
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto& x = xs[static_cast<std::size_t>(k) / ys.size()];
    const auto& y = ys[static_cast<std::size_t>(k) % ys.size()];
    const MatrixC yq = y * q;
    const MatrixC xq = x * q;
    const double dev = (x * yq - y * xq).norm();
    worst = std::max(worst, dev);
  }
  return worst;
}

Complex partition_product(std::span<const Complex> masses) {
  const std::size_t n = masses.size();
  const std::size_t step = (n + kProductChunks - 1) / kProductChunks;
  std::vector<Complex> partial(kProductChunks, Complex(1.0, 0.0));
  if (step > 0) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(kProductChunks); ++c) {
      const std::size_t lo = std::min(n, static_cast<std::size_t>(c) * step);
      const std::size_t hi = std::min(n, lo + step);
      partial[static_cast<std::size_t>(c)] = chunk_product(masses, lo, hi);
    }
  }
  Complex acc(1.0, 0.0);
  for (const auto& p : partial) acc *= p;
  return acc;
}

namespace reference {

MatrixC left_products(std::span<const MatrixC> gens, const MatrixC& frame, std::size_t d) {
  for (const auto& g : gens) check_square(g, d, "left_products");
  const auto nb = static_cast<std::size_t>(frame.cols());
  MatrixC out(d * d, gens.size() * nb);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    for (std::size_t j = 0; j < nb; ++j) {
      const MatrixC b = unvec(frame.col(j), d);
      out.col(g * nb + j) = vec(gens[g] * b);
    }
  }
  return out;
}

MatrixC commutator_columns(const MatrixC& b, const MatrixC& n, std::size_t d) {
  check_square(b, d, "commutator_columns");
  MatrixC out(d * d, n.cols());
  for (Eigen::Index j = 0; j < n.cols(); ++j) {
    const MatrixC y = unvec(n.col(j), d);
    out.col(j) = vec(y * b - b * y);
  }
  return out;
}

double max_commutator_on_subspace(std::span<const MatrixC> xs, std::span<const MatrixC> ys,
                                  const MatrixC& q) {
  double worst = 0.0;
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      const MatrixC yq = y * q;
      const MatrixC xq = x * q;
      worst = std::max(worst, (x * yq - y * xq).norm());
    }
  }
  return worst;
}

Complex partition_product(std::span<const Complex> masses) {
  return chunk_product(masses, 0, masses.size());
}

}  // namespace reference

}  // namespace factorlab::kernels
