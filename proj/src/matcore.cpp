#include "factorlab/matcore.hpp"

#include "factorlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace factorlab {

namespace {

// Eigen 3.4's divide-and-conquer SVD occasionally returns wrong singular
// values (and NaN factors) on wide complex inputs with clustered values, so
// every result is checked and recomputed with Jacobi when the check fails.
constexpr double kSvdCheck = 1e-11;

template <class S>
bool svd_ok(const S& s, const MatrixC& a, bool with_vectors) {
  const auto& sv = s.singularValues();
  if (!sv.allFinite()) return false;
  const double fro = a.norm();
  const double slack = kSvdCheck * std::max(fro, 1e-300);
  if (std::abs(sv.norm() - fro) > slack) return false;
  if (!with_vectors) return true;
  const MatrixC& u = s.matrixU();
  const MatrixC& v = s.matrixV();
  if (!u.allFinite() || !v.allFinite()) return false;
  // A V = U S column by column, including the null columns of a full V
  const Eigen::Index k = sv.size();
  MatrixC av = a * v;
  av.leftCols(k) -= u.leftCols(k) * sv.asDiagonal();
  if (av.norm() > slack) return false;
  auto orthonormal = [](const MatrixC& q) {
    return (q.adjoint() * q - MatrixC::Identity(q.cols(), q.cols())).norm() <= kSvdCheck * std::sqrt(q.cols() + 1.0);
  };
  return orthonormal(u) && orthonormal(v);
}

Eigen::VectorXd singular_values(const MatrixC& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<MatrixC> fast(a);
  if (svd_ok(fast, a, false)) return fast.singularValues();
  Eigen::JacobiSVD<MatrixC> slow(a);
  return slow.singularValues();
}

double cutoff(const Eigen::VectorXd& sv, double rank_tol, double scale_floor) {
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  return rank_tol * std::max(smax, scale_floor);
}

}  // namespace

SvdResult checked_svd(const MatrixC& a, SvdVectors vectors) {
  const unsigned opts = vectors == SvdVectors::thin ? (Eigen::ComputeThinU | Eigen::ComputeThinV)
                                                    : (Eigen::ComputeThinU | Eigen::ComputeFullV);
  Eigen::BDCSVD<MatrixC> fast(a, opts);
  if (svd_ok(fast, a, true)) return {fast.singularValues(), fast.matrixU(), fast.matrixV(), false};
  // the failures seen so far are on wide inputs; the adjoint is tall
  const MatrixC at = a.adjoint();
  const unsigned topts = vectors == SvdVectors::thin ? (Eigen::ComputeThinU | Eigen::ComputeThinV)
                                                     : (Eigen::ComputeFullU | Eigen::ComputeThinV);
  Eigen::BDCSVD<MatrixC> flipped(at, topts);
  if (svd_ok(flipped, at, true)) {
    const Eigen::Index k = flipped.singularValues().size();
    return {flipped.singularValues(), flipped.matrixV().leftCols(k), flipped.matrixU(), true};
  }
  Eigen::JacobiSVD<MatrixC> slow(a, opts);
  return {slow.singularValues(), slow.matrixU(), slow.matrixV(), true};
}

void Tolerance::validate() const {
  auto ok = [](double v) { return v > 0.0 && v < 1.0; };
  if (!ok(rank_tol) || !ok(eq_tol) || !ok(cluster_gap)) {
    throw ContractViolation("tolerances must lie strictly between 0 and 1");
  }
}

Tolerance Tolerance::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ContractViolation("tolerance factor must be positive and finite");
  }
  auto clamp = [](double v) { return std::min(v, 0.5); };
  Tolerance t{clamp(rank_tol * factor), clamp(eq_tol * factor), clamp(cluster_gap * factor)};
  t.validate();
  return t;
}

bool all_finite(const MatrixC& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

double op_norm(const MatrixC& a) {
  const auto sv = singular_values(a);
  return sv.size() > 0 ? sv(0) : 0.0;
}

MatrixC kron(const MatrixC& a, const MatrixC& b, std::size_t cap) {
  if (a.size() == 0 || b.size() == 0) throw ContractViolation("kron of an empty matrix");
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > cap || cols > cap) {
    throw CapacityError("kron result " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds capacity " + std::to_string(cap));
  }
  MatrixC out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

MatrixC kron_all(std::span<const MatrixC> factors, std::size_t cap) {
  if (factors.empty()) return MatrixC::Ones(1, 1);
  MatrixC out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i], cap);
  return out;
}

std::vector<EigenCluster> hermitian_eig(const MatrixC& a, const Tolerance& tol) {
  if (a.rows() != a.cols()) throw ContractViolation("hermitian_eig needs a square matrix");
  if (a.size() == 0) return {};
  const double scale = 1.0 + op_norm(a);
  const MatrixC skew = a - a.adjoint();
  if (op_norm(skew) > tol.eq_tol * scale) {
    throw ContractViolation("hermitian_eig input is not Hermitian");
  }
  const MatrixC h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixC> solver(h);
  if (solver.info() != Eigen::Success) throw InternalError("eigensolver did not converge");
  const auto& vals = solver.eigenvalues();  // ascending
  const auto& vecs = solver.eigenvectors();

  std::vector<EigenCluster> out;
  Eigen::Index start = 0;
  const double gap = tol.cluster_gap * scale;
  for (Eigen::Index i = 1; i <= vals.size(); ++i) {
    if (i == vals.size() || vals(i) - vals(i - 1) > gap) {
      EigenCluster c;
      c.value = vals.segment(start, i - start).mean();
      c.vectors = vecs.middleCols(start, i - start);
      out.push_back(std::move(c));
      start = i;
    }
  }
  return out;
}

MatrixC nullspace_basis(const MatrixC& a, const Tolerance& tol) {
  return nullspace_basis(a, tol.rank_tol, 0.0);
}

MatrixC nullspace_basis(const MatrixC& a, double rank_tol, double scale_floor) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return identity(static_cast<std::size_t>(n));
  const SvdResult svd = checked_svd(a, SvdVectors::full_v);
  const double cut = cutoff(svd.values, rank_tol, scale_floor);
  Eigen::Index rank = 0;
  while (rank < svd.values.size() && svd.values(rank) > cut) ++rank;
  return svd.v.rightCols(n - rank);
}

MatrixC range_basis(const MatrixC& a, double rank_tol, double scale_floor) {
  if (a.cols() == 0 || a.rows() == 0) return MatrixC(a.rows(), 0);
  const SvdResult svd = checked_svd(a, SvdVectors::thin);
  const double cut = cutoff(svd.values, rank_tol, scale_floor);
  Eigen::Index rank = 0;
  while (rank < svd.values.size() && svd.values(rank) > cut) ++rank;
  return svd.u.leftCols(rank);
}

std::size_t numerical_rank(const MatrixC& a, double rank_tol) {
  const auto sv = singular_values(a);
  const double cut = cutoff(sv, rank_tol, 0.0);
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sv.size()) && sv(rank) > cut) ++rank;
  return rank;
}

MatrixC subspace_ops(const MatrixC& u, const MatrixC& v, SubspaceMode mode, const Tolerance& tol) {
  if (u.rows() != v.rows()) throw ContractViolation("subspace_ops: row counts differ");
  const Eigen::Index n = u.rows();
  switch (mode) {
    case SubspaceMode::intersect: {
      if (u.cols() == 0 || v.cols() == 0) return MatrixC(n, 0);
      // coefficients w with u w inside span(v); parametrise the smaller span
      const MatrixC& a = u.cols() <= v.cols() ? u : v;
      const MatrixC& b = u.cols() <= v.cols() ? v : u;
      const MatrixC outside = a - b * (b.adjoint() * a);
      const MatrixC w = nullspace_basis(outside, tol.rank_tol, 1.0);
      return a * w;
    }
    case SubspaceMode::sum: {
      MatrixC both(n, u.cols() + v.cols());
      both << u, v;
      return range_basis(both, tol.rank_tol, 1.0);
    }
    case SubspaceMode::complement_within: {
      const MatrixC outside = v - u * (u.adjoint() * v);
      if (v.cols() > 0 && op_norm(outside) > tol.eq_tol) {
        throw ContractViolation("complement_within: span(v) is not contained in span(u)");
      }
      const MatrixC rest = u - v * (v.adjoint() * u);
      return range_basis(rest, tol.rank_tol, 1.0);
    }
  }
  throw InternalError("unknown subspace mode");
}

double span_deviation(const MatrixC& u, const MatrixC& v) {
  if (u.rows() != v.rows()) throw ContractViolation("span_deviation: row counts differ");
  if (u.cols() != v.cols()) return 1.0;
  if (u.cols() == 0) return 0.0;
  return op_norm(u - v * (v.adjoint() * u));
}

VectorC vec(const MatrixC& a) {
  return Eigen::Map<const VectorC>(a.data(), a.size());
}

MatrixC unvec(const Eigen::Ref<const VectorC>& v, std::size_t d) {
  if (static_cast<std::size_t>(v.size()) != d * d) throw ContractViolation("unvec: size mismatch");
  MatrixC out(d, d);
  for (std::size_t j = 0; j < d; ++j) out.col(j) = v.segment(j * d, d);
  return out;
}

MatrixC identity(std::size_t d) { return MatrixC::Identity(d, d); }

MatrixC random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixC out(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

VectorC random_unit_vector(std::size_t d, Rng& rng) {
  VectorC v = random_gaussian(d, 1, rng);
  return v / v.norm();
}

MatrixC random_unitary(std::size_t d, Rng& rng) {
  const MatrixC g = random_gaussian(d, d, rng);
  Eigen::HouseholderQR<MatrixC> qr(g);
  MatrixC q = qr.householderQ() * identity(d);
  const MatrixC r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace factorlab
