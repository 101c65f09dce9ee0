#include "factorlab/vnalg.hpp"

#include "factorlab/error.hpp"
#include "factorlab/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace factorlab {

namespace {

constexpr std::size_t kMaxAlgebraDim = 64;

void check_ambient(std::size_t d) {
  if (d == 0) throw ContractViolation("ambient dimension must be positive");
  if (d > kMaxAlgebraDim) {
    throw CapacityError("algebra computations are limited to ambient dimension " +
                        std::to_string(kMaxAlgebraDim));
  }
}

bool is_scalar_multiple(const MatrixC& b, double eps) {
  const auto d = static_cast<double>(b.rows());
  const Complex t = b.trace() / d;
  return (b - t * MatrixC::Identity(b.rows(), b.cols())).norm() <= eps;
}

// Appends to `frame` an orthonormal basis of span(cand) minus span(frame).
// Returns the appended block.
MatrixC absorb(MatrixC& frame, const MatrixC& cand, const Tolerance& tol) {
  MatrixC resid = cand - frame * (frame.adjoint() * cand);
  resid -= frame * (frame.adjoint() * resid);
  // every singular value is below the cutoff
  if (resid.norm() <= tol.rank_tol) return MatrixC(frame.rows(), 0);
  // only the range is needed; pivoted QR reveals it far cheaper than an SVD
  const Eigen::ColPivHouseholderQR<MatrixC> qr(resid);
  const auto& r = qr.matrixR();
  const Eigen::Index steps = std::min(resid.rows(), resid.cols());
  const double cut = tol.rank_tol * std::max(std::abs(r(0, 0)), 1.0);
  Eigen::Index rank = 0;
  while (rank < steps && std::abs(r(rank, rank)) > cut) ++rank;
  if (rank == 0) return MatrixC(frame.rows(), 0);
  MatrixC fresh = qr.householderQ() * MatrixC::Identity(resid.rows(), rank);
  fresh -= frame * (frame.adjoint() * fresh);
  const Eigen::HouseholderQR<MatrixC> again(fresh);
  fresh = again.householderQ() * MatrixC::Identity(fresh.rows(), fresh.cols());
  MatrixC grown(frame.rows(), frame.cols() + fresh.cols());
  grown << frame, fresh;
  frame = std::move(grown);
  return fresh;
}

MatrixC stack_vecs(std::span<const MatrixC> elems, std::size_t d, bool normalise) {
  MatrixC out(d * d, static_cast<Eigen::Index>(elems.size()));
  Eigen::Index used = 0;
  for (const auto& e : elems) {
    VectorC v = vec(e);
    const double n = v.norm();
    if (normalise) {
      if (n == 0.0) continue;
      v /= n;
    }
    out.col(used++) = v;
  }
  return out.leftCols(used);
}

}  // namespace

AlgebraBasis AlgebraBasis::from_frame(std::size_t d, MatrixC frame, const Tolerance& tol) {
  check_ambient(d);
  const auto d2 = static_cast<Eigen::Index>(d * d);
  if (frame.rows() != d2) throw ContractViolation("algebra frame must have d^2 rows");
  if (!all_finite(frame)) throw ContractViolation("algebra frame has non-finite entries");
  const auto k = frame.cols();
  if (k == 0) throw ContractViolation("an algebra contains at least the identity");

  const MatrixC gram = frame.adjoint() * frame;
  if ((gram - MatrixC::Identity(k, k)).norm() > tol.eq_tol) {
    throw ContractViolation("algebra basis is not Hilbert-Schmidt orthonormal");
  }
  AlgebraBasis out(d, std::move(frame));
  const MatrixC id = identity(d);
  if (out.membership_residual(id) > tol.eq_tol * std::sqrt(static_cast<double>(d))) {
    throw ContractViolation("identity is not in the algebra span");
  }
  if (k == d2 || k == 1) return out;

  const auto elems = out.elements();
  for (const auto& b : elems) {
    if (out.membership_residual(b.adjoint()) > tol.eq_tol) {
      throw ContractViolation("algebra span is not closed under adjoint");
    }
  }
  for (const auto& b : elems) {
    const std::array<MatrixC, 1> left{b};
    const MatrixC prods = kernels::left_products(left, out.frame_, d);
    const MatrixC resid = prods - out.frame_ * (out.frame_.adjoint() * prods);
    const double worst = resid.colwise().norm().maxCoeff();
    if (worst > 10.0 * tol.eq_tol) {
      throw ContractViolation("algebra span (dimension " + std::to_string(k) +
                              ") is not closed under products, residual " + std::to_string(worst));
    }
  }
  return out;
}

AlgebraBasis AlgebraBasis::from_span(std::size_t d, std::span<const MatrixC> elements,
                                     const Tolerance& tol) {
  check_ambient(d);
  const MatrixC cand = stack_vecs(elements, d, true);
  return from_frame(d, range_basis(cand, tol.rank_tol, 1.0), tol);
}

AlgebraBasis AlgebraBasis::scalars(std::size_t d) {
  check_ambient(d);
  MatrixC frame = vec(identity(d)) / std::sqrt(static_cast<double>(d));
  return AlgebraBasis(d, std::move(frame));
}

AlgebraBasis AlgebraBasis::full(std::size_t d) {
  check_ambient(d);
  return AlgebraBasis(d, identity(d * d));
}

MatrixC AlgebraBasis::element(std::size_t i) const { return unvec(frame_.col(i), d_); }

std::vector<MatrixC> AlgebraBasis::elements() const {
  std::vector<MatrixC> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(element(i));
  return out;
}

double AlgebraBasis::membership_residual(const MatrixC& x) const {
  const VectorC v = vec(x);
  return (v - frame_ * (frame_.adjoint() * v)).norm();
}

MatrixC AlgebraBasis::project(const MatrixC& x) const {
  const VectorC v = vec(x);
  return unvec(frame_ * (frame_.adjoint() * v), d_);
}

AlgebraBasis AlgebraBasis::conjugated(const MatrixC& u) const {
  if (static_cast<std::size_t>(u.rows()) != d_ || u.rows() != u.cols()) {
    throw ContractViolation("conjugating unitary has the wrong size");
  }
  MatrixC frame(frame_.rows(), frame_.cols());
  for (Eigen::Index j = 0; j < frame_.cols(); ++j) {
    frame.col(j) = vec(u * element(static_cast<std::size_t>(j)) * u.adjoint());
  }
  return AlgebraBasis(d_, std::move(frame));
}

double span_deviation(const AlgebraBasis& a, const AlgebraBasis& b) {
  if (a.ambient_dim() != b.ambient_dim()) return 1.0;
  return span_deviation(a.frame(), b.frame());
}

AlgebraBasis generate_algebra(std::size_t d, std::span<const MatrixC> generators,
                              const Tolerance& tol) {
  check_ambient(d);
  std::vector<MatrixC> seeds{identity(d)};
  for (const auto& g : generators) {
    if (static_cast<std::size_t>(g.rows()) != d || g.rows() != g.cols()) {
      throw ContractViolation("generator is not a d x d matrix");
    }
    if (!all_finite(g)) throw ContractViolation("generator has non-finite entries");
    seeds.push_back(g);
    seeds.push_back(g.adjoint());
  }
  const std::size_t full_dim = d * d;
  MatrixC frame = range_basis(stack_vecs(seeds, d, true), tol.rank_tol, 1.0);

  // Words in a *-closed spanning set: left multiplication by a basis of that
  // set reaches every word, so only freshly added elements need multiplying.
  std::vector<MatrixC> multipliers;
  for (Eigen::Index j = 0; j < frame.cols(); ++j) multipliers.push_back(unvec(frame.col(j), d));

  const std::size_t chunk =
      std::max<std::size_t>(1, (4 * full_dim) / std::max<std::size_t>(1, multipliers.size()));
  MatrixC fresh = frame;
  std::size_t rounds = 0;
  while (fresh.cols() > 0 && static_cast<std::size_t>(frame.cols()) < full_dim) {
    if (++rounds > 2 * full_dim) throw InternalError("algebra closure did not stabilise");
    std::vector<MatrixC> added;
    for (Eigen::Index start = 0; start < fresh.cols(); start += static_cast<Eigen::Index>(chunk)) {
      const Eigen::Index len = std::min<Eigen::Index>(static_cast<Eigen::Index>(chunk),
                                                      fresh.cols() - start);
      const MatrixC prods = kernels::left_products(multipliers, fresh.middleCols(start, len), d);
      MatrixC got = absorb(frame, prods, tol);
      if (got.cols() > 0) added.push_back(std::move(got));
      if (static_cast<std::size_t>(frame.cols()) >= full_dim) break;
    }
    Eigen::Index total = 0;
    for (const auto& a : added) total += a.cols();
    MatrixC next(frame.rows(), total);
    Eigen::Index at = 0;
    for (const auto& a : added) {
      next.middleCols(at, a.cols()) = a;
      at += a.cols();
    }
    fresh = std::move(next);
  }
  if (static_cast<std::size_t>(frame.cols()) >= full_dim) return AlgebraBasis::full(d);
  return AlgebraBasis::from_frame(d, std::move(frame), tol);
}

AlgebraBasis commutant(const AlgebraBasis& x, const Tolerance& tol) {
  const std::size_t d = x.ambient_dim();
  if (x.dim() == d * d) return AlgebraBasis::scalars(d);
  MatrixC n = identity(d * d);
  // two random combinations usually cut n down to the commutant at once; every
  // basis element is still imposed, but one already satisfied (commutator below
  // the rank cutoff on all of n) would leave the nullspace unchanged
  Rng rng(kDefaultSeed);
  std::vector<MatrixC> conditions;
  for (int k = 0; k < 2 && x.dim() > 1; ++k) {
    const MatrixC r = unvec(x.frame() * random_gaussian(x.dim(), 1, rng).col(0), d);
    conditions.push_back(r);
    conditions.push_back(r.adjoint());
  }
  const auto elems = x.elements();
  conditions.insert(conditions.end(), elems.begin(), elems.end());
  for (const auto& b : conditions) {
    if (is_scalar_multiple(b, tol.eq_tol)) continue;
    const double scale = b.norm();
    const MatrixC m = kernels::commutator_columns(b / scale, n, d);
    if (m.norm() <= tol.rank_tol) continue;
    n = n * nullspace_basis(m, tol.rank_tol, 1.0);
    if (n.cols() <= 1) break;
  }
  if (n.cols() <= 1) return AlgebraBasis::scalars(d);
  if (static_cast<std::size_t>(n.cols()) == d * d) return AlgebraBasis::full(d);
  return AlgebraBasis::from_frame(d, range_basis(n, tol.rank_tol, 1.0), tol);
}

bool contained_in(const AlgebraBasis& x, const AlgebraBasis& y, const Tolerance& tol) {
  if (x.dim() > y.dim()) return false;
  const MatrixC outside = x.frame() - y.frame() * (y.frame().adjoint() * x.frame());
  return op_norm(outside) <= tol.eq_tol;
}

namespace {

// Two random elements of x when they regenerate all of x, else the whole basis.
std::vector<MatrixC> generators_of(const AlgebraBasis& x, const Tolerance& tol) {
  const std::size_t d = x.ambient_dim();
  if (x.dim() <= 2) return x.elements();
  Rng rng(kDefaultSeed);
  std::vector<MatrixC> pair;
  for (int k = 0; k < 2; ++k) pair.push_back(unvec(x.frame() * random_gaussian(x.dim(), 1, rng).col(0), d));
  if (generate_algebra(d, pair, tol).dim() == x.dim()) return pair;
  return x.elements();
}

}  // namespace

AlgebraBasis join_algebras(const AlgebraBasis& x, const AlgebraBasis& y, const Tolerance& tol) {
  if (x.ambient_dim() != y.ambient_dim()) throw ContractViolation("join: ambient mismatch");
  if (contained_in(x, y, tol)) return y;
  if (contained_in(y, x, tol)) return x;
  auto gens = generators_of(x, tol);
  const auto more = generators_of(y, tol);
  gens.insert(gens.end(), more.begin(), more.end());
  return generate_algebra(x.ambient_dim(), gens, tol);
}

AlgebraBasis meet_algebras(const AlgebraBasis& x, const AlgebraBasis& y, const Tolerance& tol) {
  if (x.ambient_dim() != y.ambient_dim()) throw ContractViolation("meet: ambient mismatch");
  const std::size_t d = x.ambient_dim();
  MatrixC both = subspace_ops(x.frame(), y.frame(), SubspaceMode::intersect, tol);
  if (both.cols() <= 1) return AlgebraBasis::scalars(d);
  return AlgebraBasis::from_frame(d, std::move(both), tol);
}

FactorCertificate is_factor(const AlgebraBasis& x, const Tolerance& tol) {
  const std::size_t d = x.ambient_dim();
  const AlgebraBasis xp = commutant(x, tol);
  const AlgebraBasis center = meet_algebras(x, xp, tol);
  const AlgebraBasis both = join_algebras(x, xp, tol);
  FactorCertificate cert;
  cert.center_dim = center.dim();
  cert.is_factor = cert.center_dim == 1;
  const bool generates_all = both.dim() == d * d;
  if (cert.is_factor != generates_all) {
    throw InconsistencyError("factor-criteria",
                             "center dimension " + std::to_string(cert.center_dim) +
                                 " but join with commutant has dimension " +
                                 std::to_string(both.dim()));
  }
  return cert;
}

std::size_t compressed_dim(const AlgebraBasis& x, const MatrixC& range, const Tolerance& tol) {
  const auto r = static_cast<std::size_t>(range.cols());
  if (r == 0) return 0;
  MatrixC stacked(r * r, static_cast<Eigen::Index>(x.dim()));
  for (std::size_t i = 0; i < x.dim(); ++i) {
    stacked.col(i) = vec(range.adjoint() * x.element(i) * range);
  }
  return numerical_rank(stacked, tol.rank_tol);
}

MatrixC minimal_projection(const AlgebraBasis& x, std::uint64_t seed, const Tolerance& tol) {
  const std::size_t d = x.ambient_dim();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto elems = x.elements();
  MatrixC range = identity(d);
  for (std::size_t depth = 0; depth <= d; ++depth) {
    if (compressed_dim(x, range, tol) == 1) {
      MatrixC p = projector(range);
      if (x.membership_residual(p) > 10.0 * tol.eq_tol * std::sqrt(static_cast<double>(d))) {
        throw InternalError("minimal projection left the algebra");
      }
      return p;
    }
    MatrixC h = MatrixC::Zero(d, d);
    for (const auto& b : elems) h += normal(rng) * b;
    h = (0.5 * (h + h.adjoint())).eval();
    const MatrixC compressed = range.adjoint() * h * range;
    const auto clusters = hermitian_eig(compressed, tol);
    const auto smallest = std::min_element(
        clusters.begin(), clusters.end(),
        [](const EigenCluster& a, const EigenCluster& b) { return a.multiplicity() < b.multiplicity(); });
    range = range * smallest->vectors;
  }
  throw InternalError("minimality of the projection could not be certified");
}

MatrixC reduced_operator(const MatrixC& w, std::span<const std::size_t> dims, std::size_t keep) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (static_cast<std::size_t>(w.rows()) != total || w.rows() != w.cols()) {
    throw ContractViolation("reduced_operator: size does not match leg dimensions");
  }
  std::size_t stride = 1;
  for (std::size_t q = keep + 1; q < dims.size(); ++q) stride *= dims[q];
  const std::size_t g = dims[keep];
  MatrixC a = MatrixC::Zero(g, g);
  for (std::size_t r = 0; r < total; ++r) {
    if ((r / stride) % g != 0) continue;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t k = 0; k < g; ++k) a(i, k) += w(r + i * stride, r + k * stride);
    }
  }
  return a / static_cast<double>(total / g);
}

MatrixC embed_leg(const MatrixC& a, std::span<const std::size_t> dims, std::size_t at) {
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t q = 0; q < at; ++q) before *= dims[q];
  for (std::size_t q = at + 1; q < dims.size(); ++q) after *= dims[q];
  return kron(kron(identity(before), a), identity(after));
}

ProductFrame product_frame(std::span<const AlgebraBasis> factors, const VectorC& omega,
                           const Tolerance& tol) {
  if (factors.empty()) throw ContractViolation("product_frame needs at least one factor");
  const std::size_t d = factors.front().ambient_dim();
  if (static_cast<std::size_t>(omega.size()) != d) {
    throw ContractViolation("product_frame: vector has the wrong dimension");
  }
  if (std::abs(omega.norm() - 1.0) > tol.eq_tol) {
    throw ContractViolation("product_frame: anchor vector must have norm one");
  }
  ProductFrame pf;
  std::vector<std::vector<MatrixC>> ops(factors.size());
  for (std::size_t p = 0; p < factors.size(); ++p) {
    const auto elems = factors[p].elements();
    MatrixC orbit(d, static_cast<Eigen::Index>(elems.size()));
    for (std::size_t k = 0; k < elems.size(); ++k) orbit.col(k) = elems[k] * omega;
    const MatrixC span = range_basis(orbit, tol.rank_tol, 0.0);
    const MatrixC rest = subspace_ops(span, omega, SubspaceMode::complement_within, tol);
    MatrixC leg(d, 1 + rest.cols());
    leg << omega, rest;
    // least-squares coefficients through the pseudo-inverse of the orbit
    const SvdResult svd = checked_svd(orbit);
    const double cut = tol.rank_tol * (svd.values.size() > 0 ? svd.values(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      if (svd.values(i) > cut) inv(i) = 1.0 / svd.values(i);
    }
    const MatrixC coeff = svd.v * inv.asDiagonal() * (svd.u.adjoint() * leg);
    for (Eigen::Index i = 0; i < leg.cols(); ++i) {
      MatrixC op = MatrixC::Zero(d, d);
      for (std::size_t k = 0; k < elems.size(); ++k) op += coeff(k, i) * elems[k];
      ops[p].push_back(std::move(op));
    }
    pf.leg_dims.push_back(static_cast<std::size_t>(leg.cols()));
    pf.legs.push_back(std::move(leg));
  }
  const std::size_t total =
      std::accumulate(pf.leg_dims.begin(), pf.leg_dims.end(), std::size_t{1}, std::multiplies<>());
  if (total != d) {
    throw InconsistencyError("product-frame", "leg dimensions multiply to " +
                                                  std::to_string(total) + ", ambient is " +
                                                  std::to_string(d));
  }
  pf.unitary.resize(d, d);
  std::vector<std::size_t> digit(factors.size(), 0);
  for (std::size_t col = 0; col < total; ++col) {
    std::size_t rem = col;
    for (std::size_t p = factors.size(); p-- > 0;) {
      digit[p] = rem % pf.leg_dims[p];
      rem /= pf.leg_dims[p];
    }
    VectorC v = omega;
    for (std::size_t p = factors.size(); p-- > 0;) v = ops[p][digit[p]] * v;
    pf.unitary.col(col) = v;
  }

  const double bound = 10.0 * tol.eq_tol * std::sqrt(static_cast<double>(d));
  const double unit_dev = (pf.unitary.adjoint() * pf.unitary - identity(d)).norm();
  if (unit_dev > bound) {
    throw InconsistencyError("product-frame", "not unitary, deviation " + std::to_string(unit_dev));
  }
  VectorC e0 = VectorC::Zero(d);
  e0(0) = 1.0;
  if ((pf.unitary.adjoint() * omega - e0).norm() > bound) {
    throw InconsistencyError("product-frame", "anchor is not sent to the product of leg units");
  }
  for (std::size_t p = 0; p < factors.size(); ++p) {
    for (const auto& x : factors[p].elements()) {
      const MatrixC w = pf.unitary.adjoint() * x * pf.unitary;
      const MatrixC a = reduced_operator(w, pf.leg_dims, p);
      const double dev = (w - embed_leg(a, pf.leg_dims, p)).norm();
      if (dev > bound) {
        throw InconsistencyError("product-frame", "factor " + std::to_string(p) +
                                                      " does not act on its own leg, deviation " +
                                                      std::to_string(dev));
      }
    }
  }
  return pf;
}

FactorCertificate tensor_split(const AlgebraBasis& x, std::uint64_t seed, const Tolerance& tol) {
  FactorCertificate cert = is_factor(x, tol);
  if (!cert.is_factor) throw ContractViolation("tensor_split needs a factor");
  const std::size_t d = x.ambient_dim();
  const AlgebraBasis xp = commutant(x, tol);
  const MatrixC e = minimal_projection(x, seed, tol);
  const MatrixC ep = minimal_projection(xp, seed + 1, tol);
  const MatrixC both = e * ep;
  Eigen::Index best = 0;
  both.colwise().norm().maxCoeff(&best);
  // e e' is the rank-one projection onto a product vector: norm 1, and its
  // largest column is that vector up to scale
  if (op_norm(both) < 0.5) throw InternalError("product of minimal projections vanishes");
  const VectorC omega = both.col(best) / both.col(best).norm();

  const std::array<AlgebraBasis, 2> pair{x, xp};
  const ProductFrame pf = product_frame(pair, omega, tol);
  const std::size_t g = pf.leg_dims[0];
  const std::size_t gp = pf.leg_dims[1];
  if (x.dim() != g * g || xp.dim() != gp * gp || g * gp != d) {
    throw InconsistencyError("tensor-split", "dimension identity dim x = g^2 violated");
  }
  if (numerical_rank(ep, tol.rank_tol) != g) {
    throw InconsistencyError("tensor-split", "leg dimension differs from minimal projection rank");
  }
  cert.minimal_projection = e;
  cert.split = TensorSplit{pf.unitary, g, gp};
  return cert;
}

}  // namespace factorlab
