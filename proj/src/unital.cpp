#include "factorlab/unital.hpp"

#include "factorlab/error.hpp"
#include "factorlab/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>

namespace factorlab {

namespace {

MatrixC orbit(const std::vector<MatrixC>& elems, const VectorC& v) {
  MatrixC out(v.size(), static_cast<Eigen::Index>(elems.size()));
  for (std::size_t k = 0; k < elems.size(); ++k) out.col(k) = elems[k] * v;
  return out;
}

MatrixC stack(const std::vector<MatrixC>& elems, std::size_t d) {
  MatrixC out(d * d, static_cast<Eigen::Index>(elems.size()));
  for (std::size_t k = 0; k < elems.size(); ++k) out.col(k) = vec(elems[k]);
  return out;
}

}  // namespace

IndependenceResult is_independent_under(const AlgebraBasis& x, const AlgebraBasis& y,
                                        const VectorC& omega, const Tolerance& tol) {
  if (x.ambient_dim() != y.ambient_dim() || static_cast<std::size_t>(omega.size()) != x.ambient_dim()) {
    throw ContractViolation("independence test: dimension mismatch");
  }
  const auto xs = x.elements();
  const auto ys = y.elements();
  MatrixC left(omega.size(), static_cast<Eigen::Index>(xs.size()));
  VectorC ex(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    left.col(i) = xs[i].adjoint() * omega;
    ex(i) = omega.dot(xs[i] * omega);
  }
  const MatrixC right = orbit(ys, omega);
  const VectorC ey = (omega.adjoint() * right).transpose();
  const MatrixC cov = left.adjoint() * right - ex * ey.transpose();

  IndependenceResult r;
  r.product_rule_dev = cov.cwiseAbs().maxCoeff();
  const AlgebraBasis both = join_algebras(x, y, tol);
  const MatrixC q = range_basis(orbit(both.elements(), omega), tol.rank_tol);
  r.commutation_dev = kernels::max_commutator_on_subspace(xs, ys, q);
  r.independent = r.max_deviation() <= tol.eq_tol;
  return r;
}

RaisedIndependenceReport verify_raised_independence(const std::vector<MatrixC>& x_gens,
                                                    const std::vector<MatrixC>& y_gens,
                                                    const VectorC& omega, const Tolerance& tol) {
  const auto d = static_cast<std::size_t>(omega.size());
  RaisedIndependenceReport rep;
  double hyp = 0.0;
  for (const auto* gens : {&x_gens, &y_gens}) {
    if (gens->empty()) continue;
    const MatrixC span = range_basis(stack(*gens, d), tol.rank_tol);
    auto resid = [&](const MatrixC& m) {
      const VectorC v = vec(m);
      return (v - span * (span.adjoint() * v)).norm() / (1.0 + v.norm());
    };
    for (const auto& a : *gens) {
      hyp = std::max(hyp, resid(a.adjoint()));
      for (const auto& b : *gens) hyp = std::max(hyp, resid(a * b));
    }
  }
  for (const auto& a : x_gens) {
    for (const auto& b : y_gens) {
      const double scale = 1.0 + a.norm() * b.norm();
      const VectorC ab = a * (b * omega);
      const VectorC ba = b * (a * omega);
      hyp = std::max(hyp, (ab - ba).norm() / scale);
      const Complex lhs = omega.dot(ab);
      const Complex rhs = omega.dot(a * omega) * omega.dot(b * omega);
      hyp = std::max(hyp, std::abs(lhs - rhs) / scale);
    }
  }
  rep.hypothesis_dev = hyp;
  if (hyp > tol.eq_tol) {
    rep.status = RaisedStatus::precondition_failed;
    return rep;
  }
  const AlgebraBasis x = generate_algebra(d, x_gens, tol);
  const AlgebraBasis y = generate_algebra(d, y_gens, tol);
  const IndependenceResult r = is_independent_under(x, y, omega, tol);
  rep.conclusion_dev = r.max_deviation();
  rep.status = r.independent ? RaisedStatus::passed : RaisedStatus::failed;
  return rep;
}

double VectorClassification::max_deviation() const {
  return deviations.empty() ? 0.0 : *std::max_element(deviations.begin(), deviations.end());
}

double factorizable_threshold(const Tolerance& tol) { return 10.0 * tol.eq_tol; }

VectorClassification is_factorizable(const VectorC& xi, const FactorizationSpec& f, const Tolerance& tol) {
  const std::size_t d = f.ambient_dim();
  if (static_cast<std::size_t>(xi.size()) != d) throw ContractViolation("vector has the wrong dimension");
  const double norm = xi.norm();
  if (!(norm > tol.eq_tol)) throw ContractViolation("only non-zero vectors can be factorizable");
  const VectorC v = xi / norm;
  const double tau = factorizable_threshold(tol);
  const MatrixC rank_one = v * v.adjoint();

  VectorClassification out;
  out.is_factorizable = true;
  std::vector<FactorizableWitness> witnesses;
  for (Mask x = 0; x < f.index_size(); ++x) {
    const AlgebraBasis& fx = f.factor(x);
    const AlgebraBasis& fxp = f.factor(f.complement(x));
    const auto xs = fx.elements();
    const auto ys = fxp.elements();
    const MatrixC orb_x = orbit(xs, v);
    const MatrixC orb_y = orbit(ys, v);

    // span(x v) is invariant under x, so its projection lies in x' (and dually)
    const MatrixC range_x = range_basis(orb_x, tau);
    const MatrixC range_y = range_basis(orb_y, tau);
    const MatrixC p_prime = projector(range_x);
    const MatrixC p = projector(range_y);

    // (ii) |v><v| = [x' v][x v]
    const double dev_ii = op_norm(rank_one - p * p_prime);

    // (i) product rule, as the covariance form on HS-unit bases; d bounds the
    // passage to operator-norm-unit elements
    MatrixC left(d, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) left.col(i) = xs[i].adjoint() * v;
    const VectorC ex = orb_x.adjoint() * v;
    const VectorC ey = (v.adjoint() * orb_y).transpose();
    const MatrixC cov = left.adjoint() * orb_y - ex.conjugate() * ey.transpose();
    const double dev_i = static_cast<double>(d) * op_norm(cov);

    // (vii) the two projections are minimal in their algebras and fix v
    double dev_vii = std::max({fx.membership_residual(p), fxp.membership_residual(p_prime),
                               (p * v - v).norm(), (p_prime * v - v).norm()});
    if (compressed_dim(fx, range_y, tol) != 1 || compressed_dim(fxp, range_x, tol) != 1) dev_vii = 1.0;

    const double devs[3] = {dev_i, dev_ii, dev_vii};
    const bool any_pass = std::any_of(std::begin(devs), std::end(devs), [&](double e) { return e <= tau; });
    const bool any_clear_fail =
        std::any_of(std::begin(devs), std::end(devs), [&](double e) { return e > kGrayFactor * tau; });
    if (any_pass && any_clear_fail) {
      throw InconsistencyError("factorizable-equivalence",
                               "tests disagree at index " + std::to_string(x) + ": product rule " +
                                   std::to_string(dev_i) + ", projection product " + std::to_string(dev_ii) +
                                   ", minimal projections " + std::to_string(dev_vii));
    }
    const double worst = std::max({dev_i, dev_ii, dev_vii});
    out.deviations.push_back(worst);
    if (worst > tau) out.is_factorizable = false;
    witnesses.push_back(FactorizableWitness{x, p, p_prime});
  }
  if (out.is_factorizable) out.witnesses = std::move(witnesses);
  return out;
}

struct UnitalSpec::Cache {
  std::mutex lock;
  std::map<Mask, MatrixC> ranges;
  std::map<Mask, ProductFrame> splits;
  std::optional<ProductFrame> partition;
};

UnitalSpec::UnitalSpec(FactorizationSpec f, VectorC omega)
    : f_(std::move(f)), omega_(std::move(omega)), cache_(std::make_shared<Cache>()) {}

UnitalSpec UnitalSpec::certify(const FactorizationSpec& f, const VectorC& omega) {
  if (static_cast<std::size_t>(omega.size()) != f.ambient_dim()) {
    throw UnitCertificationError("unit has the wrong dimension");
  }
  if (!all_finite(omega)) throw UnitCertificationError("unit has non-finite entries");
  const double norm_dev = std::abs(omega.norm() - 1.0);
  if (norm_dev > 1e-12) throw UnitCertificationError("unit must have norm one");
  UnitalSpec u(f, omega);
  double worst = norm_dev;
  for (Mask x = 0; x < f.index_size(); ++x) {
    const IndependenceResult r =
        is_independent_under(f.factor(x), f.factor(f.complement(x)), omega, f.tolerance());
    worst = std::max(worst, r.max_deviation());
    if (!r.independent) {
      throw UnitCertificationError("F_x and F_x' are not independent under the unit at index " +
                                   std::to_string(x) + " (deviation " + std::to_string(r.max_deviation()) +
                                   ")");
    }
  }
  u.cert_dev_ = worst;
  return u;
}

const MatrixC& UnitalSpec::phi_range(Mask x) const {
  {
    std::lock_guard<std::mutex> g(cache_->lock);
    auto it = cache_->ranges.find(x);
    if (it != cache_->ranges.end()) return it->second;
  }
  MatrixC r = range_basis(orbit(f_.factor(x).elements(), omega_), tolerance().rank_tol);
  std::lock_guard<std::mutex> g(cache_->lock);
  return cache_->ranges.emplace(x, std::move(r)).first->second;
}

const ProductFrame& UnitalSpec::local_split(Mask x) const {
  {
    std::lock_guard<std::mutex> g(cache_->lock);
    auto it = cache_->splits.find(x);
    if (it != cache_->splits.end()) return it->second;
  }
  const std::array<AlgebraBasis, 2> pair{f_.factor(x), f_.factor(f_.complement(x))};
  ProductFrame pf = product_frame(pair, omega_, tolerance());
  std::lock_guard<std::mutex> g(cache_->lock);
  return cache_->splits.emplace(x, std::move(pf)).first->second;
}

const ProductFrame& UnitalSpec::partition_split() const {
  {
    std::lock_guard<std::mutex> g(cache_->lock);
    if (cache_->partition) return *cache_->partition;
  }
  std::vector<AlgebraBasis> atoms;
  for (std::size_t p = 0; p < f_.atom_count(); ++p) atoms.push_back(f_.factor(Mask{1} << p));
  ProductFrame pf = product_frame(atoms, omega_, tolerance());
  std::lock_guard<std::mutex> g(cache_->lock);
  if (!cache_->partition) cache_->partition = std::move(pf);
  return *cache_->partition;
}

double multiplicative_deviation(const UnitalSpec& u, const VectorC& xi) {
  const FactorizationSpec& f = u.factorization();
  const double scale = 1.0 + xi.squaredNorm();
  double worst = std::abs(u.omega().dot(xi) - 1.0);
  for (Mask x = 0; x < f.index_size(); ++x) {
    const ProductFrame& pf = u.local_split(x);
    const VectorC coords = pf.unitary.adjoint() * xi;
    const VectorC a = pf.legs[0].adjoint() * xi;
    const VectorC b = pf.legs[1].adjoint() * xi;
    const VectorC ab = kron(a, b).col(0);
    worst = std::max(worst, (coords - ab).norm() / scale);
  }
  return worst;
}

bool is_multiplicative(const UnitalSpec& u, const VectorC& xi) {
  const Tolerance& tol = u.tolerance();
  const double tau = factorizable_threshold(tol);
  const double direct = multiplicative_deviation(u, xi);
  const bool direct_pass = direct <= tau;
  const bool direct_fail = direct > kGrayFactor * tau;

  bool other = false;
  bool other_fail = true;
  if (xi.norm() > tol.eq_tol) {
    const VectorClassification c = is_factorizable(xi, u.factorization(), tol);
    const double pairing = std::abs(u.omega().dot(xi) - 1.0);
    other = c.is_factorizable && pairing <= tau;
    other_fail = (!c.is_factorizable && c.max_deviation() > kGrayFactor * tau) || pairing > kGrayFactor * tau;
  }
  if ((direct_pass && other_fail) || (direct_fail && other)) {
    throw InconsistencyError("multiplicative-factorizable",
                             "direct test deviation " + std::to_string(direct) +
                                 " disagrees with the factorizable route");
  }
  return direct_pass && other;
}

double additive_deviation(const UnitalSpec& u, const VectorC& xi) {
  const FactorizationSpec& f = u.factorization();
  const double scale = 1.0 + xi.norm();
  double worst = 0.0;
  for (Mask x = 0; x < f.index_size(); ++x) {
    const MatrixC& rx = u.phi_range(x);
    const MatrixC& ry = u.phi_range(f.complement(x));
    const VectorC rest = xi - rx * (rx.adjoint() * xi) - ry * (ry.adjoint() * xi);
    worst = std::max(worst, rest.norm() / scale);
  }
  return worst;
}

bool is_additive(const UnitalSpec& u, const VectorC& xi) {
  return additive_deviation(u, xi) <= factorizable_threshold(u.tolerance());
}

VectorClassification classify_vector(const UnitalSpec& u, const VectorC& xi) {
  VectorClassification c;
  if (xi.norm() > u.tolerance().eq_tol) c = is_factorizable(xi, u.factorization(), u.tolerance());
  c.is_multiplicative = is_multiplicative(u, xi);
  c.is_additive = is_additive(u, xi);
  return c;
}

VectorC find_factorizable_vector(const FactorizationSpec& f, std::uint64_t seed) {
  const Tolerance& tol = f.tolerance();
  const std::size_t d = f.ambient_dim();
  std::vector<AlgebraBasis> atoms;
  MatrixC joint = identity(d);
  for (std::size_t p = 0; p < f.atom_count(); ++p) {
    atoms.push_back(f.factor(Mask{1} << p));
    joint = joint * minimal_projection(atoms.back(), seed + p, tol);
  }
  // product of commuting minimal projections of the atoms: rank one
  Eigen::Index best = 0;
  joint.colwise().norm().maxCoeff(&best);
  const double mag = joint.col(best).norm();
  if (mag < 0.5 / std::sqrt(static_cast<double>(d))) {
    throw InternalError("product of atom minimal projections is not rank one");
  }
  const VectorC anchor = joint.col(best) / mag;
  const ProductFrame pf = product_frame(atoms, anchor, tol);

  Rng rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<MatrixC> legs;
  for (auto g : pf.leg_dims) legs.push_back(random_unit_vector(g, rng));
  const VectorC xi = pf.unitary * kron_all(legs).col(0);
  if (!is_factorizable(xi, f, tol).is_factorizable) {
    throw InternalError("constructed product vector failed the factorizability tests");
  }
  return xi;
}

}  // namespace factorlab
