#include "factorlab/factorization.hpp"

#include "factorlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <tuple>

namespace factorlab {

SiteSpec SiteSpec::make(std::vector<std::size_t> dims) {
  if (dims.empty()) throw ContractViolation("at least one site is required");
  if (dims.size() > kMaxSites) {
    throw CapacityError("at most " + std::to_string(kMaxSites) + " sites are supported");
  }
  std::size_t total = 1;
  for (auto d : dims) {
    if (d < 2) throw ContractViolation("every site needs dimension at least 2");
    total *= d;
    if (total > kDefaultCapacity) throw CapacityError("ambient dimension exceeds capacity");
  }
  return SiteSpec{std::move(dims)};
}

std::size_t SiteSpec::ambient_dim() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

// HS-orthonormal basis of M_{A} (x) 1 in site order.
std::vector<MatrixC> local_basis(const SiteSpec& sites, Mask a) {
  std::vector<MatrixC> out{MatrixC::Ones(1, 1)};
  for (std::size_t p = 0; p < sites.count(); ++p) {
    const std::size_t d = sites.dims[p];
    std::vector<MatrixC> leg;
    if (a & (Mask{1} << p)) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
          MatrixC e = MatrixC::Zero(d, d);
          e(i, j) = 1.0;
          leg.push_back(std::move(e));
        }
      }
    } else {
      leg.push_back(identity(d) / std::sqrt(static_cast<double>(d)));
    }
    std::vector<MatrixC> next;
    next.reserve(out.size() * leg.size());
    for (const auto& e : out) {
      for (const auto& b : leg) next.push_back(kron(e, b));
    }
    out = std::move(next);
  }
  return out;
}

LawCheck make_check(std::string law, double dev, double tol) {
  return LawCheck{std::move(law), dev, tol, dev <= tol};
}

double center_deviation(const AlgebraBasis& x, const Tolerance& tol) {
  const AlgebraBasis center = meet_algebras(x, commutant(x, tol), tol);
  return span_deviation(center, AlgebraBasis::scalars(x.ambient_dim()));
}

}  // namespace

FactorizationSpec FactorizationSpec::from_sites(const SiteSpec& sites, const Tolerance& tol) {
  tol.validate();
  const SiteSpec checked = SiteSpec::make(sites.dims);
  auto s = std::make_shared<State>();
  s->sites = checked;
  s->embedding = identity(checked.ambient_dim());
  s->tol = tol;
  return FactorizationSpec(std::move(s));
}

FactorizationSpec FactorizationSpec::conjugated(const MatrixC& v) const {
  const std::size_t d = ambient_dim();
  if (static_cast<std::size_t>(v.rows()) != d || v.rows() != v.cols()) {
    throw ContractViolation("conjugating unitary has the wrong size");
  }
  if ((v.adjoint() * v - identity(d)).norm() > tolerance().eq_tol * std::sqrt(static_cast<double>(d))) {
    throw ContractViolation("conjugating matrix is not unitary");
  }
  auto s = std::make_shared<State>();
  s->sites = state_->sites;
  s->embedding = v * state_->embedding;
  s->tol = state_->tol;
  return FactorizationSpec(std::move(s));
}

const AlgebraBasis& FactorizationSpec::factor(Mask a) const {
  if (a & ~full_mask()) throw ContractViolation("subset mask has bits outside the atom set");
  {
    std::lock_guard<std::mutex> g(state_->lock);
    auto it = state_->cache.find(a);
    if (it != state_->cache.end()) return *it->second;
  }
  const std::size_t d = ambient_dim();
  auto elems = local_basis(state_->sites, a);
  MatrixC frame(d * d, static_cast<Eigen::Index>(elems.size()));
  const MatrixC& v = state_->embedding;
  for (std::size_t k = 0; k < elems.size(); ++k) frame.col(k) = vec(v * elems[k] * v.adjoint());
  auto built = std::make_shared<const AlgebraBasis>(AlgebraBasis::from_frame(d, std::move(frame), state_->tol));
  std::lock_guard<std::mutex> g(state_->lock);
  // a concurrent fill produced the same span; keep whichever landed first
  auto [it, inserted] = state_->cache.emplace(a, std::move(built));
  return *it->second;
}

std::vector<LawCheck> verify_factorization(const FactorizationSpec& f, std::uint64_t seed,
                                           std::size_t sample) {
  const Tolerance& tol = f.tolerance();
  const std::size_t n = f.index_size();
  const std::size_t d = f.ambient_dim();
  double factor_dev = 0.0;
  double complement_dev = 0.0;
  double meet_dev = 0.0;
  double join_dev = 0.0;
  double distrib_dev = 0.0;
  double ends_dev = std::max(span_deviation(f.factor(0), AlgebraBasis::scalars(d)),
                             span_deviation(f.factor(f.full_mask()), AlgebraBasis::full(d)));

  for (Mask a = 0; a < n; ++a) {
    const AlgebraBasis& x = f.factor(a);
    const FactorCertificate cert = is_factor(x, tol);
    factor_dev = std::max(factor_dev, cert.is_factor ? center_deviation(x, tol) : 1.0);
    complement_dev = std::max(complement_dev, span_deviation(commutant(x, tol), f.factor(f.complement(a))));
  }

  std::map<std::pair<Mask, Mask>, AlgebraBasis> meets;
  std::map<std::pair<Mask, Mask>, AlgebraBasis> joins;
  auto meet_of = [&](Mask a, Mask b) -> const AlgebraBasis& {
    auto key = std::minmax(a, b);
    auto it = meets.find(key);
    if (it == meets.end()) it = meets.emplace(key, meet_algebras(f.factor(a), f.factor(b), tol)).first;
    return it->second;
  };
  auto join_of = [&](Mask a, Mask b) -> const AlgebraBasis& {
    auto key = std::minmax(a, b);
    auto it = joins.find(key);
    if (it == joins.end()) it = joins.emplace(key, join_algebras(f.factor(a), f.factor(b), tol)).first;
    return it->second;
  };

  std::vector<std::tuple<Mask, Mask, Mask>> triples;
  if (n <= 16) {
    for (Mask a = 0; a < n; ++a)
      for (Mask b = 0; b < n; ++b)
        for (Mask c = 0; c < n; ++c) triples.emplace_back(a, b, c);
  } else {
    Rng rng(seed);
    std::uniform_int_distribution<Mask> pick(0, static_cast<Mask>(n - 1));
    for (std::size_t k = 0; k < sample; ++k) {
      const Mask a = pick(rng);
      const Mask b = pick(rng);
      const Mask c = pick(rng);
      triples.emplace_back(a, b, c);
    }
  }

  std::set<std::pair<Mask, Mask>> pairs;
  for (const auto& [a, b, c] : triples) {
    pairs.insert(std::minmax(a, b));
    pairs.insert(std::minmax(b, c));
    pairs.insert(std::minmax(a, c));
  }
  for (const auto& [a, b] : pairs) {
    meet_dev = std::max(meet_dev, span_deviation(meet_of(a, b), f.factor(a & b)));
    join_dev = std::max(join_dev, span_deviation(join_of(a, b), f.factor(a | b)));
  }
  for (const auto& [a, b, c] : triples) {
    const AlgebraBasis lhs = meet_algebras(f.factor(a), join_of(b, c), tol);
    const AlgebraBasis rhs = join_algebras(meet_of(a, b), meet_of(a, c), tol);
    distrib_dev = std::max(distrib_dev, span_deviation(lhs, rhs));
  }

  return {make_check("factor", factor_dev, kSpanLawTol),
          make_check("bounds", ends_dev, kSpanLawTol),
          make_check("complement", complement_dev, kSpanLawTol),
          make_check("meet", meet_dev, kSpanLawTol),
          make_check("join", join_dev, kSpanLawTol),
          make_check("distributivity", distrib_dev, kSpanLawTol)};
}

std::vector<LawCheck> verify_family(const std::vector<AlgebraBasis>& family, const Tolerance& tol) {
  if (family.empty()) throw ContractViolation("empty family");
  auto closest = [&](const AlgebraBasis& y) {
    double best = 1.0;
    for (const auto& m : family) best = std::min(best, span_deviation(y, m));
    return best;
  };
  double factor_dev = 0.0;
  double involution_dev = 0.0;
  double meet_dev = 0.0;
  double join_dev = 0.0;
  double distrib_dev = 0.0;
  for (const auto& x : family) {
    const FactorCertificate cert = is_factor(x, tol);
    factor_dev = std::max(factor_dev, cert.is_factor ? center_deviation(x, tol) : 1.0);
    involution_dev = std::max(involution_dev, closest(commutant(x, tol)));
  }
  for (const auto& x : family) {
    for (const auto& y : family) {
      meet_dev = std::max(meet_dev, closest(meet_algebras(x, y, tol)));
      join_dev = std::max(join_dev, closest(join_algebras(x, y, tol)));
      for (const auto& z : family) {
        const AlgebraBasis lhs = meet_algebras(x, join_algebras(y, z, tol), tol);
        const AlgebraBasis rhs = join_algebras(meet_algebras(x, y, tol), meet_algebras(x, z, tol), tol);
        distrib_dev = std::max(distrib_dev, span_deviation(lhs, rhs));
      }
    }
  }
  return {make_check("factor", factor_dev, kSpanLawTol),
          make_check("involution", involution_dev, kSpanLawTol),
          make_check("meet-closure", meet_dev, kSpanLawTol),
          make_check("join-closure", join_dev, kSpanLawTol),
          make_check("distributivity", distrib_dev, kSpanLawTol)};
}

FactorizationSpec product_factorization(const FactorizationSpec& f1, const FactorizationSpec& f2) {
  std::vector<std::size_t> dims = f1.sites().dims;
  dims.insert(dims.end(), f2.sites().dims.begin(), f2.sites().dims.end());
  const SiteSpec sites = SiteSpec::make(std::move(dims));
  const FactorizationSpec base = FactorizationSpec::from_sites(sites, f1.tolerance());
  const MatrixC v = kron(f1.embedding(), f2.embedding());
  if ((v - identity(sites.ambient_dim())).norm() == 0.0) return base;
  return base.conjugated(v);
}

std::pair<FactorizationSpec, VectorC> build_from_product_probability(
    const std::vector<std::vector<double>>& outcome_probs) {
  std::vector<std::size_t> dims;
  std::vector<MatrixC> legs;
  for (const auto& p : outcome_probs) {
    if (p.size() < 2) throw ContractViolation("each site needs at least two outcomes");
    double total = 0.0;
    MatrixC leg(p.size(), 1);
    for (std::size_t w = 0; w < p.size(); ++w) {
      if (!(p[w] > 0.0) || !std::isfinite(p[w])) {
        throw ContractViolation("outcome probabilities must be strictly positive");
      }
      total += p[w];
      leg(w, 0) = std::sqrt(p[w]);
    }
    if (std::abs(total - 1.0) > 1e-12) throw ContractViolation("outcome probabilities must sum to 1");
    dims.push_back(p.size());
    legs.push_back(std::move(leg));
  }
  const SiteSpec sites = SiteSpec::make(std::move(dims));
  VectorC omega = kron_all(legs).col(0);
  return {FactorizationSpec::from_sites(sites), std::move(omega)};
}

}  // namespace factorlab
