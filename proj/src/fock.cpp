#include "factorlab/fock.hpp"

#include "factorlab/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace factorlab {

namespace {

constexpr double kFirstChaosTol = 1e-10;
constexpr double kCertTol = 1e-8;
constexpr double kConjugationTol = 1e-7;

// Tensor index of the vector with digit `i` on leg p and 0 elsewhere.
std::size_t leg_index(const std::vector<std::size_t>& dims, std::size_t p, std::size_t i) {
  std::size_t stride = 1;
  for (std::size_t q = p + 1; q < dims.size(); ++q) stride *= dims[q];
  return i * stride;
}

}  // namespace

FockSpace FockSpace::make(std::vector<std::size_t> leg_dims, std::vector<double> masses) {
  if (leg_dims.empty()) throw ContractViolation("a Fock space needs at least one atom");
  if (leg_dims.size() > kMaxFockAtoms) throw CapacityError("too many atoms for a discrete Fock space");
  if (masses.size() != leg_dims.size()) throw ContractViolation("one mass per atom is required");
  for (std::size_t a = 0; a < leg_dims.size(); ++a) {
    if (leg_dims[a] < 1) throw ContractViolation("Fock legs need dimension at least 1");
    if (!(masses[a] > 0.0) || !std::isfinite(masses[a])) throw ContractViolation("masses must be positive");
  }
  FockSpace fk;
  const std::size_t n = leg_dims.size();
  std::vector<Mask> order((std::size_t{1} << n));
  std::iota(order.begin(), order.end(), Mask{0});
  std::stable_sort(order.begin(), order.end(),
                   [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
  fk.block_of_.assign(order.size(), 0);
  std::size_t offset = 0;
  for (Mask s : order) {
    FockBlock b;
    b.subset = s;
    b.offset = offset;
    b.dim = 1;
    for (std::size_t a = 0; a < n; ++a) {
      if (s & (Mask{1} << a)) {
        b.dim *= leg_dims[a];
        b.weight *= masses[a];
      }
    }
    offset += b.dim;
    if (offset > kDefaultCapacity) throw CapacityError("Fock space exceeds capacity");
    fk.block_of_[s] = fk.blocks_.size();
    fk.blocks_.push_back(b);
  }
  fk.total_ = offset;
  fk.leg_dims_ = std::move(leg_dims);
  fk.masses_ = std::move(masses);
  return fk;
}

const FockBlock& FockSpace::block(Mask subset) const {
  if (subset >= block_of_.size()) throw ContractViolation("subset outside the atom set");
  return blocks_[block_of_[subset]];
}

VectorC FockSpace::vacuum() const {
  VectorC v = VectorC::Zero(total_);
  v(0) = 1.0;
  return v;
}

MatrixC bracket_opening(const FockSpace& fk) {
  const std::size_t n = fk.atom_count();
  std::vector<std::size_t> dims;
  for (auto g : fk.leg_dims()) dims.push_back(g + 1);
  const std::size_t total = fk.total_dim();
  MatrixC perm = MatrixC::Zero(total, total);
  std::vector<std::size_t> digit(n);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (std::size_t a = n; a-- > 0;) {
      digit[a] = rem % dims[a];
      rem /= dims[a];
    }
    Mask subset = 0;
    std::size_t inner = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (digit[a] == 0) continue;
      subset |= Mask{1} << a;
      inner = inner * fk.leg_dims()[a] + (digit[a] - 1);
    }
    perm(fk.block(subset).offset + inner, t) = 1.0;
  }
  return perm;
}

DiscreteFock build_dfock(const std::vector<std::size_t>& leg_dims, const std::vector<double>& masses) {
  FockSpace fk = FockSpace::make(leg_dims, masses);
  std::vector<std::size_t> sites;
  for (auto g : leg_dims) sites.push_back(g + 1);
  MatrixC opening = bracket_opening(fk);
  FactorizationSpec view = FactorizationSpec::from_sites(SiteSpec::make(sites)).conjugated(opening);
  VectorC vac = fk.vacuum();
  return DiscreteFock{std::move(fk), std::move(view), std::move(vac), std::move(opening)};
}

VectorC exponential_vector(const FockSpace& fk, const std::vector<VectorC>& u) {
  const std::size_t n = fk.atom_count();
  if (u.size() != n) throw ContractViolation("one vector per atom is required");
  for (std::size_t a = 0; a < n; ++a) {
    if (static_cast<std::size_t>(u[a].size()) != fk.leg_dims()[a]) {
      throw ContractViolation("exponential vector component has the wrong dimension");
    }
  }
  VectorC out(fk.total_dim());
  for (const auto& b : fk.blocks()) {
    VectorC comp = VectorC::Ones(1);
    for (std::size_t a = 0; a < n; ++a) {
      if (b.subset & (Mask{1} << a)) comp = kron(comp, u[a]).col(0);
    }
    out.segment(b.offset, b.dim) = std::sqrt(b.weight) * comp;
  }
  return out;
}

Complex exp_inner_product(const FockSpace& fk, const std::vector<VectorC>& u, const std::vector<VectorC>& v) {
  const VectorC eu = exponential_vector(fk, u);
  const VectorC ev = exponential_vector(fk, v);
  Complex closed(1.0, 0.0);
  for (std::size_t a = 0; a < fk.atom_count(); ++a) closed *= 1.0 + fk.masses()[a] * u[a].dot(v[a]);
  const Complex direct = eu.dot(ev);
  if (std::abs(closed - direct) > kCertTol * (1.0 + std::abs(closed))) {
    throw InconsistencyError("exp-inner-product", "closed form and direct inner product differ");
  }
  return closed;
}

std::vector<VectorC> first_chaos_components(const UnitalSpec& u, const VectorC& g) {
  const ProductFrame& pf = u.partition_split();
  const VectorC y = pf.unitary.adjoint() * g;
  std::vector<VectorC> out;
  for (std::size_t p = 0; p < pf.leg_dims.size(); ++p) {
    VectorC c(pf.leg_dims[p] - 1);
    for (std::size_t i = 1; i < pf.leg_dims[p]; ++i) c(i - 1) = y(leg_index(pf.leg_dims, p, i));
    out.push_back(std::move(c));
  }
  return out;
}

VectorC exp_map(const UnitalSpec& u, const SpectralResolution& r, const VectorC& g) {
  const auto w = vector_measure(r, g, g);
  double off = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (std::popcount(r.points[i].label) != 1) off += w[i].real();
  }
  if (off > kFirstChaosTol * std::max(g.squaredNorm(), 1e-300)) {
    throw ContractViolation("exp_map argument is not in the first chaos (relative mass " +
                            std::to_string(off / std::max(g.squaredNorm(), 1e-300)) + ")");
  }
  const ProductFrame& pf = u.partition_split();
  const auto comps = first_chaos_components(u, g);
  std::vector<MatrixC> legs;
  for (std::size_t p = 0; p < comps.size(); ++p) {
    VectorC leg(pf.leg_dims[p]);
    leg(0) = 1.0;
    leg.tail(pf.leg_dims[p] - 1) = comps[p];
    legs.push_back(std::move(leg));
  }
  const VectorC out = pf.unitary * kron_all(legs).col(0);
  if (!is_multiplicative(u, out)) {
    throw InconsistencyError("exp-multiplicative", "Exp(g) failed the multiplicative test");
  }
  return out;
}

FockClassification classify_to_fock(const UnitalSpec& u, const SpectralResolution& r, std::uint64_t seed) {
  const FactorizationSpec& f = u.factorization();
  const ProductFrame& pf = u.partition_split();
  std::vector<std::size_t> legs;
  for (auto g : pf.leg_dims) {
    if (g < 2) throw InconsistencyError("fock-classification", "a leg of the unit split is one-dimensional");
    legs.push_back(g - 1);
  }
  DiscreteFock df = build_dfock(legs, std::vector<double>(legs.size(), 1.0));

  FockClassification out{df.space, pf.unitary * df.opening.transpose(), 0.0, 0.0, 0.0};
  out.vacuum_dev = (out.unitary * df.vacuum - u.omega()).norm();

  // first-chaos basis vectors plus a few random combinations span H({K=1})
  std::vector<VectorC> probes;
  MatrixC chaos(f.ambient_dim(), 0);
  for (const auto& pt : r.points) {
    if (std::popcount(pt.label) != 1) continue;
    for (Eigen::Index j = 0; j < pt.basis.cols(); ++j) probes.push_back(pt.basis.col(j));
    MatrixC grown(chaos.rows(), chaos.cols() + pt.basis.cols());
    grown << chaos, pt.basis;
    chaos = std::move(grown);
  }
  Rng rng(seed);
  for (int k = 0; k < 3 && chaos.cols() > 0; ++k) {
    probes.push_back(chaos * random_unit_vector(static_cast<std::size_t>(chaos.cols()), rng));
  }
  for (const auto& g : probes) {
    const VectorC fock = exponential_vector(df.space, first_chaos_components(u, g));
    const VectorC target = exp_map(u, r, g);
    out.exp_dev = std::max(out.exp_dev, (out.unitary * fock - target).norm() / (1.0 + target.norm()));
  }
  if (out.vacuum_dev > kCertTol || out.exp_dev > kCertTol) {
    throw InconsistencyError("fock-classification", "vacuum or exponential vectors are not matched");
  }
  for (Mask a = 0; a < f.index_size(); ++a) {
    const AlgebraBasis moved = df.view.factor(a).conjugated(out.unitary);
    out.conjugation_dev = std::max(out.conjugation_dev, span_deviation(moved, f.factor(a)));
  }
  if (out.conjugation_dev > kConjugationTol) {
    throw InconsistencyError("fock-conjugation",
                             "Fock factors are not carried onto the factorization, deviation " +
                                 std::to_string(out.conjugation_dev));
  }
  return out;
}

bool BlackConditions::consistent() const {
  return only_unit_multiplicative == only_zero_additive && only_zero_additive == only_trivial_independence &&
         only_trivial_independence == counting_infinite;
}

BlackConditions black_conditions(const UnitalSpec& u, const SpectralResolution& r) {
  BlackConditions bc;
  VectorC g;
  for (const auto& pt : r.points) {
    if (std::popcount(pt.label) == 1) {
      g = pt.basis.col(0);
      break;
    }
  }
  for (const auto& pt : r.points) {
    if (pt.label != 0 && pt.mu > 0) bc.counting_infinite = false;
  }
  if (g.size() == 0) return bc;

  const VectorC e = exp_map(u, r, g);
  if (is_multiplicative(u, e) && (e - u.omega()).norm() > kCertTol) bc.only_unit_multiplicative = false;
  if (is_additive(u, g) && g.norm() > kCertTol) bc.only_zero_additive = false;

  const auto mu = vector_measure(r, e, e);
  std::vector<double> nu;
  const double total = e.squaredNorm();
  for (const auto& m : mu) nu.push_back(std::max(0.0, m.real()) / total);
  const double sum = std::accumulate(nu.begin(), nu.end(), 0.0);
  for (auto& w : nu) w /= sum;
  const auto ind = is_spectral_independence_probability(r, nu, 1e-9);
  if (ind.holds && nu[0] < 1.0 - 1e-9) bc.only_trivial_independence = false;
  return bc;
}

}  // namespace factorlab
