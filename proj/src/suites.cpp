#include "factorlab/suites.hpp"

#include "factorlab/error.hpp"
#include "factorlab/lemmas.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace factorlab {

namespace {

LawCheck law(std::string name, double dev, double tol, double factor) {
  const double t = tol * factor;
  return LawCheck{std::move(name), dev, t, dev <= t};
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

MatrixC random_element(const AlgebraBasis& a, Rng& rng) {
  const VectorC c = random_gaussian(a.dim(), 1, rng).col(0);
  return unvec(a.frame() * c, a.ambient_dim());
}

MatrixC hstack(const std::vector<MatrixC>& parts, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& p : parts) cols += p.cols();
  MatrixC out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

MatrixC scramble(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(d, rng);
}

// ---------------------------------------------------------------- algebra

struct BlockShape {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (n_i, m_i)
  std::size_t dim = 0;
};

BlockShape random_shape(Rng& rng) {
  for (;;) {
    BlockShape s;
    const std::size_t count = pick(rng, 1, 3);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = pick(rng, 1, 3);
      const std::size_t m = pick(rng, 1, 2);
      s.blocks.emplace_back(n, m);
      s.dim += n * m;
    }
    if (s.dim >= 2 && s.dim <= 12) return s;
  }
}

MatrixC block_element(const BlockShape& s, Rng& rng) {
  MatrixC out = MatrixC::Zero(s.dim, s.dim);
  std::size_t at = 0;
  for (auto [n, m] : s.blocks) {
    const MatrixC g = random_gaussian(n, n, rng);
    out.block(at, at, n * m, n * m) = kron(g, identity(m));
    at += n * m;
  }
  return out;
}

std::vector<LawCheck> algebra_suite(const Instance& inst, const SuiteOptions& opt, const Tolerance& tol) {
  Rng rng(opt.seed);
  double dc = 0.0;
  double dm = 0.0;
  double gen = 0.0;
  for (std::size_t t = 0; t < opt.random_algebras; ++t) {
    const BlockShape s = random_shape(rng);
    const MatrixC v = random_unitary(s.dim, rng);
    const std::vector<MatrixC> gens{v * block_element(s, rng) * v.adjoint(), v * block_element(s, rng) * v.adjoint()};
    const AlgebraBasis a = generate_algebra(s.dim, gens, tol);
    const AlgebraBasis ac = commutant(a, tol);
    std::size_t want = 0;
    std::size_t want_c = 0;
    for (auto [n, m] : s.blocks) {
      want += n * n;
      want_c += m * m;
    }
    if (a.dim() != want || ac.dim() != want_c) gen = std::max(gen, 1.0);
    dc = std::max(dc, span_deviation(commutant(ac, tol), a));

    // b shares a generator with a and picks up an element of a'
    MatrixC y = random_element(ac, rng);
    y = (0.5 * (y + y.adjoint())).eval();
    const std::vector<MatrixC> bgens{gens[0] + gens[0].adjoint(), y};
    const AlgebraBasis b = generate_algebra(s.dim, bgens, tol);
    const AlgebraBasis bc = commutant(b, tol);
    dm = std::max(dm, span_deviation(commutant(join_algebras(a, b, tol), tol), meet_algebras(ac, bc, tol)));
    dm = std::max(dm, span_deviation(commutant(meet_algebras(a, b, tol), tol), join_algebras(ac, bc, tol)));
  }
  std::vector<LawCheck> out;
  out.push_back(law("double-commutant", dc, kSpanLawTol, opt.tol_factor));
  out.push_back(law("de-morgan", dm, kSpanLawTol, opt.tol_factor));
  out.push_back(law("generated-dimension", gen, 0.0, opt.tol_factor));

  const FactorizationSpec f = instance_factorization(inst, tol);
  const std::size_t d = f.ambient_dim();
  double split = 0.0;
  double minimal = 0.0;
  for (Mask a = 0; a < f.index_size(); ++a) {
    const AlgebraBasis& fa = f.factor(a);
    const FactorCertificate cert = tensor_split(fa, opt.seed + a, tol);
    if (!cert.is_factor || !cert.split) {
      split = std::max(split, 1.0);
    } else {
      const TensorSplit& ts = *cert.split;
      if (ts.dim_g * ts.dim_g_prime != d || ts.dim_g * ts.dim_g != fa.dim() ||
          ts.dim_g_prime * ts.dim_g_prime != f.factor(f.complement(a)).dim()) {
        split = std::max(split, 1.0);
      }
      split = std::max(split, op_norm(ts.unitary.adjoint() * ts.unitary - identity(d)));
    }

    const MatrixC p = minimal_projection(fa, opt.seed + a, tol);
    double dev = std::max({op_norm(p * p - p), op_norm(p - p.adjoint()), fa.membership_residual(p)});
    const MatrixC range = range_basis(p, tol.rank_tol, 1.0);
    if (compressed_dim(fa, range, tol) != 1) dev = std::max(dev, 1.0);
    if (cert.split && static_cast<std::size_t>(range.cols()) != cert.split->dim_g_prime) dev = std::max(dev, 1.0);
    minimal = std::max(minimal, dev);
  }
  out.push_back(law("tensor-split", split, kSpanLawTol, opt.tol_factor));
  out.push_back(law("minimal-projection", minimal, kSpanLawTol, opt.tol_factor));
  return out;
}

// ---------------------------------------------------------- factorization

std::vector<LawCheck> factorization_suite(const Instance& inst, const SuiteOptions& opt, const Tolerance& tol) {
  auto checks = verify_factorization(instance_factorization(inst, tol), opt.seed);
  for (auto& c : checks) c = law(c.law, c.max_deviation, c.tolerance, opt.tol_factor);
  return checks;
}

// ----------------------------------------------------------------- unital

VectorC elementary(const ProductFrame& pf, Rng& rng) {
  std::vector<MatrixC> legs;
  for (auto g : pf.leg_dims) legs.push_back(random_unit_vector(g, rng));
  return pf.unitary * kron_all(legs).col(0);
}

// W (x)_p (e_0 + g_p), g_p orthogonal to e_0
VectorC exp_like(const ProductFrame& pf, Rng& rng, double scale) {
  std::vector<MatrixC> legs;
  for (auto g : pf.leg_dims) {
    VectorC leg = scale * random_gaussian(g, 1, rng).col(0);
    leg(0) = 1.0;
    legs.push_back(leg);
  }
  return pf.unitary * kron_all(legs).col(0);
}

// W (f_0 (x) f_1 (x) e_0 ...) with f_p orthogonal to e_0
VectorC double_excitation(const ProductFrame& pf, Rng& rng) {
  std::vector<MatrixC> legs;
  for (std::size_t p = 0; p < pf.leg_dims.size(); ++p) {
    VectorC leg = VectorC::Zero(pf.leg_dims[p]);
    if (p < 2) {
      leg.tail(pf.leg_dims[p] - 1) = random_unit_vector(pf.leg_dims[p] - 1, rng);
    } else {
      leg(0) = 1.0;
    }
    legs.push_back(leg);
  }
  return pf.unitary * kron_all(legs).col(0);
}

// sum over atoms of W (e_0 .. f_p .. e_0)
VectorC single_excitations(const ProductFrame& pf, Rng& rng) {
  VectorC out = VectorC::Zero(pf.unitary.rows());
  for (std::size_t p = 0; p < pf.leg_dims.size(); ++p) {
    std::vector<MatrixC> legs;
    for (std::size_t q = 0; q < pf.leg_dims.size(); ++q) {
      VectorC leg = VectorC::Zero(pf.leg_dims[q]);
      if (q == p) {
        leg.tail(pf.leg_dims[q] - 1) = random_gaussian(pf.leg_dims[q] - 1, 1, rng).col(0);
      } else {
        leg(0) = 1.0;
      }
      legs.push_back(leg);
    }
    out += pf.unitary * kron_all(legs).col(0);
  }
  return out;
}

std::vector<std::vector<std::size_t>> set_partitions(std::size_t n);

std::vector<LawCheck> unital_suite(const Instance& inst, const SuiteOptions& opt, const Tolerance& tol) {
  const FactorizationSpec f = instance_factorization(inst, tol);
  const UnitalSpec u = UnitalSpec::certify(f, instance_unit(inst, f));
  const std::size_t d = f.ambient_dim();
  const std::size_t n = f.atom_count();
  const double tau = factorizable_threshold(tol);
  std::vector<LawCheck> out;
  out.push_back(law("unit-certification", u.certification_deviation(), tol.eq_tol, 1.0));

  std::vector<MatrixC> phi;
  for (Mask x = 0; x < f.index_size(); ++x) phi.push_back(u.phi(x));
  double inter = 0.0;
  double comm = 0.0;
  double orth = 0.0;
  double closest = 2.0;
  double ranks = 0.0;
  for (Mask x = 0; x < f.index_size(); ++x) {
    std::size_t want = 1;
    for (std::size_t p = 0; p < n; ++p) {
      if (x & (Mask{1} << p)) want *= f.sites().dims[p];
    }
    if (static_cast<std::size_t>(u.phi_range(x).cols()) != want) ranks = 1.0;
    for (Mask y = 0; y < f.index_size(); ++y) {
      inter = std::max(inter, op_norm(phi[x] * phi[y] - phi[x & y]));
      comm = std::max(comm, op_norm(phi[x] * phi[y] - phi[y] * phi[x]));
      if ((x & y) == 0) orth = std::max(orth, op_norm(phi[x] * (phi[y] - phi[0])));
      if (x != y) closest = std::min(closest, op_norm(phi[x] - phi[y]));
    }
  }
  out.push_back(law("phi-intersection", inter, 1e-9, opt.tol_factor));
  out.push_back(law("phi-commutation", comm, 1e-9, opt.tol_factor));
  // injectivity: distinct indices have projections at least 0.5 apart
  out.push_back(law("phi-injectivity", std::max(ranks, f.index_size() > 1 ? 1.0 - closest : 0.0), 0.5, 1.0));
  const double bounds = std::max(op_norm(phi[0] - u.omega() * u.omega().adjoint()),
                                 op_norm(phi[f.full_mask()] - identity(d)));
  out.push_back(law("phi-bounds", bounds, 1e-9, opt.tol_factor));
  out.push_back(law("orthogonal", orth, 1e-9, opt.tol_factor));

  Rng rng(opt.seed);
  {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      std::vector<Mask> blocks(n, 0);
      for (std::size_t p = 0; p < n; ++p) blocks[pick(rng, 0, n - 1)] |= Mask{1} << p;
      MatrixC prod = identity(d);
      Complex expect(1.0, 0.0);
      for (Mask b : blocks) {
        if (b == 0) continue;
        MatrixC x = random_element(f.factor(b), rng);
        x /= op_norm(x);
        prod = prod * x;
        expect *= u.omega().dot(x * u.omega());
      }
      worst = std::max(worst, std::abs(u.omega().dot(prod * u.omega()) - expect));
    }
    out.push_back(law("partition-unit-product", worst, 1e-9, opt.tol_factor));
  }

  const ProductFrame& pf = u.partition_split();
  const std::size_t per = std::max<std::size_t>(1, opt.random_vectors / 4);
  {
    // elementary, entangled (two elementary summands), generic
    double bad = 0.0;
    auto probe = [&](const VectorC& xi, int expect) {
      try {
        const bool fac = is_factorizable(xi, f, tol).is_factorizable;
        if ((expect > 0 && !fac) || (expect < 0 && fac)) bad += 1.0;
      } catch (const InconsistencyError& e) {
        if (e.law() != "factorizable-equivalence") throw;
        bad += 1.0;
      }
    };
    const int negative = n >= 2 ? -1 : 0;
    for (std::size_t i = 0; i < per; ++i) probe(elementary(pf, rng), 1);
    for (std::size_t i = 0; i < per; ++i) {
      probe(elementary(pf, rng) + uniform(rng, 0.3, 1.0) * elementary(pf, rng), negative);
    }
    for (std::size_t i = 0; i < opt.random_vectors - 2 * per; ++i) {
      probe(random_unit_vector(d, rng), negative);
    }
    out.push_back(law("factorizable-equivalence", bad, 0.0, 1.0));
  }
  {
    double bad = 0.0;
    auto probe = [&](const VectorC& xi, int expect) {
      try {
        const bool m = is_multiplicative(u, xi);
        if ((expect > 0 && !m) || (expect < 0 && m)) bad += 1.0;
      } catch (const InconsistencyError& e) {
        if (e.law() != "multiplicative-factorizable" && e.law() != "factorizable-equivalence") throw;
        bad += 1.0;
      }
    };
    const int negative = n >= 2 ? -1 : 0;
    for (std::size_t i = 0; i < per; ++i) probe(exp_like(pf, rng, uniform(rng, 0.1, 1.0)), 1);
    for (std::size_t i = 0; i < per; ++i) {
      VectorC xi = elementary(pf, rng);
      const Complex pairing = u.omega().dot(xi);
      if (std::abs(pairing) < 0.05) continue;
      probe(xi / pairing, 1);
    }
    for (std::size_t i = 0; i < per; ++i) {
      if (n < 2) break;
      probe(u.omega() + uniform(rng, 0.2, 1.0) * double_excitation(pf, rng), -1);
    }
    for (std::size_t i = 0; i < opt.random_vectors - 3 * per; ++i) {
      VectorC xi = random_unit_vector(d, rng);
      const Complex pairing = u.omega().dot(xi);
      if (std::abs(pairing) < 0.05) continue;
      probe(xi / pairing, negative);
    }
    out.push_back(law("multiplicative-factorizable", bad, 0.0, 1.0));
  }
  {
    double bad = 0.0;
    for (int t = 0; t < 10; ++t) {
      if (!is_additive(u, single_excitations(pf, rng))) bad += 1.0;
      if (n >= 2 && is_additive(u, double_excitation(pf, rng))) bad += 1.0;
    }
    if (is_additive(u, u.omega())) bad += 1.0;
    if (!is_additive(u, VectorC::Zero(d))) bad += 1.0;
    out.push_back(law("additive-examples", bad, 0.0, 1.0));
  }
  {
    // y -> F_{y & x} read on the H_x leg of the local split
    double worst = 0.0;
    for (Mask x = 1; x < f.index_size(); ++x) {
      const ProductFrame& ls = u.local_split(x);
      const std::size_t g = ls.leg_dims[0];
      std::map<Mask, AlgebraBasis> restricted;
      auto restrict = [&](Mask y) -> const AlgebraBasis& {
        auto it = restricted.find(y);
        if (it != restricted.end()) return it->second;
        std::vector<MatrixC> ops;
        for (const auto& a : f.factor(y & x).elements()) {
          ops.push_back(reduced_operator(ls.unitary.adjoint() * a * ls.unitary, ls.leg_dims, 0));
        }
        return restricted.emplace(y, AlgebraBasis::from_span(g, ops, tol)).first->second;
      };
      for (Mask y = 0; y < f.index_size(); ++y) {
        if ((y & ~x) != 0) continue;
        const Tolerance& t = tol;
        worst = std::max(worst, span_deviation(restrict(x & ~y), commutant(restrict(y), t)));
        for (Mask z = 0; z < f.index_size(); ++z) {
          if ((z & ~x) != 0) continue;
          worst = std::max(worst, span_deviation(restrict(y & z), meet_algebras(restrict(y), restrict(z), t)));
          worst = std::max(worst, span_deviation(restrict(y | z), join_algebras(restrict(y), restrict(z), t)));
        }
      }
    }
    out.push_back(law("restriction-homomorphism", worst, kSpanLawTol, opt.tol_factor));
  }
  {
    const Mask a0 = 1;
    const auto rep = verify_raised_independence(f.factor(a0).elements(), f.factor(f.complement(a0)).elements(),
                                                u.omega(), tol);
    double dev = std::max(rep.hypothesis_dev, rep.conclusion_dev);
    if (rep.status != RaisedStatus::passed) dev = std::max(dev, 1.0);
    out.push_back(law("raised-independence", dev, tau, 1.0));
  }
  {
    double worst = 0.0;
    for (Mask x = 0; x < f.index_size(); ++x) {
      const ProductFrame& ls = u.local_split(x);
      worst = std::max(worst, op_norm(ls.unitary.adjoint() * ls.unitary - identity(d)));
      worst = std::max(worst, (ls.unitary.col(0) - u.omega()).norm());
      if (ls.leg_dims[0] * ls.leg_dims[1] != d) worst = std::max(worst, 1.0);
    }
    out.push_back(law("local-split", worst, kSpanLawTol, opt.tol_factor));
  }
  return out;
}

// --------------------------------------------------------------- spectrum

std::vector<std::vector<std::size_t>> set_partitions(std::size_t n) {
  // restricted growth strings
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> a(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (std::size_t b = 0; b <= used && b < n; ++b) {
      a[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

MatrixC first_chaos_basis(const SpectralResolution& r) {
  std::vector<MatrixC> parts;
  for (const auto& pt : r.points) {
    if (std::popcount(pt.label) == 1) parts.push_back(pt.basis);
  }
  return hstack(parts, static_cast<Eigen::Index>(r.ambient_dim));
}

std::vector<LawCheck> spectrum_suite(const Instance& inst, const SuiteOptions& opt, const Tolerance& tol) {
  const FactorizationSpec f = instance_factorization(inst, tol);
  const UnitalSpec u = UnitalSpec::certify(f, instance_unit(inst, f));
  const SpectralResolution r = spectral_resolution(u);
  const std::size_t n = f.atom_count();
  const std::size_t d = f.ambient_dim();
  std::vector<LawCheck> out;

  std::size_t total = 0;
  for (const auto& pt : r.points) total += static_cast<std::size_t>(pt.basis.cols());
  out.push_back(law("spectral-dimension-sum", total == d ? 0.0 : 1.0, 0.0, 1.0));
  out.push_back(law("spectral-pattern", spectral_pattern_deviation(u, r), 1e-8, opt.tol_factor));
  {
    double dev = 1.0;
    if (!r.points.empty() && r.points[0].label == 0 && r.points[0].basis.cols() == 1) {
      dev = 1.0 - std::abs(u.omega().dot(r.points[0].basis.col(0)));
    }
    out.push_back(law("spectral-empty-point", dev, 1e-9, opt.tol_factor));
  }

  std::vector<std::set<std::size_t>> sets;
  for (Mask x = 0; x < f.index_size(); ++x) {
    const auto s = spectral_set(r, x);
    sets.emplace_back(s.begin(), s.end());
  }
  double pi_bad = 0.0;
  for (Mask x = 0; x < f.index_size(); ++x) {
    for (Mask y = 0; y < f.index_size(); ++y) {
      std::set<std::size_t> both;
      std::set_intersection(sets[x].begin(), sets[x].end(), sets[y].begin(), sets[y].end(),
                            std::inserter(both, both.begin()));
      if (both != sets[x & y]) pi_bad += 1.0;
    }
  }
  out.push_back(law("pi-system", pi_bad, 0.0, 1.0));

  const auto k = counting_map(r);
  double k_bad = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (k[i] != static_cast<std::size_t>(std::popcount(r.points[i].label))) k_bad += 1.0;
  }
  out.push_back(law("counting-map", k_bad, 0.0, 1.0));

  std::vector<std::vector<std::size_t>> pr;
  for (Mask x = 0; x < f.index_size(); ++x) pr.push_back(spectral_projection(r, x));
  double comp_bad = 0.0;
  double mono_bad = 0.0;
  for (Mask x = 0; x < f.index_size(); ++x) {
    for (Mask y = 0; y < f.index_size(); ++y) {
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        if (pr[x][pr[y][i]] != pr[x & y][i]) comp_bad += 1.0;
        if ((x & ~y) == 0 && k[pr[x][i]] > k[pr[y][i]]) mono_bad += 1.0;
      }
    }
  }
  out.push_back(law("pr-composition", comp_bad, 0.0, 1.0));

  double add_bad = 0.0;
  for (const auto& part : set_partitions(n)) {
    std::vector<Mask> blocks(n, 0);
    for (std::size_t p = 0; p < n; ++p) blocks[part[p]] |= Mask{1} << p;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      std::size_t sum = 0;
      for (Mask b : blocks) {
        if (b != 0) sum += k[pr[b][i]];
      }
      if (sum != k[i]) add_bad += 1.0;
    }
  }
  out.push_back(law("K-additivity", add_bad, 0.0, 1.0));
  out.push_back(law("K-monotone", mono_bad, 0.0, 1.0));

  {
    // per-atom events: 1 = {empty}, 2 = {{p}}, 3 = both
    const ProductFrame& pf = u.partition_split();
    double worst = 0.0;
    std::size_t combos = 1;
    for (std::size_t p = 0; p < n; ++p) combos *= 3;
    std::vector<unsigned> ev(n);
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rem = c;
      for (std::size_t p = 0; p < n; ++p) {
        ev[p] = static_cast<unsigned>(rem % 3) + 1;
        rem /= 3;
      }
      std::vector<MatrixC> parts;
      for (const auto& pt : r.points) {
        bool in = true;
        for (std::size_t p = 0; p < n; ++p) {
          const unsigned need = (pt.label & (Mask{1} << p)) ? 2u : 1u;
          if ((ev[p] & need) == 0) in = false;
        }
        if (in) parts.push_back(pt.basis);
      }
      const MatrixC lhs = hstack(parts, static_cast<Eigen::Index>(d));
      std::vector<MatrixC> legs;
      for (std::size_t p = 0; p < n; ++p) {
        const std::size_t g = pf.leg_dims[p];
        const MatrixC id = identity(g);
        if (ev[p] == 1) legs.push_back(id.col(0));
        if (ev[p] == 2) legs.push_back(id.rightCols(g - 1));
        if (ev[p] == 3) legs.push_back(id);
      }
      const MatrixC rhs = pf.unitary * kron_all(legs);
      worst = std::max(worst, span_deviation(lhs, rhs));
    }
    out.push_back(law("projections-and-subspaces", worst, 1e-8, opt.tol_factor));
  }

  Rng rng(opt.seed);
  {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const VectorC h = random_gaussian(d, 1, rng).col(0);
      const auto mu = vector_measure(r, h, h);
      Complex sum(0.0, 0.0);
      for (const auto& m : mu) sum += m;
      worst = std::max(worst, std::abs(sum - h.squaredNorm()) / h.squaredNorm());
    }
    const auto mo = vector_measure(r, u.omega(), u.omega());
    worst = std::max(worst, std::abs(mo[0] - 1.0));
    for (std::size_t i = 1; i < mo.size(); ++i) worst = std::max(worst, std::abs(mo[i]));
    out.push_back(law("vector-measure-total", worst, 1e-9, opt.tol_factor));
  }
  {
    double bad = 0.0;
    std::vector<double> delta(r.points.size(), 0.0);
    delta[0] = 1.0;
    if (!is_spectral_independence_probability(r, delta, 1e-9).holds) bad += 1.0;

    const ProductFrame& pf = u.partition_split();
    const VectorC e = exp_like(pf, rng, 0.7);
    const auto mu = vector_measure(r, e, e);
    std::vector<double> nu;
    for (const auto& m : mu) nu.push_back(std::max(0.0, m.real()));
    const double s = std::accumulate(nu.begin(), nu.end(), 0.0);
    for (auto& w : nu) w /= s;
    if (!is_spectral_independence_probability(r, nu, 1e-9).holds) bad += 1.0;

    std::vector<double> off(r.points.size(), 0.0);
    off.back() = 1.0;
    if (r.points.size() > 1 && is_spectral_independence_probability(r, off, 1e-9).holds) bad += 1.0;
    out.push_back(law("spectral-independence", bad, 0.0, 1.0));
  }
  return out;
}

// ------------------------------------------------------------------- fock

std::vector<LawCheck> fock_suite(const Instance& inst, const SuiteOptions& opt, const Tolerance& tol) {
  const FactorizationSpec f = instance_factorization(inst, tol);
  const UnitalSpec u = UnitalSpec::certify(f, instance_unit(inst, f));
  const SpectralResolution r = spectral_resolution(u);
  const std::size_t n = f.atom_count();
  const std::size_t d = f.ambient_dim();
  const double tau = factorizable_threshold(tol);
  std::vector<LawCheck> out;

  const FockClassification cls = classify_to_fock(u, r, opt.seed);
  out.push_back(law("fock-vacuum", cls.vacuum_dev, 1e-8, opt.tol_factor));
  out.push_back(law("fock-exp-map", cls.exp_dev, 1e-8, opt.tol_factor));
  out.push_back(law("fock-conjugation", cls.conjugation_dev, 1e-7, opt.tol_factor));
  {
    double bad = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (cls.space.leg_dims()[p] != f.sites().dims[p] - 1) bad += 1.0;
    }
    out.push_back(law("fock-legs", bad, 0.0, 1.0));
  }

  const MatrixC chaos = first_chaos_basis(r);
  Rng rng(opt.seed);
  auto random_chaos = [&](double scale) -> VectorC {
    return scale * (chaos * random_unit_vector(static_cast<std::size_t>(chaos.cols()), rng));
  };
  {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const VectorC g = random_chaos(uniform(rng, 0.2, 1.5));
      const VectorC h = random_chaos(uniform(rng, 0.2, 1.5));
      const VectorC eg = exp_map(u, r, g);
      const VectorC eh = exp_map(u, r, h);
      const auto mu = vector_measure(r, g, h);
      Complex closed(1.0, 0.0);
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        if (std::popcount(r.points[i].label) == 1) closed *= 1.0 + mu[i];
      }
      worst = std::max(worst, std::abs(eg.dot(eh) - closed));
      const Complex fock = exp_inner_product(cls.space, first_chaos_components(u, g), first_chaos_components(u, h));
      worst = std::max(worst, std::abs(fock - closed));
    }
    out.push_back(law("exp-inner-product", worst, 1e-8, opt.tol_factor));
  }
  {
    const std::size_t count = std::max<std::size_t>(50, d);
    MatrixC stack(d, count);
    double mult = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const VectorC e = exp_map(u, r, random_chaos(uniform(rng, 0.3, 1.2)));
      mult = std::max(mult, multiplicative_deviation(u, e));
      stack.col(i) = e;
    }
    const std::size_t rank = numerical_rank(stack, tol.rank_tol);
    out.push_back(law("exp-totality", static_cast<double>(d - std::min(d, rank)), 0.0, 1.0));
    out.push_back(law("exp-multiplicative", mult, tau, 1.0));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const VectorC g = random_chaos(uniform(rng, 0.3, 1.2));
      const VectorC e = exp_map(u, r, g);
      for (Mask x = 0; x < f.index_size(); ++x) {
        const MatrixC px = u.phi(x);
        // phi_x g stays in the first chaos; drop the roundoff that leaves it
        const VectorC pg = chaos * (chaos.adjoint() * (px * g));
        worst = std::max(worst, (px * e - exp_map(u, r, pg)).norm() / (1.0 + e.norm()));
      }
    }
    out.push_back(law("phi-exp", worst, 1e-8, opt.tol_factor));
    out.push_back(law("exp-zero", (exp_map(u, r, VectorC::Zero(d)) - u.omega()).norm(), 1e-9, opt.tol_factor));
  }
  {
    std::vector<MatrixC> rows;
    for (Mask x = 0; x < f.index_size(); ++x) rows.push_back(identity(d) - u.phi(x) - u.phi(f.complement(x)));
    MatrixC stacked(static_cast<Eigen::Index>(d * rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) stacked.middleRows(static_cast<Eigen::Index>(i * d), d) = rows[i];
    const MatrixC additive = nullspace_basis(stacked, tol.rank_tol, 1.0);
    out.push_back(law("first-chaos-additive", span_deviation(additive, chaos), 1e-8, opt.tol_factor));
  }
  {
    // elementary tensors of (C unit_p + first chaos_p) legs
    const ProductFrame& pf = u.partition_split();
    const std::size_t count = 2 * d;
    MatrixC stack(d, count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto comps = first_chaos_components(u, random_chaos(1.0));
      std::vector<MatrixC> legs;
      for (std::size_t p = 0; p < n; ++p) {
        VectorC leg(pf.leg_dims[p]);
        leg(0) = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        leg.tail(pf.leg_dims[p] - 1) = comps[p];
        legs.push_back(leg);
      }
      stack.col(i) = pf.unitary * kron_all(legs).col(0);
    }
    const std::size_t rank = numerical_rank(stack, tol.rank_tol);
    out.push_back(law("products-total", static_cast<double>(d - std::min(d, rank)), 0.0, 1.0));
  }
  {
    std::vector<double> masses;
    for (std::size_t p = 0; p < n; ++p) masses.push_back(uniform(rng, 0.5, 2.0));
    const DiscreteFock df = build_dfock(cls.space.leg_dims(), masses);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      std::vector<VectorC> a;
      std::vector<VectorC> b;
      Complex closed(1.0, 0.0);
      for (std::size_t p = 0; p < n; ++p) {
        a.push_back(random_gaussian(df.space.leg_dims()[p], 1, rng).col(0));
        b.push_back(random_gaussian(df.space.leg_dims()[p], 1, rng).col(0));
        closed *= 1.0 + masses[p] * a.back().dot(b.back());
      }
      const VectorC ea = exponential_vector(df.space, a);
      const VectorC eb = exponential_vector(df.space, b);
      worst = std::max(worst, std::abs(ea.dot(eb) - closed) / (1.0 + std::abs(closed)));
      worst = std::max(worst, (ea - df.vacuum).dot(df.vacuum) == Complex(0.0, 0.0) ? 0.0 : 1.0);
    }
    const UnitalSpec vu = UnitalSpec::certify(df.view, df.vacuum);
    for (int t = 0; t < 3; ++t) {
      std::vector<VectorC> a;
      for (std::size_t p = 0; p < n; ++p) a.push_back(0.5 * random_gaussian(df.space.leg_dims()[p], 1, rng).col(0));
      worst = std::max(worst, multiplicative_deviation(vu, exponential_vector(df.space, a)));
    }
    out.push_back(law("dfock-closed-form", worst, 1e-8, opt.tol_factor));
  }
  {
    const BlackConditions bc = black_conditions(u, r);
    double dev = 0.0;
    if (bc.only_unit_multiplicative || bc.only_zero_additive || bc.only_trivial_independence ||
        bc.counting_infinite) {
      dev += 1.0;
    }
    if (!bc.consistent()) dev += 1.0;
    out.push_back(law("black-conditions", dev, 0.0, 1.0));
  }
  return out;
}

// ----------------------------------------------------------------- lemmas

std::vector<LawCheck> lemmas_suite(const SuiteOptions& opt) {
  Rng rng(opt.seed);
  std::vector<LawCheck> out;
  {
    double bad = 0.0;
    for (int t = 0; t < 10000; ++t) {
      std::vector<double> x(pick(rng, 1, 20));
      for (auto& v : x) v = uniform(rng, 0.0, 3.0);
      if (!remainder_inequality_check(x).holds) bad += 1.0;
    }
    out.push_back(law("remainder-inequality", bad, 0.0, 1.0));
  }
  {
    double bad = 0.0;
    for (int t = 0; t < 500; ++t) {
      std::vector<double> q(pick(rng, 1, 12));
      for (auto& v : q) v = uniform(rng, 0.0, 1.0);
      if (!dominance_check(q).holds) bad += 1.0;
    }
    out.push_back(law("stochastic-dominance", bad, 0.0, 1.0));
  }
  {
    // dyadic inputs with n <= 5 keep every DP value exact in double
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      std::vector<double> q(pick(rng, 1, 5));
      for (auto& v : q) v = static_cast<double>(pick(rng, 0, 1024)) / 1024.0;
      std::vector<double> s = q;
      std::shuffle(s.begin(), s.end(), rng);
      const auto a = poisson_binomial_pmf(q);
      const auto b = poisson_binomial_pmf(s);
      double total = 0.0;
      for (std::size_t m = 0; m < a.size(); ++m) {
        worst = std::max(worst, std::abs(a[m] - b[m]));
        total += a[m];
      }
      worst = std::max(worst, std::abs(total - 1.0));
    }
    out.push_back(law("poisson-binomial-symmetry", worst, 0.0, 1.0));
  }
  {
    double mixed = 0.0;
    double atomic = 0.0;
    for (int t = 0; t < 20; ++t) {
      DiscreteComplexMeasure nu;
      std::set<std::size_t> slots;
      const std::size_t atoms = pick(rng, 0, 4);
      while (slots.size() < atoms) slots.insert(pick(rng, 0, 1000));
      for (auto s : slots) {
        nu.locations.push_back(static_cast<double>(s) / 1000.0);
        nu.atom_values.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      }
      if (!nu.atom_values.empty() && t % 4 == 0) nu.atom_values[0] = -1.0;
      const bool pure = t % 2 == 1;
      if (!pure) {
        nu.density.resize(64);
        for (auto& c : nu.density) c = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      }
      const double tv = nu.total_variation();
      if (tv > 2.0) {
        for (auto& a : nu.atom_values) a *= 2.0 / tv;
        for (auto& c : nu.density) c *= 2.0 / tv;
      }
      const auto res = dissecting_product_limit(nu, 16);
      const double gap = std::abs(res.partial_products.back() - res.rhs);
      if (pure) {
        atomic = std::max(atomic, gap);
      } else {
        mixed = std::max(mixed, gap);
      }
    }
    out.push_back(law("dissecting-product-limit", mixed, 1e-4, opt.tol_factor));
    out.push_back(law("dissecting-product-atomic", atomic, 1e-9, opt.tol_factor));
  }
  {
    double worst = 0.0;
    double full = 0.0;
    for (double p0 : {0.1, std::exp(-1.0), 0.5, 0.9}) {
      for (std::size_t m = 0; m <= 5; ++m) {
        const auto c = classicality_limit(p0, m, 100000);
        worst = std::max(worst, std::abs(c.exact - c.limit));
      }
      full = std::max(full, std::abs(classicality_limit(p0, 100, 100000).limit - 1.0));
    }
    out.push_back(law("classicality-limit", worst, 1e-3, opt.tol_factor));
    out.push_back(law("classicality-full-support", full, 1e-12, opt.tol_factor));
  }
  return out;
}

}  // namespace

std::string to_string(UnitMode m) {
  switch (m) {
    case UnitMode::product: return "product";
    case UnitMode::random_multiplicative: return "random_multiplicative";
    case UnitMode::explicit_unit: return "explicit";
    case UnitMode::none: return "none";
  }
  throw InternalError("unknown unit mode");
}

UnitMode unit_mode_from_string(const std::string& s) {
  if (s == "product") return UnitMode::product;
  if (s == "random_multiplicative") return UnitMode::random_multiplicative;
  if (s == "explicit") return UnitMode::explicit_unit;
  if (s == "none") return UnitMode::none;
  throw ContractViolation("unknown unit mode '" + s + "'");
}

namespace {

VectorC site_unit(const SiteSpec& sites, UnitMode mode, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MatrixC> legs;
  for (auto g : sites.dims) {
    VectorC leg = VectorC::Zero(g);
    if (mode == UnitMode::random_multiplicative) leg.tail(g - 1) = 0.5 * random_gaussian(g - 1, 1, rng).col(0);
    leg(0) = 1.0;
    legs.push_back(leg / leg.norm());
  }
  VectorC u = kron_all(legs).col(0);
  return u / u.norm();
}

}  // namespace

Instance make_instance(const std::vector<std::size_t>& dims, UnitMode mode, std::uint64_t seed,
                       std::optional<std::uint64_t> conjugate_seed) {
  if (mode == UnitMode::explicit_unit) throw ContractViolation("explicit units are read from a file");
  Instance inst;
  inst.sites = SiteSpec::make(dims);
  inst.unit_mode = mode;
  inst.seed = seed;
  inst.conjugate_seed = conjugate_seed;
  if (mode != UnitMode::none) {
    VectorC u = site_unit(inst.sites, mode, seed);
    if (conjugate_seed) u = scramble(inst.sites.ambient_dim(), *conjugate_seed) * u;
    inst.unit = u;
  }
  return inst;
}

json instance_to_json(const Instance& inst) {
  json j{{"sites", inst.sites.dims}, {"unit_mode", to_string(inst.unit_mode)}, {"seed", inst.seed}};
  if (inst.conjugate_seed) j["conjugate_seed"] = *inst.conjugate_seed;
  if (inst.unit) j["unit"] = matrix_to_json(*inst.unit);
  return j;
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw ContractViolation("instance must be a JSON object");
  if (!j.contains("sites") || !j.at("sites").is_array()) throw ContractViolation("instance needs a sites list");
  std::vector<std::size_t> dims;
  for (const auto& v : j.at("sites")) {
    if (!v.is_number_unsigned()) throw ContractViolation("site dimensions are positive integers");
    dims.push_back(v.get<std::size_t>());
  }
  auto read_seed = [&](const char* key) -> std::optional<std::uint64_t> {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number_unsigned()) throw ContractViolation(std::string(key) + " must be an unsigned integer");
    return j.at(key).get<std::uint64_t>();
  };
  if (j.contains("unit_mode") && !j.at("unit_mode").is_string()) throw ContractViolation("unit_mode must be a string");
  const UnitMode mode =
      j.contains("unit_mode") ? unit_mode_from_string(j.at("unit_mode").get<std::string>()) : UnitMode::product;
  const std::uint64_t seed = read_seed("seed").value_or(kDefaultSeed);
  const auto conj = read_seed("conjugate_seed");

  Instance inst;
  if (j.contains("unit")) {
    inst.sites = SiteSpec::make(dims);
    inst.unit_mode = mode;
    inst.seed = seed;
    inst.conjugate_seed = conj;
    const MatrixC u = matrix_from_json(j.at("unit"));
    if (u.cols() != 1 || static_cast<std::size_t>(u.rows()) != inst.sites.ambient_dim()) {
      throw ContractViolation("unit must be an ambient_dim x 1 matrix");
    }
    inst.unit = u.col(0);
  } else {
    if (mode == UnitMode::explicit_unit) throw ContractViolation("explicit unit mode needs a unit");
    inst = make_instance(dims, mode, seed, conj);
  }
  return inst;
}

FactorizationSpec instance_factorization(const Instance& inst, const Tolerance& tol) {
  FactorizationSpec f = FactorizationSpec::from_sites(inst.sites, tol);
  if (inst.conjugate_seed) f = f.conjugated(scramble(inst.sites.ambient_dim(), *inst.conjugate_seed));
  return f;
}

VectorC instance_unit(const Instance& inst, const FactorizationSpec& f) {
  if (inst.unit) return *inst.unit;
  VectorC u = find_factorizable_vector(f, inst.seed);
  u /= u.norm();
  Eigen::Index at = 0;
  u.cwiseAbs().maxCoeff(&at);
  return u * (std::abs(u(at)) / u(at));
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const LawCheck& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "factorization", "fock", "lemmas", "spectrum", "unital"};
  return names;
}

SuiteResult run_suite(const std::string& name, const Instance& inst, const SuiteOptions& opt) {
  const Tolerance tol = Tolerance{}.scaled(opt.tol_factor);
  SuiteResult res{name, {}};
  if (name == "algebra") {
    res.checks = algebra_suite(inst, opt, tol);
  } else if (name == "factorization") {
    res.checks = factorization_suite(inst, opt, tol);
  } else if (name == "unital") {
    res.checks = unital_suite(inst, opt, tol);
  } else if (name == "spectrum") {
    res.checks = spectrum_suite(inst, opt, tol);
  } else if (name == "fock") {
    res.checks = fock_suite(inst, opt, tol);
  } else if (name == "lemmas") {
    res.checks = lemmas_suite(opt);
  } else {
    throw ContractViolation("unknown suite '" + name + "'");
  }
  return res;
}

json suite_to_json(const SuiteResult& s) {
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(law_to_json(c));
  return json{{"name", s.name}, {"pass", s.pass()}, {"checks", std::move(checks)}};
}

const std::vector<std::vector<std::size_t>>& standard_site_lists() {
  static const std::vector<std::vector<std::size_t>> lists{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}, {2, 2, 3}};
  return lists;
}

}  // namespace factorlab
