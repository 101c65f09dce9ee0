#include "factorlab/error.hpp"
#include "factorlab/unital.hpp"
#include "testing.hpp"

#include <cmath>

using namespace factorlab;
using namespace factorlab::testing;

namespace {

VectorC bell() {
  VectorC b = VectorC::Zero(4);
  b(0) = b(3) = 1.0 / std::sqrt(2.0);
  return b;
}

VectorC e0(std::size_t d) { return basis_vector(d, 0).col(0); }

// unit vector orthogonal to e_0
VectorC off_unit(std::size_t d, Rng& rng) {
  VectorC g = random_gaussian(d, 1, rng).col(0);
  g(0) = 0.0;
  return g / g.norm();
}

}  // namespace

TEST_CASE("the legs of C^2 (x) C^2 are not independent under a Bell state") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  const VectorC w = bell();
  const MatrixC x = kron(matrix_unit(2, 0, 0), identity(2));
  const MatrixC y = kron(identity(2), matrix_unit(2, 0, 0));
  CHECK(std::abs(w.dot(x * y * w) - 0.5) < 1e-15);
  CHECK(std::abs(w.dot(x * w) * w.dot(y * w) - 0.25) < 1e-15);
  const IndependenceResult r = is_independent_under(f.factor(1), f.factor(2), w);
  CHECK_FALSE(r.independent);
  CHECK(r.product_rule_dev > 0.1);
  CHECK_THROWS_AS(UnitalSpec::certify(f, w), UnitCertificationError);
}

TEST_CASE("the legs are independent under a product state") {
  Rng rng(2);
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const VectorC w = product_vector({random_unit_vector(2, rng), random_unit_vector(3, rng)});
  const IndependenceResult r = is_independent_under(f.factor(1), f.factor(2), w);
  CHECK(r.independent);
  CHECK(r.max_deviation() < 1e-12);
  const UnitalSpec u = UnitalSpec::certify(f, w);
  CHECK(u.certification_deviation() < 1e-12);
  CHECK_THROWS_AS(UnitalSpec::certify(f, 2.0 * w), UnitCertificationError);
  CHECK_THROWS_AS(UnitalSpec::certify(f, VectorC::Ones(5) / std::sqrt(5.0)), UnitCertificationError);
}

TEST_CASE("raised independence from matrix-unit monoids") {
  Rng rng(3);
  const VectorC w = product_vector({random_unit_vector(2, rng), random_unit_vector(2, rng)});
  std::vector<MatrixC> xs;
  std::vector<MatrixC> ys;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      xs.push_back(kron(matrix_unit(2, i, j), identity(2)));
      ys.push_back(kron(identity(2), matrix_unit(2, i, j)));
    }
  const auto ok = verify_raised_independence(xs, ys, w);
  CHECK(ok.status == RaisedStatus::passed);
  CHECK(ok.conclusion_dev < 1e-12);
  const auto bad = verify_raised_independence(xs, ys, bell());
  CHECK(bad.status == RaisedStatus::precondition_failed);
  CHECK(bad.hypothesis_dev > 0.1);
}

TEST_CASE("Bell state is not factorizable, elementary tensors are") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  const VectorClassification c = is_factorizable(bell(), f);
  CHECK_FALSE(c.is_factorizable);
  CHECK(c.witnesses.empty());
  Rng rng(4);
  const VectorC xi = 3.0 * product_vector({random_unit_vector(2, rng), random_unit_vector(2, rng)});
  const VectorClassification e = is_factorizable(xi, f);
  CHECK(e.is_factorizable);
  CHECK(e.witnesses.size() == 4);
  CHECK_THROWS_AS(is_factorizable(VectorC::Zero(4), f), ContractViolation);
}

TEST_CASE("property: factorizability agrees with the Schmidt-rank oracle") {
  Rng rng(5);
  const std::vector<std::vector<std::size_t>> lists{{2, 2}, {2, 3}, {2, 2, 2}};
  for (const auto& dims : lists) {
    const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make(dims));
    const std::size_t d = f.ambient_dim();
    for (int t = 0; t < 30; ++t) {
      VectorC xi;
      switch (t % 3) {
        case 0: {
          std::vector<VectorC> legs;
          for (auto g : dims) legs.push_back(random_gaussian(g, 1, rng).col(0));
          xi = product_vector(legs);
          break;
        }
        case 1: {
          // sum of two product vectors: entangled across at least one cut
          std::vector<VectorC> a;
          std::vector<VectorC> b;
          for (auto g : dims) {
            a.push_back(random_unit_vector(g, rng));
            b.push_back(random_unit_vector(g, rng));
          }
          xi = product_vector(a) + product_vector(b);
          break;
        }
        default:
          xi = random_gaussian(d, 1, rng).col(0);
      }
      const bool oracle = schmidt_defect(xi, dims) < 1e-8;
      CHECK(is_factorizable(xi, f).is_factorizable == oracle);
    }
  }
}

TEST_CASE("phi of the first site for (2,3) is the projection onto H_1 (x) C Omega_2") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const UnitalSpec u = UnitalSpec::certify(f, e0(6));
  const MatrixC p = u.phi(0b01);
  CHECK(numerical_rank(p, 1e-9) == 2);
  MatrixC want = MatrixC::Zero(6, 6);
  want(0, 0) = 1.0;  // e0 (x) e0
  want(3, 3) = 1.0;  // e1 (x) e0
  CHECK((p - want).norm() < 1e-12);
  CHECK((u.phi(0) - e0(6) * e0(6).adjoint()).norm() < 1e-12);
  CHECK((u.phi(0b11) - identity(6)).norm() < 1e-12);
}

TEST_CASE("phi laws on a scrambled random multiplicative unit") {
  Rng rng(6);
  const FactorizationSpec base = FactorizationSpec::from_sites(SiteSpec::make({2, 2, 2}));
  const MatrixC v = random_unitary(8, rng);
  const FactorizationSpec f = base.conjugated(v);
  const VectorC w = v * product_vector({random_unit_vector(2, rng), random_unit_vector(2, rng),
                                        random_unit_vector(2, rng)});
  const UnitalSpec u = UnitalSpec::certify(f, w);
  for (Mask x = 0; x < 8; ++x)
    for (Mask y = 0; y < 8; ++y) {
      CHECK((u.phi(x) * u.phi(y) - u.phi(x & y)).norm() < 1e-9);
      CHECK((u.phi(x) * u.phi(y) - u.phi(y) * u.phi(x)).norm() < 1e-9);
    }
  // phi_x phi_x' is the projection onto the unit
  for (Mask x = 0; x < 8; ++x) CHECK((u.phi(x) * u.phi(7 & ~x) - w * w.adjoint()).norm() < 1e-9);
}

TEST_CASE("multiplicative and additive examples on (2,3)") {
  Rng rng(7);
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const UnitalSpec u = UnitalSpec::certify(f, e0(6));
  const VectorC g1 = 0.7 * off_unit(2, rng);
  const VectorC g2 = 0.4 * off_unit(3, rng);
  const VectorC mult = product_vector({e0(2) + g1, e0(3) + g2});
  CHECK(is_multiplicative(u, mult));
  CHECK(multiplicative_deviation(u, mult) < 1e-12);
  const VectorC tangled = e0(6) + product_vector({g1, g2});
  CHECK_FALSE(is_multiplicative(u, tangled));
  const VectorC add = product_vector({g1, e0(3)}) + product_vector({e0(2), g2});
  CHECK(is_additive(u, add));
  CHECK_FALSE(is_additive(u, tangled));
  CHECK_FALSE(is_additive(u, e0(6)));
  const VectorClassification c = classify_vector(u, mult);
  CHECK(c.is_factorizable);
  CHECK(c.is_multiplicative);
  CHECK_FALSE(c.is_additive);
  // factorizable but wrongly paired with the unit
  CHECK_FALSE(is_multiplicative(u, 2.0 * mult));
}

TEST_CASE("local split for an entangled-within-site unit") {
  Rng rng(8);
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const VectorC w = product_vector({random_unit_vector(2, rng), random_unit_vector(3, rng)});
  const UnitalSpec u = UnitalSpec::certify(f, w);
  for (Mask x = 0; x < 4; ++x) {
    const ProductFrame& pf = u.local_split(x);
    CHECK((pf.unitary.adjoint() * pf.unitary - identity(6)).norm() < 1e-10);
    CHECK((pf.unitary.col(0) - w).norm() < 1e-10);
  }
  CHECK(u.local_split(0b01).leg_dims == std::vector<std::size_t>{2, 3});
  CHECK(u.partition_split().leg_dims == std::vector<std::size_t>{2, 3});
}

TEST_CASE("find_factorizable_vector") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  const VectorC xi = find_factorizable_vector(f, 3);
  CHECK(schmidt_defect(xi, {2, 2}) < 1e-10);
  Rng rng(9);
  const MatrixC v = random_unitary(4, rng);
  const FactorizationSpec g = f.conjugated(v);
  const VectorC eta = find_factorizable_vector(g, 3);
  CHECK(is_factorizable(eta, g).is_factorizable);
  // conjugation covariance: V* eta is elementary for the plain sites
  CHECK(schmidt_defect(v.adjoint() * eta, {2, 2}) < 1e-8);
  CHECK_NOTHROW(UnitalSpec::certify(g, eta / eta.norm()));
}
