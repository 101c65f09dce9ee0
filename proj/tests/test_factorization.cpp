#include "factorlab/error.hpp"
#include "factorlab/factorization.hpp"
#include "testing.hpp"

#include <cmath>

using namespace factorlab;
using namespace factorlab::testing;

namespace {

double worst(const std::vector<LawCheck>& checks) {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.max_deviation);
  return w;
}

bool all_pass(const std::vector<LawCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace

TEST_CASE("site specs are validated") {
  CHECK_THROWS_AS(SiteSpec::make({}), ContractViolation);
  CHECK_THROWS_AS(SiteSpec::make({2, 1}), ContractViolation);
  CHECK_THROWS_AS(SiteSpec::make({2, 2, 2, 2, 2, 2, 2}), CapacityError);
  CHECK_THROWS_AS(SiteSpec::make({64, 65}), CapacityError);
  CHECK(SiteSpec::make({2, 3, 2}).ambient_dim() == 12);
}

TEST_CASE("the second site of (2,3) carries 1_2 (x) M_3") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const AlgebraBasis& x = f.factor(0b10);
  CHECK(x.dim() == 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(x.membership_residual(kron(identity(2), matrix_unit(3, i, j))) < 1e-12);
  CHECK(x.membership_residual(kron(pauli_x(), identity(3))) > 0.5);
  CHECK(span_deviation(commutant(x), f.factor(0b01)) < 1e-10);
  CHECK(f.factor(0).dim() == 1);
  CHECK(f.factor(0b11).dim() == 36);
  CHECK_THROWS_AS(f.factor(0b100), ContractViolation);
}

TEST_CASE("the laws hold for (2,2) well inside tolerance") {
  const auto checks = verify_factorization(FactorizationSpec::from_sites(SiteSpec::make({2, 2})));
  CHECK(all_pass(checks));
  CHECK(worst(checks) < 1e-9);
  std::vector<std::string> names;
  for (const auto& c : checks) names.push_back(c.law);
  CHECK(names == std::vector<std::string>{"factor", "bounds", "complement", "meet", "join", "distributivity"});
}

TEST_CASE("the laws survive a global conjugation") {
  Rng rng(23);
  for (const auto& dims : {std::vector<std::size_t>{2, 3}, std::vector<std::size_t>{2, 2, 2}}) {
    const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make(dims));
    const FactorizationSpec g = f.conjugated(random_unitary(f.ambient_dim(), rng));
    CHECK(all_pass(verify_factorization(g)));
  }
}

TEST_CASE("conjugation moves every factor") {
  Rng rng(3);
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  const MatrixC v = random_unitary(4, rng);
  const FactorizationSpec g = f.conjugated(v);
  for (Mask a = 0; a < 4; ++a) CHECK(span_deviation(g.factor(a), f.factor(a).conjugated(v)) < 1e-10);
  CHECK_THROWS_AS(f.conjugated(2.0 * v), ContractViolation);
  CHECK_THROWS_AS(f.conjugated(identity(3)), ContractViolation);
}

TEST_CASE("a family with a non-factor element fails the factor law") {
  const AlgebraBasis diag = generate_algebra(2, std::vector<MatrixC>{pauli_z()});
  const std::vector<AlgebraBasis> family{AlgebraBasis::scalars(2), diag, AlgebraBasis::full(2)};
  const auto checks = verify_family(family);
  REQUIRE(checks.front().law == "factor");
  CHECK_FALSE(checks.front().pass);
  // the Boolean family of (2,2) as a plain list passes
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  std::vector<AlgebraBasis> listed;
  for (Mask a = 0; a < 4; ++a) listed.push_back(f.factor(a));
  CHECK(all_pass(verify_family(listed)));
}

TEST_CASE("product of (2,2) and (3) has eight factors on dimension 12") {
  const FactorizationSpec a = FactorizationSpec::from_sites(SiteSpec::make({2, 2}));
  const FactorizationSpec b = FactorizationSpec::from_sites(SiteSpec::make({3}));
  const FactorizationSpec p = product_factorization(a, b);
  CHECK(p.index_size() == 8);
  CHECK(p.ambient_dim() == 12);
  CHECK(p.factor(0b100).dim() == 9);
  CHECK(p.factor(0b011).dim() == 16);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(p.factor(0b011).membership_residual(kron(matrix_unit(4, i, j), identity(3))) < 1e-12);
}

TEST_CASE("product probability spaces: coins") {
  const auto [one, w1] = build_from_product_probability({{0.5, 0.5}});
  CHECK(one.ambient_dim() == 2);
  CHECK(std::abs(w1(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(w1(1) - 1.0 / std::sqrt(2.0)) < 1e-15);
  const auto [two, w2] = build_from_product_probability({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(two.ambient_dim() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(w2(i) - 0.5) < 1e-15);
  const auto [biased, w3] = build_from_product_probability({{0.2, 0.8}, {0.1, 0.3, 0.6}});
  CHECK(std::abs(w3(5) - std::sqrt(0.8 * 0.6)) < 1e-15);
  CHECK_THROWS_AS(build_from_product_probability({{0.5, 0.6}}), ContractViolation);
  CHECK_THROWS_AS(build_from_product_probability({{1.0}}), ContractViolation);
  CHECK_THROWS_AS(build_from_product_probability({{1.0, 0.0}}), ContractViolation);
}

TEST_CASE("factors are cached and shared by copies") {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make({2, 3}));
  const FactorizationSpec copy = f;
  CHECK(&f.factor(1) == &copy.factor(1));
}

TEST_CASE("property: complements are commutants on random conjugated site lists") {
  Rng rng(91);
  for (int t = 0; t < 6; ++t) {
    std::vector<std::size_t> dims(pick(rng, 1, 3));
    std::size_t d = 1;
    for (auto& x : dims) {
      x = pick(rng, 2, 3);
      d *= x;
    }
    if (d > 12) continue;
    const FactorizationSpec f =
        FactorizationSpec::from_sites(SiteSpec::make(dims)).conjugated(random_unitary(d, rng));
    for (Mask a = 0; a < f.index_size(); ++a) {
      CHECK(span_deviation(commutant(f.factor(a)), f.factor(f.complement(a))) < 1e-8);
      std::size_t want = 1;
      for (std::size_t p = 0; p < dims.size(); ++p)
        if ((a >> p) & 1u) want *= dims[p] * dims[p];
      CHECK(f.factor(a).dim() == want);
    }
  }
}
