#include "factorlab/error.hpp"
#include "factorlab/spectrum.hpp"
#include "testing.hpp"

#include <bit>
#include <cmath>

using namespace factorlab;
using namespace factorlab::testing;

namespace {

UnitalSpec plain(const std::vector<std::size_t>& dims) {
  const FactorizationSpec f = FactorizationSpec::from_sites(SiteSpec::make(dims));
  return UnitalSpec::certify(f, basis_vector(f.ambient_dim(), 0).col(0));
}

std::vector<std::size_t> dims_of(const SpectralResolution& r) {
  std::vector<std::size_t> out;
  for (const auto& p : r.points) out.push_back(p.mu);
  return out;
}

}  // namespace

TEST_CASE("spectral dimensions for (2,2) and (2,3)") {
  const SpectralResolution r22 = spectral_resolution(plain({2, 2}));
  CHECK(dims_of(r22) == std::vector<std::size_t>{1, 1, 1, 1});
  for (std::size_t i = 0; i < 4; ++i) CHECK(r22.points[i].label == i);
  const SpectralResolution r23 = spectral_resolution(plain({2, 3}));
  CHECK(dims_of(r23) == std::vector<std::size_t>{1, 1, 2, 2});
  CHECK(r23.ambient_dim == 6);
  CHECK(r23.find(0b11) == 3);
  CHECK(r23.find(0b100) == SpectralResolution::npos);
}

TEST_CASE("the first-site point of (2,2) is e_1 (x) e_0") {
  const SpectralResolution r = spectral_resolution(plain({2, 2}));
  const MatrixC& b = r.points[r.find(0b01)].basis;
  REQUIRE(b.cols() == 1);
  CHECK(std::abs(std::abs(b(2, 0)) - 1.0) < 1e-12);
}

TEST_CASE("spectral sets, counting map and projections on (2,2)") {
  const SpectralResolution r = spectral_resolution(plain({2, 2}));
  const auto s = spectral_set(r, 0b01);
  REQUIRE(s.size() == 2);
  CHECK(r.points[s[0]].label == 0);
  CHECK(r.points[s[1]].label == 0b01);
  CHECK(spectral_set(r, 0).size() == 1);
  CHECK(spectral_set(r, 0b11).size() == 4);
  const auto k = counting_map(r);
  CHECK(k[r.find(0)] == 0);
  CHECK(k[r.find(0b11)] == 2);
  const auto pr = spectral_projection(r, 0b01);
  CHECK(r.points[pr[r.find(0b11)]].label == 0b01);
  CHECK(r.points[pr[r.find(0b10)]].label == 0);
}

TEST_CASE("the unit has a point mass at the empty label") {
  const UnitalSpec u = plain({2, 3});
  const SpectralResolution r = spectral_resolution(u);
  const auto mu = vector_measure(r, u.omega(), u.omega());
  CHECK(std::abs(mu[0] - 1.0) < 1e-12);
  for (std::size_t i = 1; i < mu.size(); ++i) CHECK(std::abs(mu[i]) < 1e-12);
  CHECK_THROWS_AS(vector_measure(r, VectorC::Zero(5), u.omega()), ContractViolation);
}

TEST_CASE("independence probabilities") {
  Rng rng(11);
  const UnitalSpec u = plain({2, 3});
  const SpectralResolution r = spectral_resolution(u);
  std::vector<double> delta(r.points.size(), 0.0);
  delta[0] = 1.0;
  CHECK(is_spectral_independence_probability(r, delta, 1e-12).holds);

  VectorC g1 = random_gaussian(2, 1, rng).col(0);
  VectorC g2 = random_gaussian(3, 1, rng).col(0);
  g1(0) = 1.0;
  g2(0) = 1.0;
  const VectorC xi = kron(g1, g2).col(0);
  REQUIRE(is_multiplicative(u, xi));
  const auto mu = vector_measure(r, xi, xi);
  std::vector<double> nu;
  for (const auto& m : mu) nu.push_back(m.real() / xi.squaredNorm());
  const auto ok = is_spectral_independence_probability(r, nu, 1e-10);
  CHECK(ok.holds);
  CHECK(ok.empty_mass > 0.0);

  // correlated: all mass on empty and full labels
  std::vector<double> corr(r.points.size(), 0.0);
  corr[0] = corr[3] = 0.5;
  const auto bad = is_spectral_independence_probability(r, corr, 1e-10);
  CHECK_FALSE(bad.holds);
  CHECK(std::abs(bad.product_dev - 0.25) < 1e-12);

  std::vector<double> none(r.points.size(), 0.0);
  none[3] = 1.0;
  CHECK_FALSE(is_spectral_independence_probability(r, none, 1e-10).holds);
  CHECK_THROWS_AS(is_spectral_independence_probability(r, {0.5, 0.5}, 1e-10), ContractViolation);
  CHECK_THROWS_AS(is_spectral_independence_probability(r, {0.5, 0.6, 0.0, 0.0}, 1e-10), ContractViolation);
  CHECK_THROWS_AS(is_spectral_independence_probability(r, {1.5, -0.5, 0.0, 0.0}, 1e-10), ContractViolation);
}

TEST_CASE("property: resolutions of scrambled instances") {
  Rng rng(12);
  const std::vector<std::vector<std::size_t>> lists{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}, {2, 2, 3}};
  for (const auto& dims : lists) {
    const FactorizationSpec base = FactorizationSpec::from_sites(SiteSpec::make(dims));
    const std::size_t d = base.ambient_dim();
    const MatrixC v = random_unitary(d, rng);
    std::vector<VectorC> legs;
    for (auto g : dims) legs.push_back(random_unit_vector(g, rng));
    const UnitalSpec u = UnitalSpec::certify(base.conjugated(v), v * product_vector(legs));
    const SpectralResolution r = spectral_resolution(u);
    CHECK(spectral_pattern_deviation(u, r) < 1e-8);

    std::size_t total = 0;
    MatrixC sum = MatrixC::Zero(d, d);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      total += p.mu;
      // label size predicts the dimension
      std::size_t want = 1;
      for (std::size_t a = 0; a < dims.size(); ++a)
        if ((p.label >> a) & 1u) want *= dims[a] - 1;
      CHECK(p.mu == want);
      sum += p.basis * p.basis.adjoint();
      for (std::size_t j = i + 1; j < r.points.size(); ++j)
        CHECK((p.basis.adjoint() * r.points[j].basis).norm() < 1e-8);
    }
    CHECK(total == d);
    CHECK((sum - identity(d)).norm() < 1e-8);

    const auto k = counting_map(r);
    for (std::size_t i = 0; i < k.size(); ++i)
      CHECK(k[i] == static_cast<std::size_t>(std::popcount(r.points[i].label)));
    for (Mask x = 0; x <= r.full_mask(); ++x) {
      const auto pr = spectral_projection(r, x);
      for (std::size_t i = 0; i < pr.size(); ++i) CHECK(r.points[pr[i]].label == (r.points[i].label & x));
    }
  }
}
