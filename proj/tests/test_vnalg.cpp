#include "factorlab/error.hpp"
#include "factorlab/vnalg.hpp"
#include "testing.hpp"

#include <array>

using namespace factorlab;
using namespace factorlab::testing;

namespace {

AlgebraBasis local(std::size_t n, std::size_t m, bool left) {
  // M_n (x) 1_m when left, 1_n (x) M_m otherwise
  std::vector<MatrixC> gens;
  const std::size_t k = left ? n : m;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      gens.push_back(left ? kron(matrix_unit(n, i, j), identity(m)) : kron(identity(n), matrix_unit(m, i, j)));
  return AlgebraBasis::from_span(n * m, gens);
}

// Commutant by brute force: one Jacobi SVD of every commutator constraint.
MatrixC brute_commutant(const AlgebraBasis& x) {
  const std::size_t d = x.ambient_dim();
  const auto elems = x.elements();
  MatrixC sys(static_cast<Eigen::Index>(d * d * elems.size()), static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < elems.size(); ++i) {
    // vec(Y X - X Y) = (X^T (x) 1 - 1 (x) X) vec(Y)
    sys.middleRows(static_cast<Eigen::Index>(i * d * d), static_cast<Eigen::Index>(d * d)) =
        kron(elems[i].transpose(), identity(d)) - kron(identity(d), elems[i]);
  }
  Eigen::JacobiSVD<MatrixC> svd(sys, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > 1e-9 * std::max(1.0, s(0))) ++rank;
  return svd.matrixV().rightCols(sys.cols() - rank);
}

struct Shape {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (n, m): M_n (x) 1_m
  std::size_t dim = 0;
};

Shape random_shape(Rng& rng) {
  for (;;) {
    Shape s;
    const std::size_t count = pick(rng, 1, 3);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = pick(rng, 1, 3);
      const std::size_t m = pick(rng, 1, 2);
      s.blocks.emplace_back(n, m);
      s.dim += n * m;
    }
    if (s.dim >= 2 && s.dim <= 10) return s;
  }
}

MatrixC random_block_element(const Shape& s, Rng& rng) {
  MatrixC out = MatrixC::Zero(s.dim, s.dim);
  std::size_t at = 0;
  for (auto [n, m] : s.blocks) {
    out.block(at, at, n * m, n * m) = kron(random_gaussian(n, n, rng), identity(m));
    at += n * m;
  }
  return out;
}

}  // namespace

TEST_CASE("a diagonal matrix with distinct eigenvalues generates the diagonals") {
  MatrixC g = MatrixC::Zero(3, 3);
  g.diagonal() << 1, 2, 3;
  const std::array<MatrixC, 1> gens{g};
  const AlgebraBasis a = generate_algebra(3, gens);
  CHECK(a.dim() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.membership_residual(matrix_unit(3, i, i)) < 1e-10);
  CHECK(a.membership_residual(matrix_unit(3, 0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("generation by brute force pairwise products agrees") {
  Rng rng(12);
  for (int t = 0; t < 8; ++t) {
    const Shape s = random_shape(rng);
    const MatrixC v = random_unitary(s.dim, rng);
    const std::array<MatrixC, 2> gens{v * random_block_element(s, rng) * v.adjoint(),
                                      v * random_block_element(s, rng) * v.adjoint()};
    const AlgebraBasis a = generate_algebra(s.dim, gens);
    // brute force: span of all words up to length 2 d^2 via repeated squaring of the span
    std::vector<MatrixC> span{identity(s.dim), gens[0], gens[1], gens[0].adjoint(), gens[1].adjoint()};
    MatrixC frame;
    for (int round = 0; round < 8; ++round) {
      std::vector<MatrixC> next = span;
      for (const auto& x : span)
        for (const auto& y : span) next.push_back(x * y);
      MatrixC cols(static_cast<Eigen::Index>(s.dim * s.dim), static_cast<Eigen::Index>(next.size()));
      for (std::size_t i = 0; i < next.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = vec(next[i] / next[i].norm());
      frame = range_basis(cols, 1e-10);
      span.clear();
      for (Eigen::Index j = 0; j < frame.cols(); ++j) span.push_back(unvec(frame.col(j), s.dim));
    }
    CHECK(span_deviation(a.frame(), frame) < 1e-8);
    std::size_t want = 0;
    for (auto [n, m] : s.blocks) want += n * n;
    CHECK(a.dim() == want);
  }
}

TEST_CASE("commutant of M2 (x) 1_3 is 1_2 (x) M3") {
  const AlgebraBasis x = local(2, 3, true);
  const AlgebraBasis xp = commutant(x);
  CHECK(xp.dim() == 9);
  CHECK(span_deviation(xp, local(2, 3, false)) < 1e-10);
  CHECK(span_deviation(xp.frame(), brute_commutant(x)) < 1e-9);
}

TEST_CASE("commutant agrees with the brute-force constraint solve on random algebras") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const Shape s = random_shape(rng);
    const MatrixC v = random_unitary(s.dim, rng);
    const std::array<MatrixC, 2> gens{v * random_block_element(s, rng) * v.adjoint(),
                                      v * random_block_element(s, rng) * v.adjoint()};
    const AlgebraBasis a = generate_algebra(s.dim, gens);
    const AlgebraBasis ac = commutant(a);
    CHECK(span_deviation(ac.frame(), brute_commutant(a)) < 1e-8);
    std::size_t want = 0;
    for (auto [n, m] : s.blocks) want += m * m;
    CHECK(ac.dim() == want);
    CHECK(span_deviation(commutant(ac), a) < 1e-8);
  }
}

TEST_CASE("join and meet of the two legs of C^2 (x) C^2") {
  const AlgebraBasis a = local(2, 2, true);
  const AlgebraBasis b = local(2, 2, false);
  CHECK(join_algebras(a, b).dim() == 16);
  CHECK(meet_algebras(a, b).dim() == 1);
  CHECK(span_deviation(join_algebras(a, a), a) < 1e-12);
  CHECK(span_deviation(meet_algebras(a, AlgebraBasis::full(4)), a) < 1e-12);
}

TEST_CASE("diagonals meet the algebra of sigma_x in the scalars") {
  const std::array<MatrixC, 1> diag_gen{pauli_z()};
  const std::array<MatrixC, 1> x_gen{pauli_x()};
  const AlgebraBasis diag = generate_algebra(2, diag_gen);
  const AlgebraBasis xs = generate_algebra(2, x_gen);
  CHECK(diag.dim() == 2);
  CHECK(xs.dim() == 2);
  CHECK(meet_algebras(diag, xs).dim() == 1);
  CHECK(join_algebras(diag, xs).dim() == 4);
}

TEST_CASE("De Morgan laws on random pairs") {
  Rng rng(41);
  for (int t = 0; t < 8; ++t) {
    const Shape s = random_shape(rng);
    const MatrixC v = random_unitary(s.dim, rng);
    const std::array<MatrixC, 2> gens{v * random_block_element(s, rng) * v.adjoint(),
                                      v * random_block_element(s, rng) * v.adjoint()};
    const AlgebraBasis a = generate_algebra(s.dim, gens);
    const AlgebraBasis ac = commutant(a);
    MatrixC h = ac.project(random_gaussian(s.dim, s.dim, rng));
    h = (h + h.adjoint()).eval();
    const std::array<MatrixC, 2> bgens{gens[0] + gens[0].adjoint(), h};
    const AlgebraBasis b = generate_algebra(s.dim, bgens);
    const AlgebraBasis bc = commutant(b);
    CHECK(span_deviation(commutant(join_algebras(a, b)), meet_algebras(ac, bc)) < 1e-8);
    CHECK(span_deviation(commutant(meet_algebras(a, b)), join_algebras(ac, bc)) < 1e-8);
  }
}

TEST_CASE("factor tests") {
  const std::array<MatrixC, 1> z{pauli_z()};
  const FactorCertificate diag = is_factor(generate_algebra(2, z));
  CHECK_FALSE(diag.is_factor);
  CHECK(diag.center_dim == 2);
  const FactorCertificate m2 = is_factor(local(2, 3, true));
  CHECK(m2.is_factor);
  CHECK(m2.center_dim == 1);
  CHECK(is_factor(AlgebraBasis::scalars(3)).is_factor);
  CHECK(is_factor(AlgebraBasis::full(3)).is_factor);
}

TEST_CASE("minimal projection of M2 (x) 1_3 is Q (x) 1_3 with Q rank one") {
  const AlgebraBasis x = local(2, 3, true);
  const MatrixC p = minimal_projection(x, 5);
  CHECK((p * p - p).norm() < 1e-10);
  CHECK((p - p.adjoint()).norm() < 1e-10);
  CHECK(numerical_rank(p, 1e-9) == 3);
  CHECK(x.membership_residual(p) < 1e-10);
  const MatrixC q = reduced_operator(p, std::array<std::size_t, 2>{2, 3}, 0);
  CHECK(numerical_rank(q, 1e-9) == 1);
  CHECK((kron(q, identity(3)) - p).norm() < 1e-10);
  CHECK(compressed_dim(x, range_basis(p, 1e-9)) == 1);
}

TEST_CASE("tensor split recovers a conjugated known split") {
  Rng rng(6);
  const MatrixC v = random_unitary(4, rng);
  const AlgebraBasis x = local(2, 2, true).conjugated(v);
  const FactorCertificate c = tensor_split(x, 3);
  REQUIRE(c.split);
  CHECK(c.split->dim_g == 2);
  CHECK(c.split->dim_g_prime == 2);
  const MatrixC& u = c.split->unitary;
  CHECK((u.adjoint() * u - identity(4)).norm() < 1e-10);
  for (const auto& a : {pauli_x(), pauli_z(), matrix_unit(2, 0, 1)}) {
    const MatrixC moved = u.adjoint() * v * kron(a, identity(2)) * v.adjoint() * u;
    const MatrixC reduced = reduced_operator(moved, std::array<std::size_t, 2>{2, 2}, 0);
    CHECK((moved - kron(reduced, identity(2))).norm() < 1e-8);
  }
  CHECK_THROWS_AS(tensor_split(generate_algebra(2, std::array<MatrixC, 1>{pauli_z()})), ContractViolation);
}

TEST_CASE("from_frame rejects spans that are not algebras") {
  // span{1, sigma_x (x) sigma_x, sigma_z (x) 1}: products leave the span
  std::vector<MatrixC> elems{identity(4), kron(pauli_x(), pauli_x()), kron(pauli_z(), identity(2))};
  CHECK_THROWS_AS(AlgebraBasis::from_span(4, elems), ContractViolation);
  std::vector<MatrixC> no_unit{kron(pauli_z(), identity(2))};
  CHECK_THROWS_AS(AlgebraBasis::from_span(4, no_unit), ContractViolation);
  MatrixC upper = MatrixC::Zero(2, 2);
  upper(0, 1) = 1.0;
  std::vector<MatrixC> not_star{identity(2), upper};
  CHECK_THROWS_AS(AlgebraBasis::from_span(2, not_star), ContractViolation);
}

TEST_CASE("product frame over the two legs of C^2 (x) C^3") {
  Rng rng(14);
  const VectorC w = kron(random_unit_vector(2, rng), random_unit_vector(3, rng)).col(0);
  const std::array<AlgebraBasis, 2> legs{local(2, 3, true), local(2, 3, false)};
  const ProductFrame pf = product_frame(legs, w);
  CHECK(pf.leg_dims == std::vector<std::size_t>{2, 3});
  CHECK((pf.unitary.col(0) - w).norm() < 1e-10);
  CHECK((pf.unitary.adjoint() * pf.unitary - identity(6)).norm() < 1e-10);
  // an entangled anchor is not a product vector
  VectorC bell = VectorC::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const std::array<AlgebraBasis, 2> qubits{local(2, 2, true), local(2, 2, false)};
  CHECK_THROWS_AS(product_frame(qubits, bell), InconsistencyError);
}

TEST_CASE("reduced_operator inverts embed_leg") {
  Rng rng(15);
  const std::array<std::size_t, 3> dims{2, 3, 2};
  const MatrixC a = random_gaussian(3, 3, rng);
  const MatrixC e = embed_leg(a, dims, 1);
  CHECK((e - kron(kron(identity(2), a), identity(2))).norm() < 1e-12);
  CHECK((reduced_operator(e, dims, 1) - a).norm() < 1e-12);
}
