#pragma once

#include "factorlab/factorization.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace factorlab {

struct IndependenceResult {
  bool independent = false;
  double product_rule_dev = 0.0;  ///< max |<O,XYO> - <O,XO><O,YO>| over basis pairs
  double commutation_dev = 0.0;   ///< max |(XY - YX) q| on span((x v y) O), O the unit
  double max_deviation() const { return std::max(product_rule_dev, commutation_dev); }
};

IndependenceResult is_independent_under(const AlgebraBasis& x, const AlgebraBasis& y,
                                        const VectorC& omega, const Tolerance& tol = {});

enum class RaisedStatus { passed, failed, precondition_failed };

struct RaisedIndependenceReport {
  RaisedStatus status = RaisedStatus::precondition_failed;
  double hypothesis_dev = 0.0;
  double conclusion_dev = 0.0;  ///< only meaningful when the hypothesis holds
};

/// Hypothesis on the generator sets (span-closed under adjoint and product,
/// X Y O = Y X O and the product rule pairwise), then independence of the
/// generated algebras.
RaisedIndependenceReport verify_raised_independence(const std::vector<MatrixC>& x_gens,
                                                    const std::vector<MatrixC>& y_gens,
                                                    const VectorC& omega, const Tolerance& tol = {});

struct FactorizableWitness {
  Mask x = 0;
  MatrixC p;        ///< [span(x' O)], a minimal projection of x fixing O
  MatrixC p_prime;  ///< [span(x O)], a minimal projection of x' fixing O
};

struct VectorClassification {
  bool is_factorizable = false;
  bool is_multiplicative = false;
  bool is_additive = false;
  /// Per index: worst of the three factorizability test deviations.
  std::vector<double> deviations;
  std::vector<FactorizableWitness> witnesses;  ///< filled when factorizable
  double max_deviation() const;
};

/// Verdict threshold shared by the factorizability tests; a deviation above
/// kGrayFactor times this is a clear failure.
double factorizable_threshold(const Tolerance& tol);
inline constexpr double kGrayFactor = 10.0;

/// Three of the equivalent factorizability tests per index, required to
/// agree (InconsistencyError "factorizable-equivalence" otherwise).
VectorClassification is_factorizable(const VectorC& xi, const FactorizationSpec& f,
                                     const Tolerance& tol = {});

class UnitalSpec {
 public:
  /// Certifies |O| = 1 and independence of F_x, F_x' under the unit O for every x.
  /// Throws UnitCertificationError otherwise.
  static UnitalSpec certify(const FactorizationSpec& f, const VectorC& omega);

  const FactorizationSpec& factorization() const { return f_; }
  const VectorC& omega() const { return omega_; }
  const Tolerance& tolerance() const { return f_.tolerance(); }
  double certification_deviation() const { return cert_dev_; }

  /// Orthonormal basis of H_x = span(F_x O).
  const MatrixC& phi_range(Mask x) const;
  /// phi_x = [H_x].
  MatrixC phi(Mask x) const { return projector(phi_range(x)); }

  /// Tensor coordinates H_x (x) H_x' -> H anchored at the unit (leg 0 = H_x).
  const ProductFrame& local_split(Mask x) const;
  /// Tensor coordinates over the atoms, leg p = site p, anchored at O.
  const ProductFrame& partition_split() const;

 private:
  struct Cache;
  UnitalSpec(FactorizationSpec f, VectorC omega);

  FactorizationSpec f_;
  VectorC omega_;
  double cert_dev_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

bool is_multiplicative(const UnitalSpec& u, const VectorC& xi);
/// Worst per-index deviation of the direct multiplicative test.
double multiplicative_deviation(const UnitalSpec& u, const VectorC& xi);

bool is_additive(const UnitalSpec& u, const VectorC& xi);
double additive_deviation(const UnitalSpec& u, const VectorC& xi);

/// All three vector properties at once.
VectorClassification classify_vector(const UnitalSpec& u, const VectorC& xi);

/// A product vector for the atoms of f, built from minimal projections of the
/// atom factors and seeded random per-leg unit vectors.
VectorC find_factorizable_vector(const FactorizationSpec& f, std::uint64_t seed = kDefaultSeed);

}  // namespace factorlab
