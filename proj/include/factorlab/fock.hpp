#pragma once

#include "factorlab/spectrum.hpp"

#include <vector>

namespace factorlab {

struct FockBlock {
  Mask subset = 0;
  std::size_t offset = 0;  ///< first coordinate of the block
  std::size_t dim = 0;     ///< prod of leg dims over the subset
  double weight = 1.0;     ///< prod of masses over the subset
};

/// Discrete Fock space over n atoms in orthonormal coordinates: block F holds
/// sqrt(weight_F) times the component in (x)_{f in F} F_f. Blocks are ordered
/// by (popcount, bitmask); inside a block the multi-index is lexicographic with
/// the lowest atom most significant.
class FockSpace {
 public:
  static FockSpace make(std::vector<std::size_t> leg_dims, std::vector<double> masses);

  std::size_t atom_count() const { return leg_dims_.size(); }
  const std::vector<std::size_t>& leg_dims() const { return leg_dims_; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<FockBlock>& blocks() const { return blocks_; }
  std::size_t total_dim() const { return total_; }

  const FockBlock& block(Mask subset) const;
  VectorC vacuum() const;

 private:
  std::vector<std::size_t> leg_dims_;
  std::vector<double> masses_;
  std::vector<FockBlock> blocks_;
  std::vector<std::size_t> block_of_;  // subset -> position in blocks_
  std::size_t total_ = 0;
};

inline constexpr std::size_t kMaxFockAtoms = 5;

/// Permutation taking tensor coordinates of (x)_a (C e_a (+) F_a), leg a of
/// dimension 1 + leg_dims[a] with e_a first, onto Fock coordinates.
MatrixC bracket_opening(const FockSpace& fk);

struct DiscreteFock {
  FockSpace space;
  FactorizationSpec view;  ///< F_A = full algebra of the Fock space over A
  VectorC vacuum;
  MatrixC opening;         ///< bracket_opening(space)
};

DiscreteFock build_dfock(const std::vector<std::size_t>& leg_dims, const std::vector<double>& masses);

/// Block F component (x)_{f in F} u_f.
VectorC exponential_vector(const FockSpace& fk, const std::vector<VectorC>& u);

/// prod_a (1 + m_a <u_a, v_a>), cross-checked against the direct inner product
/// (InconsistencyError "exp-inner-product").
Complex exp_inner_product(const FockSpace& fk, const std::vector<VectorC>& u, const std::vector<VectorC>& v);

/// Exp(g) = (x)_p (unit_p + g_p) through the partition split, for g in the
/// first chaos. Throws ContractViolation when g has mass off the K = 1 points.
VectorC exp_map(const UnitalSpec& u, const SpectralResolution& r, const VectorC& g);

/// Per-atom leg components of a first-chaos vector (coordinates 1.. of leg a).
std::vector<VectorC> first_chaos_components(const UnitalSpec& u, const VectorC& g);

struct FockClassification {
  FockSpace space;
  MatrixC unitary;  ///< Fock coordinates -> H
  double vacuum_dev = 0.0;
  double exp_dev = 0.0;
  double conjugation_dev = 0.0;
};

/// Unit masses, leg a of dimension dim H_a - 1. Throws InconsistencyError
/// ("fock-classification" / "fock-conjugation") when a certificate fails.
FockClassification classify_to_fock(const UnitalSpec& u, const SpectralResolution& r,
                                    std::uint64_t seed = kDefaultSeed);

/// The four equivalent conditions of blackness, evaluated on the instance.
struct BlackConditions {
  bool only_unit_multiplicative = true;
  bool only_zero_additive = true;
  bool only_trivial_independence = true;
  bool counting_infinite = true;
  bool consistent() const;
};

BlackConditions black_conditions(const UnitalSpec& u, const SpectralResolution& r);

}  // namespace factorlab
