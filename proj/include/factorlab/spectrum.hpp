#pragma once

#include "factorlab/unital.hpp"

#include <vector>

namespace factorlab {

struct SpectralPoint {
  Mask label = 0;     ///< subset of atoms
  MatrixC basis;      ///< orthonormal columns spanning the joint eigenspace
  std::size_t mu = 0; ///< reference mass = eigenspace dimension
};

/// Joint eigenspaces of the commuting family phi_x, one point per subset
/// label, sorted by label bitmask. points[0] is the empty point.
struct SpectralResolution {
  std::size_t atom_count = 0;
  std::size_t ambient_dim = 0;
  std::vector<SpectralPoint> points;

  /// Index of the point with this label, or npos.
  std::size_t find(Mask label) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  Mask full_mask() const { return static_cast<Mask>((1u << atom_count) - 1); }
};

/// Refines atom by atom with phi of the other atoms, then checks the full
/// pattern phi_x = 1 on labels inside x and 0 elsewhere. Throws
/// InconsistencyError ("spectral-set") on failure.
SpectralResolution spectral_resolution(const UnitalSpec& u);

/// Worst deviation of phi_x from the label pattern, over every index x.
double spectral_pattern_deviation(const UnitalSpec& u, const SpectralResolution& r);

/// Point indices with label inside x.
std::vector<std::size_t> spectral_set(const SpectralResolution& r, Mask x);

/// K per point from the atom sum of indicators of S \ S_{a'}; throws
/// InconsistencyError ("counting-map") unless K equals the label size.
std::vector<std::size_t> counting_map(const SpectralResolution& r);

/// Point index of label A & x for every point; checks the preimage identity
/// and the composition law (InconsistencyError "spectral-projection").
std::vector<std::size_t> spectral_projection(const SpectralResolution& r, Mask x);

/// <E_s h, E_s g> per point.
std::vector<Complex> vector_measure(const SpectralResolution& r, const VectorC& h, const VectorC& g);

struct IndependenceProbabilityResult {
  bool holds = false;
  double empty_mass = 0.0;
  double product_dev = 0.0;  ///< worst |nu(A) - nu_1(A & x) nu_2(A \ x)|
};

/// `weights` must be a probability on r's points (sum 1 within 1e-12).
IndependenceProbabilityResult is_spectral_independence_probability(const SpectralResolution& r,
                                                                   const std::vector<double>& weights,
                                                                   double tol);

}  // namespace factorlab
