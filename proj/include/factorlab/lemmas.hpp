#pragma once

#include "factorlab/matcore.hpp"

#include <string>
#include <vector>

namespace factorlab {

/// Complex measure on [0,1]: atoms at strictly increasing locations plus a
/// piecewise-constant density on a uniform grid (empty = no density).
struct DiscreteComplexMeasure {
  std::vector<double> locations;
  std::vector<Complex> atom_values;
  std::vector<Complex> density;

  void validate() const;
  double total_variation() const;
};

struct DissectingResult {
  std::vector<Complex> partial_products;  ///< index k is depth k + 1
  Complex rhs;
  std::vector<std::string> notes;          ///< atoms nudged off dyadic boundaries
};

inline constexpr std::size_t kMaxDissectingDepth = 22;

/// prod over dyadic cells of (1 + nu(cell)) per depth, and
/// exp(nu of the atomless part) * prod (1 + atom).
DissectingResult dissecting_product_limit(const DiscreteComplexMeasure& nu, std::size_t max_depth);

struct RemainderResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = prod(1 + x) - 1 - sum x, rhs = min_j (S - x_j) * S * e^S.
RemainderResult remainder_inequality_check(const std::vector<double>& x);

/// CDF of the number of included indices, index i included with
/// probability 1 - q[i]. Entry m is P(count <= m).
std::vector<double> poisson_binomial_pmf(const std::vector<double>& q);
std::vector<double> poisson_binomial_cdf(const std::vector<double>& q);

struct DominanceResult {
  bool holds = false;
  std::vector<double> cdf;        ///< exclusion vector q
  std::vector<double> cdf_tilde;  ///< uniform exclusion (prod q)^(1/n)
  double worst_gap = 0.0;         ///< max(cdf_tilde - cdf)
};

DominanceResult dominance_check(const std::vector<double>& q);

struct ClassicalityResult {
  double exact = 0.0;
  double limit = 0.0;
};

ClassicalityResult classicality_limit(double p0, std::size_t m, std::size_t k);

}  // namespace factorlab
