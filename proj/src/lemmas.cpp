#include "factorlab/lemmas.hpp"

#include "factorlab/error.hpp"
#include "factorlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace factorlab {

namespace {

constexpr double kNudge = 0x1p-40;
constexpr double kProbSlack = 1e-12;

void check_exclusions(const std::vector<double>& q) {
  if (q.size() > 64) throw CapacityError("at most 64 exclusion probabilities");
  for (double v : q) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractViolation("exclusion probabilities lie in [0, 1]");
  }
}

bool on_dyadic_boundary(double loc, std::size_t depth) {
  if (!(loc > 0.0 && loc < 1.0)) return false;
  const double scaled = std::ldexp(loc, static_cast<int>(depth));
  return scaled == std::floor(scaled);
}

}  // namespace

void DiscreteComplexMeasure::validate() const {
  if (locations.size() != atom_values.size()) throw ContractViolation("one value per atom location");
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (!(locations[i] >= 0.0 && locations[i] <= 1.0)) throw ContractViolation("atoms must lie in [0, 1]");
    if (i > 0 && !(locations[i] > locations[i - 1])) throw ContractViolation("atom locations must increase");
  }
}

double DiscreteComplexMeasure::total_variation() const {
  double tv = 0.0;
  for (const auto& a : atom_values) tv += std::abs(a);
  if (!density.empty()) {
    for (const auto& c : density) tv += std::abs(c) / static_cast<double>(density.size());
  }
  return tv;
}

DissectingResult dissecting_product_limit(const DiscreteComplexMeasure& nu, std::size_t max_depth) {
  nu.validate();
  if (max_depth < 1 || max_depth > kMaxDissectingDepth) {
    throw ContractViolation("dissecting depth must lie in [1, 22]");
  }
  DissectingResult out;
  std::vector<double> locs = nu.locations;
  for (auto& loc : locs) {
    if (on_dyadic_boundary(loc, max_depth)) {
      std::ostringstream note;
      note.precision(17);
      note << "atom at " << loc << " moved by 2^-40 off a dyadic boundary";
      loc += kNudge;
      out.notes.push_back(note.str());
    }
  }

  // integral of the density over [0, t]
  const std::size_t grid = nu.density.size();
  std::vector<Complex> prefix(grid + 1, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < grid; ++i) prefix[i + 1] = prefix[i] + nu.density[i] / static_cast<double>(grid);
  auto integral_to = [&](double t) -> Complex {
    if (grid == 0) return {0.0, 0.0};
    const double pos = t * static_cast<double>(grid);
    const auto cell = std::min(grid - 1, static_cast<std::size_t>(pos));
    return prefix[cell] + nu.density[cell] * ((pos - static_cast<double>(cell)) / static_cast<double>(grid));
  };

  Complex atoms_product(1.0, 0.0);
  for (const auto& a : nu.atom_values) atoms_product *= 1.0 + a;
  out.rhs = std::exp(integral_to(1.0)) * atoms_product;

  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    const std::size_t cells = std::size_t{1} << depth;
    std::vector<Complex> masses(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      const double lo = std::ldexp(static_cast<double>(k), -static_cast<int>(depth));
      const double hi = std::ldexp(static_cast<double>(k + 1), -static_cast<int>(depth));
      masses[k] = integral_to(hi) - integral_to(lo);
    }
    for (std::size_t i = 0; i < locs.size(); ++i) {
      const auto cell = std::min(cells - 1, static_cast<std::size_t>(std::ldexp(locs[i], static_cast<int>(depth))));
      masses[cell] += nu.atom_values[i];
    }
    out.partial_products.push_back(kernels::partition_product(masses));
  }
  return out;
}

RemainderResult remainder_inequality_check(const std::vector<double>& x) {
  if (x.empty()) throw ContractViolation("remainder inequality needs n >= 1");
  if (x.size() > 20) throw CapacityError("remainder inequality supports n <= 20");
  double prod = 1.0;
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractViolation("entries must be nonnegative");
    prod *= 1.0 + v;
    sum += v;
  }
  RemainderResult r;
  r.lhs = prod - 1.0 - sum;
  double least = std::numeric_limits<double>::infinity();
  for (double v : x) least = std::min(least, sum - v);
  r.rhs = least * sum * std::exp(sum);
  r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + r.rhs);
  return r;
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& q) {
  check_exclusions(q);
  std::vector<double> pmf(q.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double in = 1.0 - q[i];
    for (std::size_t k = i + 1; k > 0; --k) pmf[k] = pmf[k] * q[i] + pmf[k - 1] * in;
    pmf[0] *= q[i];
  }
  return pmf;
}

std::vector<double> poisson_binomial_cdf(const std::vector<double>& q) {
  const auto pmf = poisson_binomial_pmf(q);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  return cdf;
}

DominanceResult dominance_check(const std::vector<double>& q) {
  check_exclusions(q);
  DominanceResult r;
  r.cdf = poisson_binomial_cdf(q);
  double geo = 0.0;
  if (!q.empty()) {
    if (std::any_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) {
      geo = 0.0;
    } else {
      double logs = 0.0;
      for (double v : q) logs += std::log(v);
      geo = std::exp(logs / static_cast<double>(q.size()));
    }
  }
  r.cdf_tilde = poisson_binomial_cdf(std::vector<double>(q.size(), geo));
  r.worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < r.cdf.size(); ++m) r.worst_gap = std::max(r.worst_gap, r.cdf_tilde[m] - r.cdf[m]);
  r.holds = r.worst_gap <= kProbSlack;
  return r;
}

ClassicalityResult classicality_limit(double p0, std::size_t m, std::size_t k) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw ContractViolation("p0 must lie in (0, 1]");
  if (k < 1 || k > 1'000'000) throw ContractViolation("k must lie in [1, 10^6]");
  const double lp = std::log(p0);
  const double kd = static_cast<double>(k);
  ClassicalityResult r;

  // C(k,l) (1 - p0^{1/k})^l p0^{(k-l)/k}
  const double log_hit = p0 < 1.0 ? std::log(-std::expm1(lp / kd)) : -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l <= std::min(m, k); ++l) {
    const double ld = static_cast<double>(l);
    double term = lp * (kd - ld) / kd;
    if (l > 0) {
      if (p0 == 1.0) continue;
      term += std::lgamma(kd + 1.0) - std::lgamma(ld + 1.0) - std::lgamma(kd - ld + 1.0) + ld * log_hit;
    }
    r.exact += std::exp(term);
  }

  double power = 1.0;
  double series = 0.0;
  for (std::size_t l = 0; l <= m; ++l) {
    if (l > 0) power *= -lp / static_cast<double>(l);
    series += power;
  }
  r.limit = p0 * series;
  return r;
}

}  // namespace factorlab
