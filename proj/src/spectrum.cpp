#include "factorlab/spectrum.hpp"

#include "factorlab/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace factorlab {

namespace {

constexpr double kLevelTol = 1e-8;

std::vector<std::size_t> label_map(const SpectralResolution& r, Mask x) {
  std::vector<std::size_t> out(r.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    out[i] = r.find(r.points[i].label & x);
    if (out[i] == SpectralResolution::npos) {
      throw InconsistencyError("spectral-projection",
                               "label " + std::to_string(r.points[i].label & x) + " has no spectral point");
    }
  }
  return out;
}

MatrixC concat(const MatrixC& a, const MatrixC& b) {
  MatrixC out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

std::size_t SpectralResolution::find(Mask label) const {
  auto it = std::lower_bound(points.begin(), points.end(), label,
                             [](const SpectralPoint& p, Mask l) { return p.label < l; });
  if (it == points.end() || it->label != label) return npos;
  return static_cast<std::size_t>(it - points.begin());
}

SpectralResolution spectral_resolution(const UnitalSpec& u) {
  const FactorizationSpec& f = u.factorization();
  const std::size_t d = f.ambient_dim();
  const Tolerance& tol = u.tolerance();

  std::vector<std::pair<Mask, MatrixC>> blocks{{Mask{0}, identity(d)}};
  for (std::size_t p = 0; p < f.atom_count(); ++p) {
    const Mask bit = Mask{1} << p;
    const MatrixC phi = u.phi(f.full_mask() & ~bit);
    std::vector<std::pair<Mask, MatrixC>> next;
    for (const auto& [label, q] : blocks) {
      const MatrixC c = q.adjoint() * phi * q;
      MatrixC kernel(d, 0);
      MatrixC range(d, 0);
      for (const auto& cl : hermitian_eig(c, tol)) {
        if (std::abs(cl.value) <= kLevelTol) {
          kernel = concat(kernel, q * cl.vectors);
        } else if (std::abs(cl.value - 1.0) <= kLevelTol) {
          range = concat(range, q * cl.vectors);
        } else {
          throw InconsistencyError("spectral-set", "phi compressed to a block has eigenvalue " +
                                                       std::to_string(cl.value));
        }
      }
      if (kernel.cols() > 0) next.emplace_back(label | bit, std::move(kernel));
      if (range.cols() > 0) next.emplace_back(label, std::move(range));
    }
    blocks = std::move(next);
  }

  SpectralResolution r;
  r.atom_count = f.atom_count();
  r.ambient_dim = d;
  for (auto& [label, q] : blocks) {
    const auto k = static_cast<std::size_t>(q.cols());
    r.points.push_back(SpectralPoint{label, std::move(q), k});
  }
  std::sort(r.points.begin(), r.points.end(),
            [](const SpectralPoint& a, const SpectralPoint& b) { return a.label < b.label; });

  std::size_t total = 0;
  for (const auto& pt : r.points) total += pt.mu;
  if (total != d) throw InconsistencyError("spectral-set", "eigenspace dimensions do not sum to the ambient");
  if (r.points.empty() || r.points.front().label != 0 || r.points.front().mu != 1) {
    throw InconsistencyError("spectral-set", "the empty point must be one-dimensional");
  }
  if (std::abs(std::abs(r.points.front().basis.col(0).dot(u.omega())) - 1.0) > kLevelTol) {
    throw InconsistencyError("spectral-set", "the empty point is not spanned by the unit");
  }
  const double dev = spectral_pattern_deviation(u, r);
  if (dev > kLevelTol) {
    throw InconsistencyError("spectral-set", "phi_x deviates from its label pattern by " + std::to_string(dev));
  }
  return r;
}

double spectral_pattern_deviation(const UnitalSpec& u, const SpectralResolution& r) {
  const FactorizationSpec& f = u.factorization();
  double worst = 0.0;
  for (Mask x = 0; x < f.index_size(); ++x) {
    const MatrixC phi = u.phi(x);
    for (const auto& pt : r.points) {
      const MatrixC image = phi * pt.basis;
      const bool inside = (pt.label & ~x) == 0;
      worst = std::max(worst, op_norm(inside ? MatrixC(image - pt.basis) : image));
    }
  }
  return worst;
}

std::vector<std::size_t> spectral_set(const SpectralResolution& r, Mask x) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if ((r.points[i].label & ~x) == 0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> counting_map(const SpectralResolution& r) {
  std::vector<std::size_t> k(r.points.size(), 0);
  for (std::size_t a = 0; a < r.atom_count; ++a) {
    const Mask other = r.full_mask() & ~(Mask{1} << a);
    std::vector<bool> inside(r.points.size(), false);
    for (auto i : spectral_set(r, other)) inside[i] = true;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      if (!inside[i]) ++k[i];
    }
  }
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (k[i] != static_cast<std::size_t>(std::popcount(r.points[i].label))) {
      throw InconsistencyError("counting-map", "K differs from the label size at label " +
                                                   std::to_string(r.points[i].label));
    }
  }
  return k;
}

std::vector<std::size_t> spectral_projection(const SpectralResolution& r, Mask x) {
  const Mask full = r.full_mask();
  const std::vector<std::size_t> pr = label_map(r, x);
  for (Mask y = 0; y <= full; ++y) {
    // pr_x^{-1}(S_y) = S_{y v x'}
    std::vector<std::size_t> pre;
    for (std::size_t i = 0; i < pr.size(); ++i) {
      if ((r.points[pr[i]].label & ~y) == 0) pre.push_back(i);
    }
    if (pre != spectral_set(r, y | (full & ~x))) {
      throw InconsistencyError("spectral-projection", "preimage identity fails for y = " + std::to_string(y));
    }
    const std::vector<std::size_t> pr_y = label_map(r, y);
    const std::vector<std::size_t> pr_xy = label_map(r, x & y);
    for (std::size_t i = 0; i < pr.size(); ++i) {
      if (pr_y[pr[i]] != pr_xy[i]) {
        throw InconsistencyError("spectral-projection", "composition law fails for y = " + std::to_string(y));
      }
    }
  }
  return pr;
}

std::vector<Complex> vector_measure(const SpectralResolution& r, const VectorC& h, const VectorC& g) {
  if (static_cast<std::size_t>(h.size()) != r.ambient_dim || static_cast<std::size_t>(g.size()) != r.ambient_dim) {
    throw ContractViolation("vector_measure: dimension mismatch");
  }
  std::vector<Complex> out;
  out.reserve(r.points.size());
  for (const auto& pt : r.points) {
    const VectorC a = pt.basis.adjoint() * h;
    const VectorC b = pt.basis.adjoint() * g;
    out.push_back(a.dot(b));
  }
  return out;
}

IndependenceProbabilityResult is_spectral_independence_probability(const SpectralResolution& r,
                                                                   const std::vector<double>& weights,
                                                                   double tol) {
  if (weights.size() != r.points.size()) throw ContractViolation("one weight per spectral point is required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ContractViolation("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ContractViolation("weights must sum to 1");

  IndependenceProbabilityResult res;
  const std::size_t empty = r.find(0);
  res.empty_mass = empty == SpectralResolution::npos ? 0.0 : weights[empty];
  const Mask full = r.full_mask();
  for (Mask x = 0; x <= full; ++x) {
    std::map<Mask, double> inner;
    std::map<Mask, double> outer;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      inner[r.points[i].label & x] += weights[i];
      outer[r.points[i].label & ~x] += weights[i];
    }
    for (const auto& [b, wb] : inner) {
      for (const auto& [c, wc] : outer) {
        const std::size_t at = r.find(b | c);
        const double joint = at == SpectralResolution::npos ? 0.0 : weights[at];
        res.product_dev = std::max(res.product_dev, std::abs(joint - wb * wc));
      }
    }
  }
  res.holds = res.empty_mass > tol && res.product_dev <= tol;
  return res;
}

}  // namespace factorlab
