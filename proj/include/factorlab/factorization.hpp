#pragma once

#include "factorlab/vnalg.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace factorlab {

/// Subset of atoms; bit i is site i.
using Mask = std::uint32_t;

inline constexpr std::size_t kMaxSites = 6;

struct SiteSpec {
  std::vector<std::size_t> dims;

  /// Checks 1 <= count <= kMaxSites, every d_p >= 2 and the ambient capacity.
  static SiteSpec make(std::vector<std::size_t> dims);

  std::size_t count() const { return dims.size(); }
  std::size_t ambient_dim() const;
};

/// One verified law of a family, as it appears in reports.
struct LawCheck {
  std::string law;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The Boolean family A -> F_A of a site decomposition, optionally
/// conjugated by a global unitary V (F_A = V (M_A (x) 1) V*). Factors are
/// built on first use and cached; copies share the cache.
class FactorizationSpec {
 public:
  static FactorizationSpec from_sites(const SiteSpec& sites, const Tolerance& tol = {});

  /// The same family conjugated by `v` on top of the current embedding.
  FactorizationSpec conjugated(const MatrixC& v) const;

  const SiteSpec& sites() const { return state_->sites; }
  const MatrixC& embedding() const { return state_->embedding; }
  const Tolerance& tolerance() const { return state_->tol; }

  std::size_t atom_count() const { return state_->sites.count(); }
  std::size_t ambient_dim() const { return state_->sites.ambient_dim(); }
  Mask full_mask() const { return static_cast<Mask>((1u << atom_count()) - 1); }
  std::size_t index_size() const { return std::size_t{1} << atom_count(); }
  Mask complement(Mask a) const { return full_mask() & ~a; }

  /// F_A; throws ContractViolation if `a` has bits outside the atom set.
  const AlgebraBasis& factor(Mask a) const;

 private:
  struct State {
    SiteSpec sites;
    MatrixC embedding;
    Tolerance tol;
    std::mutex lock;
    std::map<Mask, std::shared_ptr<const AlgebraBasis>> cache;
  };
  explicit FactorizationSpec(std::shared_ptr<State> s) : state_(std::move(s)) {}
  std::shared_ptr<State> state_;
};

/// Factor, complement, meet, join and distributivity laws over the index
/// (all triples, or `sample` seeded triples once the index exceeds 16).
std::vector<LawCheck> verify_factorization(const FactorizationSpec& f, std::uint64_t seed = kDefaultSeed,
                                           std::size_t sample = 50);

/// Same laws for an arbitrary family given as a list: involution and
/// meet/join closure are tested by searching the list for a matching span.
std::vector<LawCheck> verify_family(const std::vector<AlgebraBasis>& family, const Tolerance& tol = {});

/// F1 (x) F2: sites concatenated, atoms of f2 shifted past those of f1.
FactorizationSpec product_factorization(const FactorizationSpec& f1, const FactorizationSpec& f2);

/// Sites from a finite product probability space together with the unit
/// (sqrt p(w))_w per site.
std::pair<FactorizationSpec, VectorC> build_from_product_probability(
    const std::vector<std::vector<double>>& outcome_probs);

/// Deviation threshold used for span-level laws of a family.
inline constexpr double kSpanLawTol = 1e-8;

}  // namespace factorlab
