#pragma once

#include "factorlab/fock.hpp"
#include "factorlab/json_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace factorlab {

enum class UnitMode { product, random_multiplicative, explicit_unit, none };

std::string to_string(UnitMode m);
/// Throws ContractViolation on an unknown name.
UnitMode unit_mode_from_string(const std::string& s);

struct Instance {
  SiteSpec sites;
  UnitMode unit_mode = UnitMode::product;
  std::optional<VectorC> unit;  ///< in ambient coordinates, after scrambling
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> conjugate_seed;
};

/// Builds the unit for product / random_multiplicative modes (scrambled when
/// conjugate_seed is set). `none` leaves the unit out.
Instance make_instance(const std::vector<std::size_t>& dims, UnitMode mode, std::uint64_t seed,
                       std::optional<std::uint64_t> conjugate_seed = std::nullopt);

json instance_to_json(const Instance& inst);
/// Throws ContractViolation on malformed input.
Instance instance_from_json(const json& j);

/// Family with the instance's scrambling applied.
FactorizationSpec instance_factorization(const Instance& inst, const Tolerance& tol = {});

/// The unit of the instance, discovered with find_factorizable_vector when
/// absent (normalised, phase fixed so the first large entry is positive).
VectorC instance_unit(const Instance& inst, const FactorizationSpec& f);

struct SuiteOptions {
  std::uint64_t seed = kDefaultSeed;
  double tol_factor = 1.0;
  std::size_t random_algebras = 50;
  std::size_t random_vectors = 200;
};

struct SuiteResult {
  std::string name;
  std::vector<LawCheck> checks;
  bool pass() const;
};

/// Suite names in report order.
const std::vector<std::string>& suite_names();

/// Runs one suite. Inconsistency and certification errors propagate.
SuiteResult run_suite(const std::string& name, const Instance& inst, const SuiteOptions& opt);

json suite_to_json(const SuiteResult& s);

/// Standard site lists used by the acceptance runs.
const std::vector<std::vector<std::size_t>>& standard_site_lists();

}  // namespace factorlab
