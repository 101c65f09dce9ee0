#pragma once

#include "factorlab/factorization.hpp"
#include "factorlab/fock.hpp"

#include <json.hpp>

namespace factorlab {

using json = nlohmann::json;

/// {"rows": n, "cols": m, "data": [[re, im], ...]} in row-major order.
json matrix_to_json(const MatrixC& m);
/// Throws ContractViolation on malformed input or non-finite entries.
MatrixC matrix_from_json(const json& j);

json algebra_to_json(const AlgebraBasis& x);
json law_to_json(const LawCheck& c);
json resolution_to_json(const SpectralResolution& r);
json fock_to_json(const FockSpace& fk);

}  // namespace factorlab
