#include "factorlab/json_io.hpp"

#include "factorlab/error.hpp"

#include <cmath>

namespace factorlab {

json matrix_to_json(const MatrixC& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

MatrixC matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ContractViolation("matrix JSON needs rows, cols and data");
  }
  if (!j.at("rows").is_number_integer() || !j.at("cols").is_number_integer()) {
    throw ContractViolation("matrix JSON: rows and cols must be integers");
  }
  const auto rows = j.at("rows").get<std::int64_t>();
  const auto cols = j.at("cols").get<std::int64_t>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<std::int64_t>(data.size()) != rows * cols) {
    throw ContractViolation("matrix JSON: data length must be rows * cols");
  }
  MatrixC m(rows, cols);
  for (std::int64_t k = 0; k < rows * cols; ++k) {
    const json& e = data[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ContractViolation("matrix JSON entries are [re, im] pairs");
    }
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw ContractViolation("matrix JSON entry is not finite");
    m(k / cols, k % cols) = Complex(re, im);
  }
  return m;
}

json algebra_to_json(const AlgebraBasis& x) {
  json basis = json::array();
  for (const auto& b : x.elements()) basis.push_back(matrix_to_json(b));
  return json{{"ambient_dim", x.ambient_dim()}, {"basis", std::move(basis)}};
}

json law_to_json(const LawCheck& c) {
  return json{{"law", c.law}, {"max_deviation", c.max_deviation}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

json resolution_to_json(const SpectralResolution& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({{"label", p.label}, {"dim", p.basis.cols()}, {"mu", p.mu}});
  return json{{"atoms", r.atom_count}, {"points", std::move(pts)}};
}

json fock_to_json(const FockSpace& fk) {
  return json{{"legs", fk.leg_dims()}, {"masses", fk.masses()}, {"block_order", "popcount-lex"},
              {"total_dim", fk.total_dim()}};
}

}  // namespace factorlab
