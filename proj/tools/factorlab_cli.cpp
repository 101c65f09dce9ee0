// factorlab: generate instances, run verification suites, classify to Fock form.
//
// exit codes: 0 all checks pass, 1 some check failed, 2 bad input or capacity,
// 3 inconsistency / certification failure.

#include "factorlab/error.hpp"
#include "factorlab/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace factorlab;

namespace {

constexpr const char* kVersion = "factorlab 1.0.0";

struct Failure {
  int code;
  std::string law;
  std::string message;
};

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ContractViolation("cannot write " + out);
  f << text;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot read instance file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("instance is not valid JSON: ") + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed instance: ") + e.what());
  }
}

std::vector<std::size_t> parse_sites(const std::string& s) {
  std::vector<std::size_t> dims;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw ContractViolation("bad site dimension '" + item + "'");
    }
    if (used != item.size() || v < 0) throw ContractViolation("bad site dimension '" + item + "'");
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

int cmd_generate(const std::string& sites, std::uint64_t seed, const std::string& unit,
                 std::optional<std::uint64_t> conj, const std::string& out) {
  const Instance inst = make_instance(parse_sites(sites), unit_mode_from_string(unit), seed, conj);
  if (inst.unit) {
    // refuse to write an instance whose unit does not certify
    const FactorizationSpec f = instance_factorization(inst);
    UnitalSpec::certify(f, *inst.unit);
  }
  emit(instance_to_json(inst), out);
  return 0;
}

int cmd_verify(const std::string& path, const std::string& suite, double tol, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = load_instance(path);
  SuiteOptions opt;
  opt.seed = inst.seed;
  opt.tol_factor = tol;
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else {
    names.push_back(suite);
  }
  json suites = json::array();
  bool pass = true;
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, inst, opt);
    pass = pass && r.pass();
    suites.push_back(suite_to_json(r));
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(json{{"version", kVersion},
            {"instance", instance_to_json(inst)},
            {"tol_factor", tol},
            {"suites", std::move(suites)},
            {"pass", pass},
            {"wall_time", wall}},
       out);
  return pass ? 0 : 1;
}

int cmd_classify(const std::string& path, double tol, const std::string& out) {
  const Instance inst = load_instance(path);
  const Tolerance t = Tolerance{}.scaled(tol);
  const FactorizationSpec f = instance_factorization(inst, t);
  const VectorC omega = instance_unit(inst, f);
  const UnitalSpec u = UnitalSpec::certify(f, omega);
  const SpectralResolution r = spectral_resolution(u);
  const FockClassification c = classify_to_fock(u, r, inst.seed);
  json j = fock_to_json(c.space);
  j["version"] = kVersion;
  j["unit_discovered"] = !inst.unit.has_value();
  j["unit"] = matrix_to_json(omega);
  j["spectrum"] = resolution_to_json(r);
  j["certificates"] = {{"vacuum", c.vacuum_dev}, {"exp", c.exp_dev}, {"conjugation", c.conjugation_dev}};
  j["unitary"] = matrix_to_json(c.unitary);
  emit(j, out);
  return 0;
}

int report_failure(const Failure& f) {
  json j{{"error", {{"law", f.law}, {"message", f.message}}}};
  std::cerr << j.dump() << "\n";
  return f.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional factorization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string sites;
  std::string unit = "product";
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t conj_seed = 0;
  std::string out;
  auto* gen = app.add_subcommand("generate", "write an instance file");
  gen->add_option("--sites", sites, "comma-separated site dimensions, e.g. 2,3")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--unit", unit, "product | random_multiplicative | none");
  auto* conj_opt = gen->add_option("--conjugate-seed", conj_seed, "scramble by a seeded global unitary");
  gen->add_option("--out", out, "output path (default stdout)");

  std::string path;
  std::string suite = "all";
  double tol = 1.0;
  auto* ver = app.add_subcommand("verify", "run verification suites on an instance");
  ver->add_option("instance", path, "instance JSON")->required();
  ver->add_option("--suite", suite, "algebra | factorization | unital | spectrum | fock | lemmas | all")
      ->check(CLI::IsMember({"algebra", "factorization", "unital", "spectrum", "fock", "lemmas", "all"}));
  ver->add_option("--tol", tol, "multiplies every tolerance")->check(CLI::PositiveNumber);
  ver->add_option("--out", out, "report path (default stdout)");

  auto* cls = app.add_subcommand("classify", "classify an instance to discrete Fock form");
  cls->add_option("instance", path, "instance JSON")->required();
  cls->add_option("--tol", tol, "multiplies every tolerance")->check(CLI::PositiveNumber);
  cls->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      std::optional<std::uint64_t> c;
      if (*conj_opt) c = conj_seed;
      return cmd_generate(sites, seed, unit, c, out);
    }
    if (*ver) return cmd_verify(path, suite, tol, out);
    return cmd_classify(path, tol, out);
  } catch (const UnitCertificationError& e) {
    return report_failure({3, "unit-certification", e.what()});
  } catch (const ContractViolation& e) {
    return report_failure({2, "contract", e.what()});
  } catch (const CapacityError& e) {
    return report_failure({2, "capacity", e.what()});
  } catch (const InconsistencyError& e) {
    return report_failure({3, e.law(), e.what()});
  } catch (const InternalError& e) {
    return report_failure({3, "internal", e.what()});
  }
}
