#pragma once

#include <stdexcept>
#include <string>

namespace factorlab {

/// Caller broke a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested size exceeds a configured capacity.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Two routes that must agree did not (usually a tolerance breakdown).
/// Carries the name of the law that failed.
class InconsistencyError : public std::runtime_error {
 public:
  InconsistencyError(std::string law, const std::string& what)
      : std::runtime_error(law + ": " + what), law_(std::move(law)) {}
  const std::string& law() const noexcept { return law_; }

 private:
  std::string law_;
};

/// An explicit unit failed certification as a factorizable norm-one vector.
class UnitCertificationError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Should be unreachable; signals a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace factorlab
