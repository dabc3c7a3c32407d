#pragma once

#include <stdexcept>
#include <string>

namespace mirrorprox {

// Caller broke a documented precondition (dimension mismatch, infeasible
// input, unsupported block structure, ...).
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A mirror map was evaluated outside its domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class NumericalDegeneracy : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed problem or trace file. `field()` names the offending key (or is
// empty when the failure is not tied to one).
class ParseError : public std::runtime_error {
public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// A well-formed file whose contents violate a problem invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mirrorprox
