#pragma once

#include <stdexcept>
#include <string>

namespace sympal {

// An input failed an operation's mathematical preconditions (not positive
// definite, kernel not symplectic, commutator too large, ...). Carries the
// diagnostic residual that tripped the check. The CLI maps this to exit 2.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Malformed input (JSON schema violations, bad numbers). Exit 1 in the CLI.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sympal
