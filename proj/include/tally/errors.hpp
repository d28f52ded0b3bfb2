#pragma once

#include <stdexcept>
#include <string>

namespace tally {

// Operational failure inside the engine. Parse problems are not exceptions;
// they are Diagnostic values (see parser.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The interpretation space at a requested domain size exceeds the configured
// cap. Counting never truncates: over the cap is an error, not an estimate.
class GuardExceeded : public Error {
 public:
  GuardExceeded(const std::string& total, unsigned long long guard)
      : Error("size guard exceeded: " + total + " > cap " + std::to_string(guard)),
        total_(total),
        guard_(guard) {}

  const std::string& total() const { return total_; }
  unsigned long long guard() const { return guard_; }

 private:
  std::string total_;
  unsigned long long guard_;
};

// Input uses a construct the requested operation cannot handle: function
// symbols in the enumerator, non-unary predicates in the cell counter,
// field-variable bounds at evaluation time.
class Unsupported : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace tally
