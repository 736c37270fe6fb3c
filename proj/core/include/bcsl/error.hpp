#pragma once

#include <stdexcept>
#include <string>

namespace bcsl {

// Bad numeric input: negative mass, broken normalization, wrong shapes.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller misuse: overlapping axis groups, unknown names, a == b where forbidden.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain failures: violated preconditions, infeasible configs, Markov violations.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested work exceeds a configured cap (grid size, enumeration size).
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bcsl
