#pragma once

#include <stdexcept>
#include <string>

namespace bpt {

// Invalid configuration: bad kernel spec, unknown benchmark, malformed config file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure that survived jitter escalation (non-PSD matrices, zero
// posterior scale).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse, e.g. asking for a recommendation before any query was made.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bpt
