#pragma once

#include <stdexcept>
#include <string>

namespace nvcycle {

// Input violates an operation's domain (bad wavelength, negative quanta, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A configurable cap (quanta, mode count, recursion depth) was exceeded.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File or data structure violates a documented invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be parsed; message carries the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Analysis cannot proceed on this data (e.g. no blinking contrast).
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few samples for a statistically meaningful estimate.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to converge; message carries diagnostics.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad CLI / config input. Maps to process exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nvcycle
