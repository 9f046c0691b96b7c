#pragma once

#include <stdexcept>
#include <string>

namespace mayerkit {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested enumeration size or expansion order is outside the supported
// window.  Ops that document a force flag let callers opt in past the cap.
struct size_limit_error : error {
  using error::error;
};

// A truncated series whose remainder bound exceeds the requested tolerance.
// Carries the smallest truncation order that would satisfy it.
struct tail_too_large_error : error {
  tail_too_large_error(const std::string& what, int required)
      : error(what), required_nmax(required) {}
  int required_nmax;
};

// Violation of a documented precondition (bad arguments, broken table, ...).
struct contract_violation : error {
  using error::error;
};

// Malformed configuration input (CLI flags, config file, CSV tables).
struct config_error : error {
  using error::error;
};

// Feature outside the v1 surface (e.g. witness search for non-constant
// activities).
struct unsupported_error : error {
  using error::error;
};

}  // namespace mayerkit
