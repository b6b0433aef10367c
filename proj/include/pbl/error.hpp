#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbl {

enum class ErrorKind {
  configuration,
  alignment,
  insufficient_support,
  out_of_support,
  domain,
  incompatible_coefficients,
  coverage,
  monotonicity_violation,
  non_convergence,
  invariant_violation,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::insufficient_support: return "insufficient_support";
    case ErrorKind::out_of_support: return "out_of_support";
    case ErrorKind::domain: return "domain";
    case ErrorKind::incompatible_coefficients: return "incompatible_coefficients";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::monotonicity_violation: return "monotonicity_violation";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  /// Insufficient-support errors carry the extent (time units from the origin) that would have been needed.
  Error(ErrorKind kind, const std::string& what, double required_extent)
      : Error(kind, what) {
    required_extent_ = required_extent;
  }

  ErrorKind kind() const noexcept { return kind_; }
  double required_extent() const noexcept { return required_extent_; }

  /// Configuration and schema problems map to a distinct process exit code.
  bool is_configuration() const noexcept {
    return kind_ == ErrorKind::configuration || kind_ == ErrorKind::incompatible_coefficients;
  }

 private:
  ErrorKind kind_;
  double required_extent_ = 0.0;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what, double required_extent) {
  throw Error(kind, what, required_extent);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace pbl
