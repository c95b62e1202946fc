#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slhjb {

/// Failure categories shared by every module. The CLI maps them to exit codes.
enum class ErrorKind {
  bad_params = 1,
  not_on_boundary,
  outside_tube,
  no_convergence,
  out_of_layer,
  regularity_violation,
  outside_domain,
  location_failure,
  unstable,
  no_crossing,
  too_large,
  config_error,
  io_error,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::bad_params: return "BadParams";
    case ErrorKind::not_on_boundary: return "NotOnBoundary";
    case ErrorKind::outside_tube: return "OutsideTube";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::out_of_layer: return "OutOfLayer";
    case ErrorKind::regularity_violation: return "RegularityViolation";
    case ErrorKind::outside_domain: return "OutsideDomain";
    case ErrorKind::location_failure: return "LocationFailure";
    case ErrorKind::unstable: return "Unstable";
    case ErrorKind::no_crossing: return "NoCrossing";
    case ErrorKind::too_large: return "TooLarge";
    case ErrorKind::config_error: return "ConfigError";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the category prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace slhjb
