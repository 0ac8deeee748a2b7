#pragma once

#include <stdexcept>
#include <string>

namespace zyglab {

/// Failure categories raised by the library. The harness maps them onto
/// exit codes and report entries.
enum class ErrorKind {
  point_outside_disc,
  evaluation_singularity,
  convergence_failure,
  bad_spec,
  not_in_space,
  degenerate_composite,
  degenerate_parameters,
  numerical_singularity,
  config_invalid,
  io_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::point_outside_disc: return "PointOutsideDisc";
    case ErrorKind::evaluation_singularity: return "EvaluationSingularity";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::bad_spec: return "BadSpec";
    case ErrorKind::not_in_space: return "NotInSpace";
    case ErrorKind::degenerate_composite: return "DegenerateComposite";
    case ErrorKind::degenerate_parameters: return "DegenerateParameters";
    case ErrorKind::numerical_singularity: return "NumericalSingularity";
    case ErrorKind::config_invalid: return "ConfigInvalid";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zyglab
