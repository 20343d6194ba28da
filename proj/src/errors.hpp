#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bds {

enum class ErrorKind {
  Param,
  Pole,
  InvolutionUndefined,
  Unbounded,
  StepTooLarge,
  DivisionByZero,
  NotMirrorSymmetric,
  Convergence,
  DegenerateBins,
  Lattice,
  Config,
  Io,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure raised by the library. `subject` names the offending item:
// a parameter ("p"), a lattice point ("x=3"), a config key.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string subject, const std::string& message)
      : std::runtime_error(message), kind_(kind), subject_(std::move(subject)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorKind kind_;
  std::string subject_;
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Param: return "ParamError";
    case ErrorKind::Pole: return "PoleError";
    case ErrorKind::InvolutionUndefined: return "InvolutionUndefined";
    case ErrorKind::Unbounded: return "UnboundedError";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::NotMirrorSymmetric: return "NotMirrorSymmetric";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::DegenerateBins: return "DegenerateBins";
    case ErrorKind::Lattice: return "LatticeError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace bds
