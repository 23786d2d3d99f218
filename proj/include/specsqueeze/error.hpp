#pragma once

#include <stdexcept>
#include <string>

namespace specsqueeze {

enum class ErrorKind {
  NonPhysical,
  DomainError,
  EigenFailure,
  QuadratureFailure,
  DegenerateFrequency,
  SingularMatrix,
  Unstable,
  UnknownPreset,
  ConfigError,
  IOError,
  MissingColumn,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::DegenerateFrequency: return "DegenerateFrequency";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::Unstable: return "Unstable";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IOError: return "IOError";
    case ErrorKind::MissingColumn: return "MissingColumn";
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

}  // namespace specsqueeze
