#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace efk {

/// Every failure the toolkit reports. The CLI maps each kind onto a stable
/// exit code through exit_code().
enum class ErrorKind {
  MalformedRecord,
  EmptyInput,
  DuplicateSample,
  NonPositiveGdp,
  EmptyMatrix,
  LengthMismatch,
  InvalidArgument,
  ZeroDenominator,
  NonConvergence,
  DegenerateSpectrum,
  UnknownEntity,
  NotCurrentlyExported,
  EntityMismatch,
  InsufficientAnalogues,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DuplicateSample: return "DuplicateSample";
    case ErrorKind::NonPositiveGdp: return "NonPositiveGdp";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::UnknownEntity: return "UnknownEntity";
    case ErrorKind::NotCurrentlyExported: return "NotCurrentlyExported";
    case ErrorKind::EntityMismatch: return "EntityMismatch";
    case ErrorKind::InsufficientAnalogues: return "InsufficientAnalogues";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// 1 = input, 2 = convergence, 3 = degenerate, 4 = insufficient data.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence:
    case ErrorKind::ZeroDenominator:
      return 2;
    case ErrorKind::DegenerateSpectrum:
      return 3;
    case ErrorKind::InsufficientAnalogues:
      return 4;
    default:
      return 1;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure pinned to a 1-based line number (the header is line 1).
class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error(ErrorKind::MalformedRecord, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientAnalogues : public Error {
 public:
  InsufficientAnalogues(std::size_t found, std::size_t required)
      : Error(ErrorKind::InsufficientAnalogues,
              "found " + std::to_string(found) + " analogues, need " + std::to_string(required)),
        found_(found) {}

  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t found_;
};

}  // namespace efk
