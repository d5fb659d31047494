#pragma once

#include <stdexcept>
#include <string>

namespace sara {

enum class ErrorKind {
  BandwidthNonPositive,
  BandwidthTooSmall,
  BandwidthTooLarge,
  DegenerateDesign,
  InvalidChangepoints,
  InvalidSeries,
  SeriesTooShort,
  SeriesTooLong,
  InvalidSpec,
  InvalidConfig,
  ParseError,
  NonFiniteValue,
  EmptyGroup,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by the data handed in, as opposed to how the
  /// run was configured.
  bool is_input_error() const noexcept {
    switch (kind_) {
      case ErrorKind::ParseError:
      case ErrorKind::NonFiniteValue:
      case ErrorKind::EmptyGroup:
      case ErrorKind::InvalidSeries:
      case ErrorKind::IoError:
      case ErrorKind::SeriesTooShort:
      case ErrorKind::SeriesTooLong:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BandwidthNonPositive: return "BandwidthNonPositive";
    case ErrorKind::BandwidthTooSmall: return "BandwidthTooSmall";
    case ErrorKind::BandwidthTooLarge: return "BandwidthTooLarge";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::InvalidChangepoints: return "InvalidChangepoints";
    case ErrorKind::InvalidSeries: return "InvalidSeries";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::SeriesTooLong: return "SeriesTooLong";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sara
