#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mhfit {

enum class ErrorKind {
  Parse,
  LabelRange,
  Schema,
  EmptyInput,
  Io,
  VersionMismatch,
  Truncated,
  Checksum,
  Corrupt,
  InvalidSpec,
  EmptyAfterFilter,
  NoWindows,
  Precondition,
  Dimension,
  NonFinite,
  Divergence,
  LengthMismatch,
  UnknownLabel,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind lets callers (and tests)
/// distinguish e.g. a truncated file from a checksum failure without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mhfit
