#include "mhfit/activity.hpp"

#include <array>
#include <string>

#include "mhfit/error.hpp"

namespace mhfit {

namespace {

constexpr std::array<std::string_view, kActivityCodeCount> kNames = {
    "null",
    "standing still",
    "sitting and relaxing",
    "lying down",
    "walking",
    "climbing stairs",
    "waist bends forward",
    "frontal elevation of arms",
    "knees bending",
    "cycling",
    "jogging",
    "running",
    "jump front & back",
};

}  // namespace

ActivityLabel::ActivityLabel(int code) {
  if (code < 0 || code > kMaxActivityCode) {
    throw Error(ErrorKind::LabelRange,
                "activity label " + std::to_string(code) + " outside [0, 12]");
  }
  code_ = static_cast<std::uint8_t>(code);
}

std::string_view ActivityLabel::name() const noexcept { return kNames[code_]; }

std::string_view activity_name(int code) noexcept {
  if (code < 0 || code > kMaxActivityCode) return "unknown";
  return kNames[static_cast<std::size_t>(code)];
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::LabelRange: return "label-range error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::EmptyInput: return "empty-input error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::VersionMismatch: return "version mismatch";
    case ErrorKind::Truncated: return "truncated file";
    case ErrorKind::Checksum: return "checksum failure";
    case ErrorKind::Corrupt: return "corrupt file";
    case ErrorKind::InvalidSpec: return "invalid specification";
    case ErrorKind::EmptyAfterFilter: return "empty after filter";
    case ErrorKind::NoWindows: return "no windows produced";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::LengthMismatch: return "length mismatch";
    case ErrorKind::UnknownLabel: return "unknown label";
    case ErrorKind::Usage: return "usage error";
  }
  return "error";
}

}  // namespace mhfit
