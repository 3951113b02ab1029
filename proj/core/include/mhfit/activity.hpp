#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace mhfit {

inline constexpr int kMaxActivityCode = 12;
inline constexpr int kActivityCodeCount = kMaxActivityCode + 1;

/// Activity code of one sample: 0 is the null/transition class, 1..12 are the
/// scripted activities of the MHEALTH protocol.
class ActivityLabel {
 public:
  constexpr ActivityLabel() = default;

  /// Throws Error{LabelRange} when code is outside [0, 12].
  explicit ActivityLabel(int code);

  constexpr std::uint8_t code() const noexcept { return code_; }
  constexpr bool is_null() const noexcept { return code_ == 0; }

  /// Human-readable activity name ("null" for code 0).
  std::string_view name() const noexcept;

  friend constexpr auto operator<=>(ActivityLabel, ActivityLabel) = default;

 private:
  std::uint8_t code_ = 0;
};

std::string_view activity_name(int code) noexcept;

}  // namespace mhfit
