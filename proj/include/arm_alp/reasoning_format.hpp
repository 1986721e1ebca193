#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace arm_alp {

// The five response formats plus a bucket for rollouts that could not be
// parsed. Order is stable and used as an index into per-format arrays.
enum class ReasoningFormat : int {
  DirectAnswer = 0,
  ShortCoT = 1,
  CodeText = 2,
  CodeExec = 3,
  LongCoT = 4,
  Malformed = 5,
};

inline constexpr std::size_t kNumFormats = 5;  // excludes Malformed
inline constexpr std::size_t kNumFormatsWithMalformed = 6;

inline constexpr std::array<ReasoningFormat, kNumFormats> kAllFormats = {
    ReasoningFormat::DirectAnswer, ReasoningFormat::ShortCoT,
    ReasoningFormat::CodeText, ReasoningFormat::CodeExec,
    ReasoningFormat::LongCoT};

constexpr std::size_t format_index(ReasoningFormat f) {
  return static_cast<std::size_t>(f);
}

constexpr bool is_code_format(ReasoningFormat f) {
  return f == ReasoningFormat::CodeText || f == ReasoningFormat::CodeExec;
}

std::string_view format_name(ReasoningFormat f);

// Inverse of format_name; exact, case-sensitive.
std::optional<ReasoningFormat> parse_format_name(std::string_view name);

}  // namespace arm_alp
