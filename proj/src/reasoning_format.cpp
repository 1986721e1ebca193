#include "arm_alp/reasoning_format.hpp"

namespace arm_alp {

namespace {
constexpr std::array<std::string_view, kNumFormatsWithMalformed> kNames = {
    "DirectAnswer", "ShortCoT", "CodeText", "CodeExec", "LongCoT", "Malformed"};
}  // namespace

std::string_view format_name(ReasoningFormat f) {
  return kNames[format_index(f)];
}

std::optional<ReasoningFormat> parse_format_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ReasoningFormat>(i);
  }
  return std::nullopt;
}

}  // namespace arm_alp
