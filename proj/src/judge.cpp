#include "arm_alp/judge.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "arm_alp/errors.hpp"

namespace arm_alp {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Unit words and symbols stripped from numeric answers.
constexpr std::array<std::string_view, 42> kUnitWords = {
    "percent", "percentage", "dollars", "dollar", "usd", "cents", "cent",
    "euros", "euro", "yuan", "degrees", "degree", "units", "unit",
    "meters", "meter", "metres", "metre", "m", "cm", "mm", "km",
    "kilometers", "inches", "inch", "feet", "foot", "ft", "miles", "mph",
    "grams", "gram", "g", "kg", "kilograms", "liters", "liter", "l", "ml",
    "seconds", "minutes", "hours"};

constexpr std::array<std::string_view, 7> kSymbols = {"%", "$", "\xE2\x82\xAC" /* euro */,
                                                      "\xC2\xA3" /* pound */, "\xC2\xB0" /* degree */,
                                                      "\xC2\xA5" /* yen */, "^\\circ"};

void erase_all(std::string& s, std::string_view needle) {
  for (std::size_t at = s.find(needle); at != std::string::npos; at = s.find(needle, at)) {
    s.erase(at, needle.size());
  }
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

GoldAnswer GoldAnswer::multiple_choice(std::string letter, std::vector<std::string> choices) {
  if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'D') {
    throw ValidationError("gold.value", "multiple-choice gold must be one of A, B, C, D");
  }
  return {Kind::MultipleChoice, std::move(letter), std::move(choices)};
}

GoldAnswer GoldAnswer::free_form(std::string value) {
  return {Kind::FreeForm, std::move(value), {}};
}

std::optional<char> extract_choice_letter(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    const char up = static_cast<char>(std::toupper(c));
    if (up < 'A' || up > 'D') continue;
    const bool left_ok = i == 0 || !is_alnum(static_cast<unsigned char>(text[i - 1]));
    const bool right_ok = i + 1 == text.size() || !is_alnum(static_cast<unsigned char>(text[i + 1]));
    if (left_ok && right_ok) return up;
  }
  return std::nullopt;
}

std::optional<double> parse_number(std::string_view text) {
  std::string digits;
  for (char c : trim(text)) {
    if (c != ',') digits.push_back(c);
  }
  if (digits.empty()) return std::nullopt;
  const char* begin = digits.data();
  const char* end = begin + digits.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string normalize_answer(std::string_view text) {
  std::string s = collapse_spaces(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  while (!s.empty() && (s.back() == '.')) s.pop_back();

  std::string stripped = s;
  for (auto sym : kSymbols) erase_all(stripped, sym);
  stripped = collapse_spaces(stripped);
  if (parse_number(stripped)) return stripped;

  // Drop one trailing unit word if the remainder is numeric.
  const std::size_t space = stripped.rfind(' ');
  if (space != std::string::npos) {
    const std::string_view head = std::string_view(stripped).substr(0, space);
    const std::string_view tail = std::string_view(stripped).substr(space + 1);
    if (std::find(kUnitWords.begin(), kUnitWords.end(), tail) != kUnitWords.end() &&
        parse_number(head)) {
      return std::string(trim(head));
    }
  }
  // "12cm" style suffixes glued to the number.
  for (auto unit : kUnitWords) {
    if (stripped.size() > unit.size() && stripped.ends_with(unit)) {
      const std::string_view head = std::string_view(stripped).substr(0, stripped.size() - unit.size());
      if (parse_number(head)) return std::string(trim(head));
    }
  }
  return s;
}

bool RuleJudge::judge(std::string_view candidate, const GoldAnswer& gold) const {
  if (gold.kind == GoldAnswer::Kind::MultipleChoice) {
    const auto letter = extract_choice_letter(candidate);
    return letter && gold.value.size() == 1 && *letter == gold.value[0];
  }
  const std::string cand = normalize_answer(candidate);
  const std::string want = normalize_answer(gold.value);
  if (cand.empty()) return false;
  const auto a = parse_number(cand);
  const auto b = parse_number(want);
  if (a && b) {
    return std::abs(*a - *b) <= kNumericRelativeTolerance * std::max(std::abs(*a), std::abs(*b));
  }
  return cand == want;
}

bool judge_answer(std::string_view candidate, const GoldAnswer& gold) {
  return RuleJudge{}.judge(candidate, gold);
}

VoteOutcome majority_vote(const std::vector<VoteSample>& samples, std::int64_t budget) {
  if (samples.empty()) throw std::invalid_argument("majority_vote: no samples");
  if (samples.front().tokens > budget) {
    throw BudgetTooSmall("first sample needs " + std::to_string(samples.front().tokens) +
                         " tokens, budget is " + std::to_string(budget));
  }

  struct Tally {
    std::string spelling;
    int count = 0;
    std::size_t first_seen = 0;
  };
  std::map<std::string, Tally> by_key;

  VoteOutcome out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.tokens > budget - out.tokens_spent) break;
    out.tokens_spent += s.tokens;
    ++out.samples_used;
    auto [it, inserted] = by_key.try_emplace(normalize_answer(s.answer));
    if (inserted) {
      it->second.spelling = std::string(trim(s.answer));
      it->second.first_seen = i;
    }
    ++it->second.count;
  }

  const Tally* best = nullptr;
  for (const auto& [key, tally] : by_key) {
    out.counts[tally.spelling] += tally.count;
    if (best == nullptr || tally.count > best->count ||
        (tally.count == best->count && tally.first_seen < best->first_seen)) {
      best = &tally;
    }
  }
  out.winner = best->spelling;
  return out;
}

}  // namespace arm_alp
