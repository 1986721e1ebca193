#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arm_alp {

struct GoldAnswer {
  enum class Kind { MultipleChoice, FreeForm };

  Kind kind = Kind::FreeForm;
  std::string value;
  std::vector<std::string> choices;

  static GoldAnswer multiple_choice(std::string letter, std::vector<std::string> choices = {});
  static GoldAnswer free_form(std::string value);
};

// Seam for plugging in an external (e.g. model-based) judge.
class AnswerJudge {
 public:
  virtual ~AnswerJudge() = default;
  virtual bool judge(std::string_view candidate, const GoldAnswer& gold) const = 0;
};

// Deterministic rule-based judge:
//  - multiple choice: first standalone letter A-D (case-insensitive);
//  - free form: trim, case-fold, drop currency/percent symbols and a trailing
//    unit word when what remains is a number; numbers compare with relative
//    tolerance 1e-6, everything else by string equality.
class RuleJudge final : public AnswerJudge {
 public:
  bool judge(std::string_view candidate, const GoldAnswer& gold) const override;
};

bool judge_answer(std::string_view candidate, const GoldAnswer& gold);

// First standalone A-D letter, upper-cased.
std::optional<char> extract_choice_letter(std::string_view text);

// Free-form canonical form used by the judge and by vote tallying.
std::string normalize_answer(std::string_view text);

// Parses a (normalized) numeric answer; accepts thousands separators.
std::optional<double> parse_number(std::string_view text);

inline constexpr double kNumericRelativeTolerance = 1e-6;

struct VoteSample {
  std::string answer;
  std::int64_t tokens = 0;
};

struct VoteOutcome {
  std::string winner;
  // Keyed by the first-seen spelling of each normalized answer.
  std::map<std::string, int> counts;
  int samples_used = 0;
  std::int64_t tokens_spent = 0;
};

inline constexpr std::int64_t kUnlimitedBudget = std::numeric_limits<std::int64_t>::max();

// Consumes samples in order until the next one would push the running token
// total past `budget`, then returns the most frequent normalized answer.
// Ties go to the answer that appeared first. Throws BudgetTooSmall when the
// first sample alone exceeds the budget.
VoteOutcome majority_vote(const std::vector<VoteSample>& samples,
                          std::int64_t budget = kUnlimitedBudget);

}  // namespace arm_alp
