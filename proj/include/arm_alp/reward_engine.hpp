#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "arm_alp/errors.hpp"
#include "arm_alp/reasoning_format.hpp"

namespace arm_alp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Rollout {
  std::int64_t id = 0;
  ReasoningFormat format = ReasoningFormat::Malformed;
  std::string answer;
  bool correct = false;
  std::int64_t length = 0;  // tokens
};

// G rollouts sampled for one question together with their format census and
// length extremes. Construction validates G >= 2 and non-negative lengths.
class RolloutGroup {
 public:
  RolloutGroup(std::string question_id, std::vector<Rollout> rollouts)
      : question_id_(std::move(question_id)), rollouts_(std::move(rollouts)) {
    if (rollouts_.size() < 2) {
      throw GroupTooSmall("rollout group needs at least 2 rollouts, got " +
                          std::to_string(rollouts_.size()));
    }
    census_.fill(0);
    l_min_ = l_max_ = rollouts_.front().length;
    for (const auto& r : rollouts_) {
      if (r.length < 0) throw ValidationError("length", "must be non-negative");
      ++census_[format_index(r.format)];
      l_min_ = std::min(l_min_, r.length);
      l_max_ = std::max(l_max_, r.length);
    }
  }

  const std::string& question_id() const { return question_id_; }
  const std::vector<Rollout>& rollouts() const { return rollouts_; }
  const Rollout& operator[](std::size_t i) const { return rollouts_[i]; }
  std::size_t size() const { return rollouts_.size(); }

  // F(f): how many rollouts in the group use format f.
  int census(ReasoningFormat f) const { return census_[format_index(f)]; }
  std::int64_t l_min() const { return l_min_; }
  std::int64_t l_max() const { return l_max_; }

 private:
  std::string question_id_;
  std::vector<Rollout> rollouts_;
  std::array<int, kNumFormatsWithMalformed> census_{};
  std::int64_t l_min_ = 0;
  std::int64_t l_max_ = 0;
};

// Base reward r in {0, 1}. Malformed rollouts never earn reward.
inline int base_reward(const Rollout& r) {
  return (r.correct && r.format != ReasoningFormat::Malformed) ? 1 : 0;
}

template <typename Scalar = double>
struct PenaltyParams {
  Scalar lambda = Scalar(0.5);
  Scalar epsilon = Scalar(1e-6);

  void validate() const {
    if (!(lambda >= Scalar(0))) throw ValidationError("lambda", "must be >= 0");
    if (!(epsilon > Scalar(0))) throw ValidationError("epsilon", "must be > 0");
  }
};

template <typename Scalar = double>
struct Schedule {
  std::int64_t t = 0;
  std::int64_t total = 1;  // T
  Scalar baseline = Scalar(1);

  void validate() const {
    if (total <= 0) throw ValidationError("T", "must be positive");
    if (t < 0 || t > total) throw ValidationError("t", "must lie in [0, T]");
  }
};

enum class DecayMode {
  // r~ = Decay(alpha * beta) * r; an incorrect rollout always scores 0.
  FactorDecay,
  // r~ = Decay(alpha * beta * r); incorrect rollouts drift toward b.
  LiteralDecay,
};

// Toggles for the three shaping stages. All off reproduces plain GRPO
// (r~ = r).
struct ShapingComponents {
  bool format_encouragement = true;
  bool length_penalty = true;
  bool cosine_decay = true;

  static constexpr ShapingComponents plain() { return {false, false, false}; }
};

template <typename Scalar = double>
struct RewardTrace {
  int r = 0;
  Scalar alpha = Scalar(1);
  Scalar beta = Scalar(1);
  Scalar r_prime = Scalar(0);
  Scalar r_double_prime = Scalar(0);
  Scalar r_tilde = Scalar(0);
  Scalar advantage = Scalar(0);
};

// alpha_i = G / F(o_i). Malformed rollouts get 1.
template <typename Scalar = double>
Scalar format_encouragement(const RolloutGroup& group, std::size_t i) {
  const ReasoningFormat f = group[i].format;
  if (f == ReasoningFormat::Malformed) return Scalar(1);
  return static_cast<Scalar>(group.size()) / static_cast<Scalar>(group.census(f));
}

// beta_i = exp(-lambda * (l_i - l_min) / (l_max - l_min + eps)).
template <typename Scalar = double>
Scalar length_penalty(const RolloutGroup& group, std::size_t i,
                      const PenaltyParams<Scalar>& p) {
  const Scalar span = static_cast<Scalar>(group.l_max() - group.l_min()) + p.epsilon;
  const Scalar offset = static_cast<Scalar>(group[i].length - group.l_min());
  return std::exp(-p.lambda * offset / span);
}

// b + 0.5 (value - b)(1 + cos(pi t / T)). Exact at both endpoints.
template <typename Scalar = double>
Scalar cosine_decay(Scalar value, const Schedule<Scalar>& sched) {
  if (sched.t == 0) return value;
  if (sched.t == sched.total) return sched.baseline;
  const Scalar phase = std::numbers::pi_v<Scalar> * static_cast<Scalar>(sched.t) /
                       static_cast<Scalar>(sched.total);
  return sched.baseline +
         Scalar(0.5) * (value - sched.baseline) * (Scalar(1) + std::cos(phase));
}

// Group z-score with population standard deviation. Groups whose spread is
// below 1e-12 carry no signal and map to all zeros.
template <typename Derived>
Vector<typename Derived::Scalar> group_advantage(const Eigen::MatrixBase<Derived>& rewards) {
  using Scalar = typename Derived::Scalar;
  if (rewards.size() < 2) {
    throw GroupTooSmall("group_advantage needs at least 2 rewards");
  }
  const Scalar mean = rewards.mean();
  const Vector<Scalar> centered = rewards.array() - mean;
  const Scalar stddev = std::sqrt(centered.squaredNorm() / static_cast<Scalar>(rewards.size()));
  if (stddev < Scalar(1e-12)) return Vector<Scalar>::Zero(rewards.size());
  return centered / stddev;
}

template <typename Scalar = double>
Vector<Scalar> group_advantage(const std::vector<Scalar>& rewards) {
  return group_advantage(
      Eigen::Map<const Vector<Scalar>>(rewards.data(), static_cast<Eigen::Index>(rewards.size())));
}

// Full shaping chain for one group: alpha, beta, r', r'', r~ and the
// group-relative advantage of r~.
template <typename Scalar = double>
std::vector<RewardTrace<Scalar>> shape_group(const RolloutGroup& group,
                                             const PenaltyParams<Scalar>& p,
                                             const Schedule<Scalar>& sched,
                                             DecayMode mode = DecayMode::FactorDecay,
                                             ShapingComponents components = {}) {
  const std::size_t n = group.size();
  std::vector<RewardTrace<Scalar>> traces(n);
  Vector<Scalar> shaped(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto& tr = traces[i];
    tr.r = base_reward(group[i]);
    tr.alpha = components.format_encouragement ? format_encouragement<Scalar>(group, i)
                                               : Scalar(1);
    tr.beta = components.length_penalty ? length_penalty<Scalar>(group, i, p) : Scalar(1);
    tr.r_prime = tr.alpha * static_cast<Scalar>(tr.r);
    tr.r_double_prime = tr.beta * tr.r_prime;
    if (!components.cosine_decay) {
      tr.r_tilde = tr.r_double_prime;
    } else if (mode == DecayMode::FactorDecay) {
      tr.r_tilde = cosine_decay<Scalar>(tr.alpha * tr.beta, sched) * static_cast<Scalar>(tr.r);
    } else {
      tr.r_tilde = cosine_decay<Scalar>(tr.r_double_prime, sched);
    }
    shaped[static_cast<Eigen::Index>(i)] = tr.r_tilde;
  }
  const Vector<Scalar> adv = group_advantage(shaped);
  for (std::size_t i = 0; i < n; ++i) traces[i].advantage = adv[static_cast<Eigen::Index>(i)];
  return traces;
}

}  // namespace arm_alp
