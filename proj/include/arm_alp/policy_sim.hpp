#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arm_alp/reasoning_format.hpp"
#include "arm_alp/reward_engine.hpp"
#include "arm_alp/rng.hpp"

namespace arm_alp {

struct FormatProfile {
  double accuracy = 0.0;
  double length_mean = 1.0;
  double length_spread = 0.2;  // absolute tokens
};

struct TaskClass {
  std::string name;
  double weight = 1.0;
  std::array<FormatProfile, kNumFormats> per_format{};

  const FormatProfile& profile(ReasoningFormat f) const { return per_format[format_index(f)]; }
};

struct ScenarioSpec {
  std::vector<TaskClass> task_classes;
  int group_size = 8;
  std::int64_t steps = 300;
  std::uint64_t seed = 0;
  int groups_per_step = 16;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

enum class TrainingMode { PlainGRPO, ALP };

struct PolicyUpdateParams {
  double learning_rate = 1.5;
  double clip_ratio = 0.2;
  int epochs_per_batch = 1;

  void validate() const;
};

using LogitMatrix = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kNumFormats)>;
using FormatDistribution = Eigen::Matrix<double, static_cast<int>(kNumFormats), 1>;

// Numerically stable softmax. +inf logits share all probability mass.
FormatDistribution softmax(const Eigen::Ref<const FormatDistribution>& logits);

// Entropy in nats.
double entropy(const Eigen::Ref<const FormatDistribution>& probabilities);

// Categorical format policy: one row of logits per task class.
struct PolicyState {
  LogitMatrix logits;
  std::int64_t step = 0;

  static PolicyState uniform(std::size_t num_classes);

  std::size_t num_classes() const { return static_cast<std::size_t>(logits.rows()); }
  FormatDistribution probabilities(std::size_t task_class) const;
};

struct ClassGroup {
  std::size_t task_class = 0;
  RolloutGroup group;
};

RolloutGroup sample_group(const ScenarioSpec& scenario, const PolicyState& policy,
                          std::size_t task_class, Rng& rng);

// Flattened (class, format, advantage) samples fed to the surrogate.
struct SurrogateBatch {
  std::vector<std::size_t> task_class;
  std::vector<ReasoningFormat> format;
  std::vector<double> advantage;

  std::size_t size() const { return advantage.size(); }

  static SurrogateBatch from_groups(const std::vector<ClassGroup>& groups,
                                    const std::vector<std::vector<RewardTrace<double>>>& traces);
};

// Mean over samples of min(rho * A, clip(rho, 1 - c, 1 + c) * A), where
// rho = pi(format | class) / pi_old(format | class).
double surrogate_objective(const LogitMatrix& logits, const LogitMatrix& old_logits,
                           const SurrogateBatch& batch, double clip_ratio);

// Analytic gradient of surrogate_objective with respect to `logits`. Samples
// whose clipped branch is active contribute nothing.
LogitMatrix surrogate_gradient(const LogitMatrix& logits, const LogitMatrix& old_logits,
                               const SurrogateBatch& batch, double clip_ratio);

// One GRPO update: snapshot pi_old, then epochs_per_batch gradient-ascent
// steps on the clipped surrogate.
PolicyState grpo_step(const PolicyState& policy, const std::vector<ClassGroup>& groups,
                      const std::vector<std::vector<RewardTrace<double>>>& traces,
                      const PolicyUpdateParams& up);

struct ClassSnapshot {
  FormatDistribution distribution;
  double expected_accuracy = 0.0;
  double expected_length = 0.0;
  double entropy = 0.0;
};

struct StepRecord {
  std::int64_t step = 0;
  std::vector<ClassSnapshot> classes;
  // Empirical statistics of the batch sampled at this step; zero groups for
  // the initial snapshot.
  int batch_groups = 0;
  double batch_accuracy = 0.0;
  double batch_mean_length = 0.0;
};

ClassSnapshot snapshot_class(const TaskClass& task_class, const FormatDistribution& probs);
StepRecord snapshot(const ScenarioSpec& scenario, const PolicyState& policy);

struct TrainingOptions {
  TrainingMode mode = TrainingMode::ALP;
  PenaltyParams<double> penalty{};
  PolicyUpdateParams update{};
  DecayMode decay_mode = DecayMode::FactorDecay;
  double baseline = 1.0;
  // Only consulted in ALP mode.
  ShapingComponents components{};
};

struct TrainingLog {
  std::string rng_algorithm{Rng::kAlgorithm};
  std::vector<StepRecord> steps;  // steps[0] is the initial policy
  PolicyState final_policy;

  const StepRecord& final_step() const { return steps.back(); }
};

// Runs scenario.steps updates. Deterministic in (scenario, options).
TrainingLog run_training(const ScenarioSpec& scenario, const TrainingOptions& options);

// Expected length / accuracy averaged over task classes by weight.
double weighted_expected_length(const ScenarioSpec& scenario, const StepRecord& record);
double weighted_expected_accuracy(const ScenarioSpec& scenario, const StepRecord& record);

struct SweepRow {
  double lambda = 0.0;
  double mean_length = 0.0;
  double mean_accuracy = 0.0;
  std::vector<double> class_length;
  std::vector<double> class_accuracy;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

// ALP training once per lambda with the scenario's seed. Runs may execute
// concurrently (max_workers); results are ordered like `lambdas`.
SweepReport lambda_sweep(const ScenarioSpec& scenario, const std::vector<double>& lambdas,
                         const TrainingOptions& base, unsigned max_workers = 4);

}  // namespace arm_alp
