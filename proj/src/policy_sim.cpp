#include "arm_alp/policy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "arm_alp/errors.hpp"

namespace arm_alp {

void ScenarioSpec::validate() const {
  if (task_classes.empty()) throw ValidationError("task_classes", "at least one task class required");
  if (group_size < 2) throw ValidationError("group_size", "must be >= 2");
  if (steps < 0) throw ValidationError("steps", "must be >= 0");
  if (groups_per_step < 1) throw ValidationError("groups_per_step", "must be >= 1");
  double total_weight = 0.0;
  for (std::size_t c = 0; c < task_classes.size(); ++c) {
    const auto& tc = task_classes[c];
    const std::string prefix = "task_classes[" + std::to_string(c) + "]";
    if (!(tc.weight >= 0.0)) throw ValidationError(prefix + ".weight", "must be >= 0");
    total_weight += tc.weight;
    for (ReasoningFormat f : kAllFormats) {
      const auto& pf = tc.profile(f);
      const std::string field = prefix + ".per_format." + std::string(format_name(f));
      if (!(pf.accuracy >= 0.0 && pf.accuracy <= 1.0)) {
        throw ValidationError(field + ".accuracy", "must lie in [0, 1]");
      }
      if (!(pf.length_mean > 0.0)) throw ValidationError(field + ".length_mean", "must be > 0");
      if (!(pf.length_spread >= 0.0)) throw ValidationError(field + ".length_spread", "must be >= 0");
    }
  }
  if (std::abs(total_weight - 1.0) > 1e-9) {
    throw ValidationError("task_classes", "weights must sum to 1");
  }
}

void PolicyUpdateParams::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate", "must be > 0");
  if (!(clip_ratio > 0.0 && clip_ratio < 1.0)) throw ValidationError("clip_ratio", "must lie in (0, 1)");
  if (epochs_per_batch < 1) throw ValidationError("epochs_per_batch", "must be >= 1");
}

FormatDistribution softmax(const Eigen::Ref<const FormatDistribution>& logits) {
  const double top = logits.maxCoeff();
  if (std::isinf(top) && top > 0) {
    FormatDistribution p = (logits.array() == top).cast<double>();
    return p / p.sum();
  }
  FormatDistribution p = (logits.array() - top).exp();
  return p / p.sum();
}

double entropy(const Eigen::Ref<const FormatDistribution>& probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

PolicyState PolicyState::uniform(std::size_t num_classes) {
  return {LogitMatrix::Zero(static_cast<Eigen::Index>(num_classes), kNumFormats), 0};
}

FormatDistribution PolicyState::probabilities(std::size_t task_class) const {
  return softmax(logits.row(static_cast<Eigen::Index>(task_class)).transpose());
}

RolloutGroup sample_group(const ScenarioSpec& scenario, const PolicyState& policy,
                          std::size_t task_class, Rng& rng) {
  const TaskClass& tc = scenario.task_classes.at(task_class);
  const FormatDistribution probs = policy.probabilities(task_class);
  std::vector<Rollout> rollouts;
  rollouts.reserve(static_cast<std::size_t>(scenario.group_size));
  for (int i = 0; i < scenario.group_size; ++i) {
    Rollout r;
    r.id = i;
    r.format = kAllFormats[rng.categorical({probs.data(), kNumFormats})];
    const FormatProfile& pf = tc.profile(r.format);
    r.correct = rng.bernoulli(pf.accuracy);
    const double draw = pf.length_mean + pf.length_spread * rng.normal();
    r.length = std::max<std::int64_t>(1, std::llround(draw));
    rollouts.push_back(std::move(r));
  }
  return RolloutGroup(tc.name, std::move(rollouts));
}

SurrogateBatch SurrogateBatch::from_groups(
    const std::vector<ClassGroup>& groups,
    const std::vector<std::vector<RewardTrace<double>>>& traces) {
  if (groups.size() != traces.size()) {
    throw std::invalid_argument("traces must align with groups");
  }
  SurrogateBatch batch;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g].group;
    if (traces[g].size() != group.size()) {
      throw std::invalid_argument("trace count must match group size");
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i].format == ReasoningFormat::Malformed) continue;
      batch.task_class.push_back(groups[g].task_class);
      batch.format.push_back(group[i].format);
      batch.advantage.push_back(traces[g][i].advantage);
    }
  }
  return batch;
}

namespace {

struct ClassProbabilities {
  std::vector<FormatDistribution> rows;

  explicit ClassProbabilities(const LogitMatrix& logits) {
    rows.reserve(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index c = 0; c < logits.rows(); ++c) rows.push_back(softmax(logits.row(c).transpose()));
  }
};

}  // namespace

double surrogate_objective(const LogitMatrix& logits, const LogitMatrix& old_logits,
                           const SurrogateBatch& batch, double clip_ratio) {
  if (batch.size() == 0) return 0.0;
  const ClassProbabilities now(logits), old(old_logits);
  double total = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto f = static_cast<Eigen::Index>(format_index(batch.format[k]));
    const std::size_t c = batch.task_class[k];
    const double ratio = now.rows[c][f] / old.rows[c][f];
    const double a = batch.advantage[k];
    const double clipped = std::clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio);
    total += std::min(ratio * a, clipped * a);
  }
  return total / static_cast<double>(batch.size());
}

LogitMatrix surrogate_gradient(const LogitMatrix& logits, const LogitMatrix& old_logits,
                               const SurrogateBatch& batch, double clip_ratio) {
  LogitMatrix grad = LogitMatrix::Zero(logits.rows(), kNumFormats);
  if (batch.size() == 0) return grad;
  const ClassProbabilities now(logits), old(old_logits);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double a = batch.advantage[k];
    if (a == 0.0) continue;
    const auto f = static_cast<Eigen::Index>(format_index(batch.format[k]));
    const std::size_t c = batch.task_class[k];
    const double ratio = now.rows[c][f] / old.rows[c][f];
    const bool unclipped = a > 0.0 ? ratio <= 1.0 + clip_ratio : ratio >= 1.0 - clip_ratio;
    if (!unclipped) continue;
    // d rho / d logit_j = rho * (1[j == f] - pi_j)
    FormatDistribution d = -now.rows[c];
    d[f] += 1.0;
    grad.row(static_cast<Eigen::Index>(c)) += (a * ratio) * d.transpose();
  }
  return grad / static_cast<double>(batch.size());
}

PolicyState grpo_step(const PolicyState& policy, const std::vector<ClassGroup>& groups,
                      const std::vector<std::vector<RewardTrace<double>>>& traces,
                      const PolicyUpdateParams& up) {
  const SurrogateBatch batch = SurrogateBatch::from_groups(groups, traces);
  PolicyState next = policy;
  const LogitMatrix old_logits = policy.logits;
  for (int epoch = 0; epoch < up.epochs_per_batch; ++epoch) {
    next.logits += up.learning_rate * surrogate_gradient(next.logits, old_logits, batch, up.clip_ratio);
  }
  next.step = policy.step + 1;
  return next;
}

ClassSnapshot snapshot_class(const TaskClass& task_class, const FormatDistribution& probs) {
  ClassSnapshot s;
  s.distribution = probs;
  for (ReasoningFormat f : kAllFormats) {
    const double p = probs[static_cast<Eigen::Index>(format_index(f))];
    s.expected_accuracy += p * task_class.profile(f).accuracy;
    s.expected_length += p * task_class.profile(f).length_mean;
  }
  s.entropy = entropy(probs);
  return s;
}

StepRecord snapshot(const ScenarioSpec& scenario, const PolicyState& policy) {
  StepRecord rec;
  rec.step = policy.step;
  rec.classes.reserve(scenario.task_classes.size());
  for (std::size_t c = 0; c < scenario.task_classes.size(); ++c) {
    rec.classes.push_back(snapshot_class(scenario.task_classes[c], policy.probabilities(c)));
  }
  return rec;
}

TrainingLog run_training(const ScenarioSpec& scenario, const TrainingOptions& options) {
  scenario.validate();
  options.update.validate();
  options.penalty.validate();

  std::vector<double> class_weights;
  for (const auto& tc : scenario.task_classes) class_weights.push_back(tc.weight);

  TrainingLog log;
  PolicyState policy = PolicyState::uniform(scenario.task_classes.size());
  log.steps.push_back(snapshot(scenario, policy));

  Rng rng(scenario.seed);
  const ShapingComponents components =
      options.mode == TrainingMode::ALP ? options.components : ShapingComponents::plain();

  for (std::int64_t t = 0; t < scenario.steps; ++t) {
    Rng step_rng = rng.split();
    const Schedule<double> sched{t, scenario.steps, options.baseline};

    std::vector<ClassGroup> groups;
    std::vector<std::vector<RewardTrace<double>>> traces;
    groups.reserve(static_cast<std::size_t>(scenario.groups_per_step));
    double correct = 0.0, length = 0.0, count = 0.0;
    for (int g = 0; g < scenario.groups_per_step; ++g) {
      const std::size_t c = step_rng.categorical(class_weights);
      RolloutGroup group = sample_group(scenario, policy, c, step_rng);
      for (const auto& r : group.rollouts()) {
        correct += base_reward(r);
        length += static_cast<double>(r.length);
        count += 1.0;
      }
      traces.push_back(shape_group<double>(group, options.penalty, sched, options.decay_mode, components));
      groups.push_back({c, std::move(group)});
    }

    policy = grpo_step(policy, groups, traces, options.update);
    StepRecord rec = snapshot(scenario, policy);
    rec.batch_groups = scenario.groups_per_step;
    rec.batch_accuracy = correct / count;
    rec.batch_mean_length = length / count;
    log.steps.push_back(std::move(rec));
  }
  log.final_policy = policy;
  return log;
}

double weighted_expected_length(const ScenarioSpec& scenario, const StepRecord& record) {
  double total = 0.0;
  for (std::size_t c = 0; c < scenario.task_classes.size(); ++c) {
    total += scenario.task_classes[c].weight * record.classes[c].expected_length;
  }
  return total;
}

double weighted_expected_accuracy(const ScenarioSpec& scenario, const StepRecord& record) {
  double total = 0.0;
  for (std::size_t c = 0; c < scenario.task_classes.size(); ++c) {
    total += scenario.task_classes[c].weight * record.classes[c].expected_accuracy;
  }
  return total;
}

SweepReport lambda_sweep(const ScenarioSpec& scenario, const std::vector<double>& lambdas,
                         const TrainingOptions& base, unsigned max_workers) {
  if (lambdas.empty()) throw ValidationError("lambdas", "at least one value required");
  max_workers = std::max(1u, max_workers);

  auto run_one = [&](double lambda) {
    TrainingOptions opts = base;
    opts.mode = TrainingMode::ALP;
    opts.penalty.lambda = lambda;
    const TrainingLog log = run_training(scenario, opts);
    const StepRecord& last = log.final_step();
    SweepRow row;
    row.lambda = lambda;
    row.mean_length = weighted_expected_length(scenario, last);
    row.mean_accuracy = weighted_expected_accuracy(scenario, last);
    for (const auto& cls : last.classes) {
      row.class_length.push_back(cls.expected_length);
      row.class_accuracy.push_back(cls.expected_accuracy);
    }
    return row;
  };

  SweepReport report;
  report.rows.resize(lambdas.size());
  for (std::size_t start = 0; start < lambdas.size(); start += max_workers) {
    const std::size_t end = std::min(lambdas.size(), start + max_workers);
    std::vector<std::future<SweepRow>> pending;
    for (std::size_t i = start; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, run_one, lambdas[i]));
    }
    for (std::size_t i = start; i < end; ++i) report.rows[i] = pending[i - start].get();
  }
  return report;
}

}  // namespace arm_alp
