#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "arm_alp/policy_sim.hpp"

namespace arm_alp {

// Everything needed to reproduce one simulator run.
struct RunConfig {
  ScenarioSpec scenario;
  TrainingOptions options;
};

// Keys (all optional except task_classes):
//   task_classes, group_size, steps, seed, groups_per_step, mode, lambda,
//   epsilon, baseline, decay_mode, components, clip_ratio, learning_rate,
//   epochs_per_batch.
// Unknown keys are rejected. Throws ValidationError naming the field.
RunConfig parse_run_config(const nlohmann::json& doc);

// Reads and validates a JSON config file. Syntax errors are reported as
// ValidationError with a "line N" field; unreadable files raise IoError.
RunConfig load_run_config(const std::filesystem::path& path);

// Reads a config file as JSON without validating it, so callers can apply
// overrides before parse_run_config.
nlohmann::json read_config_document(const std::filesystem::path& path);

// Fully resolved form; parse_run_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

std::string_view mode_name(TrainingMode mode);
std::string_view decay_mode_name(DecayMode mode);

}  // namespace arm_alp
