#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "arm_alp/policy_sim.hpp"
#include "arm_alp/run_config.hpp"

namespace arm_alp {

// A persisted simulator run. On disk this is JSON-lines:
//   {"record":"header", "run_id", "rng_algorithm", "config"}
//   {"record":"step", ...}          one per step, step 0 = initial policy
//   {"record":"summary", ...}
struct RunLog {
  std::string run_id;
  RunConfig config;
  std::string rng_algorithm;
  std::vector<StepRecord> steps;

  bool has_training_steps() const { return steps.size() > 1; }
  const StepRecord& final_step() const { return steps.back(); }
};

// Deterministic identifier derived from the resolved configuration.
std::string make_run_id(const RunConfig& config);

RunLog simulate(const RunConfig& config);

nlohmann::json step_to_json(const ScenarioSpec& scenario, const StepRecord& step);
nlohmann::json summary_to_json(const RunLog& log);

void write_run_log(std::ostream& out, const RunLog& log);

// Throws ValidationError on any schema mismatch (field names the line).
RunLog read_run_log(std::istream& in);

// CSV, header row, one row per task class plus a weighted "ALL" row.
//   run_id,mode,seed,class,weight,final_step,expected_accuracy,
//   expected_length,entropy,p_DirectAnswer,p_ShortCoT,p_CodeText,
//   p_CodeExec,p_LongCoT
void write_summary_csv(std::ostream& out, const RunLog& log);

// Shortest round-trip decimal representation; locale independent.
std::string format_number(double value);

}  // namespace arm_alp
