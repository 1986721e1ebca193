#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "arm_alp/run_log.hpp"

namespace arm_alp {

// Probability mass of each format's length distribution mixed by the final
// policy, over equal-width bins. Tails are folded into the end bins.
struct LengthBin {
  double lo = 0.0;
  double hi = 0.0;
  double probability = 0.0;
};

std::vector<LengthBin> length_histogram(const TaskClass& task_class, const FormatDistribution& policy,
                                        int bins = 25);

struct TokenReduction {
  std::string class_name;  // "ALL" for the weight-averaged row
  std::string alp_run_id;
  std::string plain_run_id;
  double alp_length = 0.0;
  double plain_length = 0.0;
  double reduction_pct = 0.0;  // negative when ALP is shorter
};

// Pairs each ALP run with the PlainGRPO run of the same seed (or the first
// PlainGRPO run) and compares final expected lengths per class. Empty when
// either mode is absent. Throws ValidationError when paired runs disagree
// on their task classes.
std::vector<TokenReduction> token_reductions(const std::vector<RunLog>& logs);

struct ReportResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
};

// Writes per-run CSVs (<run_id>.trajectory.csv, .format_distribution.csv,
// .length_histogram.csv), cross_run.csv when both modes are present, and
// report.txt with human-readable notes. Pure function of `logs`.
ReportResult write_report(const std::vector<RunLog>& logs, const std::filesystem::path& out_dir);

}  // namespace arm_alp
