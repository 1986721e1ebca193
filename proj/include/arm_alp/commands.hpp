#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arm_alp/exec_harness.hpp"
#include "arm_alp/judge.hpp"
#include "arm_alp/reward_engine.hpp"

namespace arm_alp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::optional<std::string> mode;
  std::optional<double> lambda;
};

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  ConfigOverrides overrides;
};

struct ShapeArgs {
  PenaltyParams<double> penalty{};
  std::int64_t t = 0;
  std::int64_t total = 1;
  double baseline = 1.0;
  DecayMode mode = DecayMode::FactorDecay;
  bool plain = false;
};

struct ParseArgs {
  bool execute = false;
  ExecLimits limits{};
};

struct ExecArgs {
  std::optional<std::filesystem::path> source;
  std::optional<std::string> call;
  std::optional<std::filesystem::path> response;
  ExecLimits limits{};
};

struct VoteArgs {
  std::int64_t budget = kUnlimitedBudget;
};

struct ReportArgs {
  std::vector<std::filesystem::path> logs;
  std::filesystem::path out_dir = "report";
};

struct SweepArgs {
  std::filesystem::path config;
  std::vector<double> lambdas{0.25, 0.5, 1.0};
  std::optional<std::filesystem::path> out;
  ConfigOverrides overrides;
  unsigned workers = 4;
};

// Each command writes results to `out`, diagnostics to `err`, and returns a
// process exit code (0 ok, 2 usage/validation, 3 I/O).
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_shape(const ShapeArgs& args, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_parse(const ParseArgs& args, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_exec(const ExecArgs& args, std::ostream& out, std::ostream& err);
int cmd_vote(const VoteArgs& args, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

}  // namespace arm_alp::cli
