// Command-line front end: simulate, shape, parse, exec, vote, report, sweep.

#include <iostream>

#include <CLI11.hpp>

#include "arm_alp/commands.hpp"

namespace {

void add_overrides(CLI::App* cmd, arm_alp::cli::ConfigOverrides& o, bool with_lambda = true) {
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_option("--steps", o.steps, "override the number of training steps");
  cmd->add_option("--mode", o.mode, "override the training mode")->check(CLI::IsMember({"ALP", "PlainGRPO"}));
  if (with_lambda) cmd->add_option("--lambda", o.lambda, "override the length-penalty strength");
}

void add_limits(CLI::App* cmd, arm_alp::ExecLimits& limits) {
  cmd->add_option("--timeout", limits.timeout_s, "interpreter timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--max-output", limits.max_output_bytes, "per-stream output cap in bytes");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace arm_alp::cli;

  CLI::App app{"Length-aware GRPO reward shaping and adaptive-format simulator"};
  app.require_subcommand(1);

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "run the format-selection simulator");
  sim->add_option("config", simulate.config, "scenario configuration (JSON)")->required();
  sim->add_option("--out-dir", simulate.out_dir, "directory for the run log and summary CSV");
  add_overrides(sim, simulate.overrides);

  ShapeArgs shape;
  std::string decay = "factor";
  auto* shp = app.add_subcommand("shape", "shape rewards for JSON-lines rollout groups on stdin");
  shp->add_option("--lambda", shape.penalty.lambda, "length-penalty strength");
  shp->add_option("--epsilon", shape.penalty.epsilon, "division guard");
  shp->add_option("--t", shape.t, "current training step");
  shp->add_option("--T", shape.total, "total training steps");
  shp->add_option("--b", shape.baseline, "decay baseline");
  shp->add_option("--mode", decay, "decay target")->check(CLI::IsMember({"factor", "literal"}));
  shp->add_flag("--plain", shape.plain, "disable all shaping (plain GRPO rewards)");

  ParseArgs parse;
  auto* prs = app.add_subcommand("parse", "classify a tagged response read from stdin");
  prs->add_flag("--execute", parse.execute, "run code responses and report the resolved answer");
  add_limits(prs, parse.limits);

  ExecArgs exec;
  auto* exe = app.add_subcommand("exec", "run generated code in the external interpreter");
  exe->add_option("--source", exec.source, "file with the function source");
  exe->add_option("--call", exec.call, "call expression");
  exe->add_option("--response", exec.response, "tagged response file containing a <CODE> block");
  add_limits(exe, exec.limits);

  VoteArgs vote;
  auto* vot = app.add_subcommand("vote", "majority vote over JSON-lines samples on stdin");
  vot->add_option("--budget", vote.budget, "total token budget")->check(CLI::NonNegativeNumber);

  ReportArgs report;
  auto* rep = app.add_subcommand("report", "build CSV reports from run logs");
  rep->add_option("logs", report.logs, "run log files")->required();
  rep->add_option("--out-dir", report.out_dir, "output directory");

  SweepArgs sweep;
  auto* swp = app.add_subcommand("sweep", "ALP runs over a grid of length-penalty strengths");
  swp->add_option("config", sweep.config, "scenario configuration (JSON)")->required();
  swp->add_option("--lambdas", sweep.lambdas, "comma-separated lambda values")->delimiter(',');
  swp->add_option("--out", sweep.out, "CSV output path (default stdout)");
  swp->add_option("--workers", sweep.workers, "concurrent runs");
  add_overrides(swp, sweep.overrides, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  shape.mode = decay == "literal" ? arm_alp::DecayMode::LiteralDecay : arm_alp::DecayMode::FactorDecay;

  if (*sim) return cmd_simulate(simulate, std::cout, std::cerr);
  if (*shp) return cmd_shape(shape, std::cin, std::cout, std::cerr);
  if (*prs) return cmd_parse(parse, std::cin, std::cout, std::cerr);
  if (*exe) return cmd_exec(exec, std::cout, std::cerr);
  if (*vot) return cmd_vote(vote, std::cin, std::cout, std::cerr);
  if (*rep) return cmd_report(report, std::cout, std::cerr);
  if (*swp) return cmd_sweep(sweep, std::cout, std::cerr);
  return kExitUsage;
}
