#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arm_alp/format_grammar.hpp"
#include "arm_alp/reasoning_format.hpp"

namespace arm_alp {

struct ExecLimits {
  double timeout_s = 5.0;
  std::size_t max_output_bytes = 64 * 1024;
};

enum class ExecStatus { Success, RuntimeError, Timeout, NonZeroExit, LaunchFailure };

std::string_view exec_status_name(ExecStatus s);

struct ExecOutcome {
  ExecStatus status = ExecStatus::LaunchFailure;
  std::string stdout_text;
  std::string stderr_text;
  std::optional<std::string> extracted_answer;  // set iff status == Success
  double wall_time = 0.0;                       // seconds
  bool output_truncated = false;
};

// Interpreter named by ARM_ALP_INTERPRETER, else "python3".
std::string interpreter_path();

inline constexpr const char* kInterpreterEnv = "ARM_ALP_INTERPRETER";

// Exit code the driver uses when the user code raises an exception.
inline constexpr int kDriverExceptionExit = 70;

// Runs `function_source` followed by `call_line` in a fresh temporary
// directory with the configured interpreter. The driver prints
// result["answer"] for mappings carrying that key, else the result itself.
// Failures are reported through ExecOutcome::status; this never throws.
ExecOutcome execute(std::string_view function_source, std::string_view call_line,
                    const ExecLimits& limits = {});

struct ResolvedAnswer {
  ReasoningFormat format = ReasoningFormat::CodeText;
  std::string answer;
};

// Code rollouts that run to completion become CodeExec with the interpreter's
// answer; anything else falls back to CodeText with the model's own answer.
ResolvedAnswer resolve_code_rollout(const ParsedResponse& parsed, const ExecLimits& limits = {});

struct ExecJob {
  std::string function_source;
  std::string call_line;
};

// Executes jobs on a bounded pool of worker threads; results keep job order.
std::vector<ExecOutcome> execute_all(const std::vector<ExecJob>& jobs, const ExecLimits& limits = {},
                                     unsigned workers = 4);

}  // namespace arm_alp
