#include "arm_alp/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "arm_alp/errors.hpp"
#include "arm_alp/format_grammar.hpp"
#include "arm_alp/judge.hpp"
#include "arm_alp/policy_sim.hpp"
#include "arm_alp/report.hpp"
#include "arm_alp/run_config.hpp"
#include "arm_alp/run_log.hpp"

namespace arm_alp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig resolve_config(const fs::path& path, const ConfigOverrides& o) {
  json doc = read_config_document(path);
  if (!doc.is_object()) throw ValidationError("", "configuration must be a JSON object");
  if (o.seed) doc["seed"] = *o.seed;
  if (o.steps) doc["steps"] = *o.steps;
  if (o.mode) doc["mode"] = *o.mode;
  if (o.lambda) doc["lambda"] = *o.lambda;
  return parse_run_config(doc);
}

std::string read_all(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return read_all(in);
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json parsed_to_json(const ParsedResponse& p) {
  return {{"format", format_name(p.format)},
          {"rationale", p.rationale},
          {"code_block", optional_string(p.code_block)},
          {"call_line", p.call_line},
          {"answer", p.answer},
          {"observation", optional_string(p.observation)},
          {"token_length", p.token_length}};
}

json outcome_to_json(const ExecOutcome& o) {
  return {{"status", exec_status_name(o.status)},
          {"stdout", o.stdout_text},
          {"stderr", o.stderr_text},
          {"extracted_answer", optional_string(o.extracted_answer)},
          {"wall_time", o.wall_time},
          {"output_truncated", o.output_truncated},
          {"interpreter", interpreter_path()}};
}

RolloutGroup group_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("", "group must be an object");
  const auto qid = j.find("question_id");
  if (qid == j.end() || !(qid->is_string() || qid->is_number_integer())) {
    throw ValidationError("question_id", "required string");
  }
  const auto list = j.find("rollouts");
  if (list == j.end() || !list->is_array()) throw ValidationError("rollouts", "required array");
  std::vector<Rollout> rollouts;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& r = (*list)[i];
    const std::string where = "rollouts[" + std::to_string(i) + "]";
    if (!r.is_object()) throw ValidationError(where, "must be an object");
    Rollout out;
    out.id = r.value("id", static_cast<std::int64_t>(i));
    const auto fmt = r.find("format");
    if (fmt == r.end() || !fmt->is_string()) throw ValidationError(where + ".format", "required string");
    const auto f = parse_format_name(fmt->get<std::string>());
    if (!f) throw ValidationError(where + ".format", "unknown format '" + fmt->get<std::string>() + "'");
    out.format = *f;
    const auto correct = r.find("correct");
    if (correct == r.end() || !correct->is_boolean()) throw ValidationError(where + ".correct", "required boolean");
    out.correct = correct->get<bool>();
    const auto len = r.find("length");
    if (len == r.end() || !len->is_number_integer()) throw ValidationError(where + ".length", "required integer");
    out.length = len->get<std::int64_t>();
    if (r.contains("answer") && r["answer"].is_string()) out.answer = r["answer"].get<std::string>();
    rollouts.push_back(std::move(out));
  }
  const std::string id = qid->is_string() ? qid->get<std::string>() : std::to_string(qid->get<std::int64_t>());
  return RolloutGroup(id, std::move(rollouts));
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = resolve_config(args.config, args.overrides);
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  try {
    const RunLog log = simulate(config);
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    const fs::path log_path = args.out_dir / (log.run_id + ".jsonl");
    const fs::path csv_path = args.out_dir / (log.run_id + ".summary.csv");
    std::ofstream log_out(log_path, std::ios::binary);
    if (!log_out) throw IoError("cannot write " + log_path.string());
    write_run_log(log_out, log);
    std::ofstream csv_out(csv_path, std::ios::binary);
    if (!csv_out) throw IoError("cannot write " + csv_path.string());
    write_summary_csv(csv_out, log);
    out << log_path.string() << '\n' << csv_path.string() << '\n';
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_shape(const ShapeArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  const Schedule<double> sched{args.t, args.total, args.baseline};
  try {
    args.penalty.validate();
    sched.validate();
  } catch (const ValidationError& e) {
    err << "invalid flags: " << e.what() << '\n';
    return kExitUsage;
  }
  const ShapingComponents components = args.plain ? ShapingComponents::plain() : ShapingComponents{};

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const RolloutGroup group = group_from_json(json::parse(line));
      const auto traces = shape_group<double>(group, args.penalty, sched, args.mode, components);
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& tr = traces[i];
        const json rec = {{"question_id", group.question_id()},
                          {"id", group[i].id},
                          {"format", format_name(group[i].format)},
                          {"r", tr.r},
                          {"alpha", tr.alpha},
                          {"beta", tr.beta},
                          {"r_prime", tr.r_prime},
                          {"r_double_prime", tr.r_double_prime},
                          {"r_tilde", tr.r_tilde},
                          {"advantage", tr.advantage}};
        out << rec.dump() << '\n';
      }
    } catch (const json::exception& e) {
      err << "line " << line_no << ": invalid JSON: " << e.what() << '\n';
      return kExitUsage;
    } catch (const Error& e) {
      err << "line " << line_no << ": " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitOk;
}

int cmd_parse(const ParseArgs& args, std::istream& in, std::ostream& out, std::ostream&) {
  const ParsedResponse parsed = parse_response(read_all(in));
  json j = parsed_to_json(parsed);
  if (args.execute && is_code_format(parsed.format)) {
    const ResolvedAnswer resolved = resolve_code_rollout(parsed, args.limits);
    j["resolved_format"] = format_name(resolved.format);
    j["resolved_answer"] = resolved.answer;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_exec(const ExecArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.response) {
      if (args.source || args.call) {
        err << "--response cannot be combined with --source/--call\n";
        return kExitUsage;
      }
      const ParsedResponse parsed = parse_response(read_file(*args.response));
      if (!is_code_format(parsed.format)) {
        err << "response is not a code response (format " << format_name(parsed.format) << ")\n";
        return kExitUsage;
      }
      json j;
      try {
        const CodeSplit split = extract_code(parsed);
        j = outcome_to_json(execute(split.function_source, split.call_line, args.limits));
      } catch (const MissingCallLine& e) {
        j = {{"status", "MissingCallLine"}, {"detail", e.what()}};
      }
      const ResolvedAnswer resolved = resolve_code_rollout(parsed, args.limits);
      j["resolved_format"] = format_name(resolved.format);
      j["resolved_answer"] = resolved.answer;
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    if (!args.source || !args.call) {
      err << "exec needs --source and --call, or --response\n";
      return kExitUsage;
    }
    const std::string source = read_file(*args.source);
    out << outcome_to_json(execute(source, *args.call, args.limits)).dump(2) << '\n';
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_vote(const VoteArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<VoteSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      samples.push_back({j.at("answer").get<std::string>(), j.value("tokens", std::int64_t{0})});
    } catch (const json::exception& e) {
      err << "line " << line_no << ": " << e.what() << '\n';
      return kExitUsage;
    }
  }
  if (samples.empty()) {
    err << "vote: no samples on stdin\n";
    return kExitUsage;
  }
  try {
    const VoteOutcome v = majority_vote(samples, args.budget);
    out << json{{"winner", v.winner},
                {"counts", v.counts},
                {"samples_used", v.samples_used},
                {"tokens_spent", v.tokens_spent}}
               .dump()
        << '\n';
  } catch (const BudgetTooSmall& e) {
    err << "vote: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  if (args.logs.empty()) {
    err << "report: no run logs given\n";
    return kExitUsage;
  }
  std::vector<RunLog> logs;
  for (const auto& path : args.logs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      err << "I/O error: cannot open " << path.string() << '\n';
      return kExitIo;
    }
    try {
      logs.push_back(read_run_log(in));
    } catch (const ValidationError& e) {
      err << path.string() << ": schema mismatch: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  try {
    const ReportResult result = write_report(logs, args.out_dir);
    for (const auto& f : result.files) out << f.string() << '\n';
    for (const auto& note : result.notes) err << "note: " << note << '\n';
  } catch (const ValidationError& e) {
    err << "schema mismatch: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = resolve_config(args.config, args.overrides);
    if (args.lambdas.empty()) throw ValidationError("lambdas", "at least one value required");
    for (double l : args.lambdas) {
      if (!(l >= 0.0)) throw ValidationError("lambdas", "values must be >= 0");
    }
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }

  const SweepReport report = lambda_sweep(config.scenario, args.lambdas, config.options, args.workers);
  std::ostringstream csv;
  csv << "lambda,mean_expected_length,mean_expected_accuracy";
  for (const auto& tc : config.scenario.task_classes) csv << ',' << tc.name << "_length," << tc.name << "_accuracy";
  csv << '\n';
  for (const auto& row : report.rows) {
    csv << format_number(row.lambda) << ',' << format_number(row.mean_length) << ','
        << format_number(row.mean_accuracy);
    for (std::size_t c = 0; c < row.class_length.size(); ++c) {
      csv << ',' << format_number(row.class_length[c]) << ',' << format_number(row.class_accuracy[c]);
    }
    csv << '\n';
  }
  if (args.out) {
    std::ofstream f(*args.out, std::ios::binary);
    if (!(f << csv.str())) {
      err << "I/O error: cannot write " << args.out->string() << '\n';
      return kExitIo;
    }
  } else {
    out << csv.str();
  }
  return kExitOk;
}

}  // namespace arm_alp::cli
