#include "arm_alp/run_log.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "arm_alp/errors.hpp"

namespace arm_alp {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string make_run_id(const RunConfig& config) {
  // FNV-1a over the canonical JSON dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(config).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(mode_name(config.options.mode)) + "-seed" +
         std::to_string(config.scenario.seed) + "-" + std::string(hex, 8);
}

RunLog simulate(const RunConfig& config) {
  TrainingLog training = run_training(config.scenario, config.options);
  return {make_run_id(config), config, training.rng_algorithm, std::move(training.steps)};
}

namespace {

json distribution_to_json(const FormatDistribution& d) {
  json out = json::object();
  for (ReasoningFormat f : kAllFormats) {
    out[std::string(format_name(f))] = d[static_cast<Eigen::Index>(format_index(f))];
  }
  return out;
}

json class_to_json(const std::string& name, const ClassSnapshot& c) {
  return {{"name", name},
          {"distribution", distribution_to_json(c.distribution)},
          {"expected_accuracy", c.expected_accuracy},
          {"expected_length", c.expected_length},
          {"entropy", c.entropy}};
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

json step_to_json(const ScenarioSpec& scenario, const StepRecord& step) {
  json classes = json::array();
  for (std::size_t c = 0; c < step.classes.size(); ++c) {
    classes.push_back(class_to_json(scenario.task_classes[c].name, step.classes[c]));
  }
  return {{"record", "step"},
          {"step", step.step},
          {"batch_groups", step.batch_groups},
          {"batch_accuracy", step.batch_accuracy},
          {"batch_mean_length", step.batch_mean_length},
          {"classes", classes}};
}

json summary_to_json(const RunLog& log) {
  const StepRecord& last = log.final_step();
  const ScenarioSpec& s = log.config.scenario;
  json classes = json::array();
  for (std::size_t c = 0; c < last.classes.size(); ++c) {
    classes.push_back(class_to_json(s.task_classes[c].name, last.classes[c]));
  }
  return {{"record", "summary"},
          {"final_step", last.step},
          {"training_steps", static_cast<std::int64_t>(log.steps.size()) - 1},
          {"mean_expected_length", weighted_expected_length(s, last)},
          {"mean_expected_accuracy", weighted_expected_accuracy(s, last)},
          {"classes", classes}};
}

void write_run_log(std::ostream& out, const RunLog& log) {
  const json header = {{"record", "header"},
                       {"run_id", log.run_id},
                       {"rng_algorithm", log.rng_algorithm},
                       {"config", to_json(log.config)}};
  out << header.dump() << '\n';
  for (const auto& step : log.steps) out << step_to_json(log.config.scenario, step).dump() << '\n';
  out << summary_to_json(log).dump() << '\n';
  if (!out) throw IoError("failed writing run log");
}

RunLog read_run_log(std::istream& in) {
  RunLog log;
  bool have_header = false;
  bool have_summary = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ValidationError(where, "invalid JSON");
    }
    if (!j.is_object()) throw ValidationError(where, "record must be an object");
    const auto kind = get_field<std::string>(j, "record", where);
    if (kind == "header") {
      if (have_header) throw ValidationError(where, "duplicate header");
      log.run_id = get_field<std::string>(j, "run_id", where);
      log.rng_algorithm = get_field<std::string>(j, "rng_algorithm", where);
      if (!j.contains("config")) throw ValidationError(where, "missing field 'config'");
      log.config = parse_run_config(j["config"]);
      have_header = true;
    } else if (kind == "step") {
      if (!have_header) throw ValidationError(where, "step before header");
      StepRecord rec;
      rec.step = get_field<std::int64_t>(j, "step", where);
      if (rec.step != static_cast<std::int64_t>(log.steps.size())) {
        throw ValidationError(where, "steps must be contiguous from 0");
      }
      rec.batch_groups = get_field<int>(j, "batch_groups", where);
      rec.batch_accuracy = get_field<double>(j, "batch_accuracy", where);
      rec.batch_mean_length = get_field<double>(j, "batch_mean_length", where);
      const auto classes = get_field<json>(j, "classes", where);
      if (!classes.is_array() || classes.size() != log.config.scenario.task_classes.size()) {
        throw ValidationError(where, "class list does not match the configuration");
      }
      for (const auto& c : classes) {
        ClassSnapshot snap;
        const auto dist = get_field<json>(c, "distribution", where);
        for (ReasoningFormat f : kAllFormats) {
          snap.distribution[static_cast<Eigen::Index>(format_index(f))] =
              get_field<double>(dist, std::string(format_name(f)).c_str(), where);
        }
        snap.expected_accuracy = get_field<double>(c, "expected_accuracy", where);
        snap.expected_length = get_field<double>(c, "expected_length", where);
        snap.entropy = get_field<double>(c, "entropy", where);
        rec.classes.push_back(snap);
      }
      log.steps.push_back(std::move(rec));
    } else if (kind == "summary") {
      have_summary = true;
    } else {
      throw ValidationError(where, "unknown record type '" + kind + "'");
    }
  }
  if (!have_header) throw ValidationError("header", "run log has no header record");
  if (log.steps.empty()) throw ValidationError("steps", "run log has no step records");
  if (!have_summary) throw ValidationError("summary", "run log has no summary record");
  return log;
}

void write_summary_csv(std::ostream& out, const RunLog& log) {
  const ScenarioSpec& s = log.config.scenario;
  const StepRecord& last = log.final_step();
  const std::string prefix = log.run_id + "," + std::string(mode_name(log.config.options.mode)) + "," +
                             std::to_string(s.seed) + ",";
  out << "run_id,mode,seed,class,weight,final_step,expected_accuracy,expected_length,entropy";
  for (ReasoningFormat f : kAllFormats) out << ",p_" << format_name(f);
  out << '\n';

  FormatDistribution weighted = FormatDistribution::Zero();
  double weighted_entropy = 0.0;
  for (std::size_t c = 0; c < last.classes.size(); ++c) {
    const auto& cls = last.classes[c];
    const double w = s.task_classes[c].weight;
    weighted += w * cls.distribution;
    weighted_entropy += w * cls.entropy;
    out << prefix << s.task_classes[c].name << ',' << format_number(w) << ',' << last.step << ','
        << format_number(cls.expected_accuracy) << ',' << format_number(cls.expected_length) << ','
        << format_number(cls.entropy);
    for (double p : cls.distribution) out << ',' << format_number(p);
    out << '\n';
  }
  out << prefix << "ALL,1," << last.step << ',' << format_number(weighted_expected_accuracy(s, last))
      << ',' << format_number(weighted_expected_length(s, last)) << ',' << format_number(weighted_entropy);
  for (double p : weighted) out << ',' << format_number(p);
  out << '\n';
  if (!out) throw IoError("failed writing summary CSV");
}

}  // namespace arm_alp
