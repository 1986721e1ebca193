#include "arm_alp/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "arm_alp/errors.hpp"

namespace arm_alp {

using nlohmann::json;

namespace {

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number_field(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) throw ValidationError(path + key, "must be a number");
  return v->get<double>();
}

std::int64_t integer_field(const json& obj, const char* key, const std::string& path,
                           std::int64_t fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) throw ValidationError(path + key, "must be an integer");
  return v->get<std::int64_t>();
}

bool bool_field(const json& obj, const char* key, const std::string& path, bool fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) throw ValidationError(path + key, "must be true or false");
  return v->get<bool>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ValidationError(path + key, "unknown key");
  }
}

TaskClass parse_task_class(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "must be an object");
  reject_unknown(j, {"name", "weight", "per_format"}, path + ".");
  TaskClass tc;
  const json* name = find(j, "name");
  if (name == nullptr || !name->is_string()) throw ValidationError(path + ".name", "required string");
  tc.name = name->get<std::string>();
  tc.weight = number_field(j, "weight", path + ".", -1.0);
  if (find(j, "weight") == nullptr) throw ValidationError(path + ".weight", "required");

  const json* per_format = find(j, "per_format");
  if (per_format == nullptr || !per_format->is_object()) {
    throw ValidationError(path + ".per_format", "required object");
  }
  for (const auto& [key, _] : per_format->items()) {
    const auto f = parse_format_name(key);
    if (!f || *f == ReasoningFormat::Malformed) {
      throw ValidationError(path + ".per_format." + key, "unknown reasoning format");
    }
  }
  for (ReasoningFormat f : kAllFormats) {
    const std::string fpath = path + ".per_format." + std::string(format_name(f));
    const json* p = find(*per_format, std::string(format_name(f)).c_str());
    if (p == nullptr || !p->is_object()) throw ValidationError(fpath, "required object");
    reject_unknown(*p, {"accuracy", "length_mean", "length_spread"}, fpath + ".");
    if (find(*p, "accuracy") == nullptr) throw ValidationError(fpath + ".accuracy", "required");
    if (find(*p, "length_mean") == nullptr) throw ValidationError(fpath + ".length_mean", "required");
    FormatProfile& prof = tc.per_format[format_index(f)];
    prof.accuracy = number_field(*p, "accuracy", fpath + ".", 0.0);
    prof.length_mean = number_field(*p, "length_mean", fpath + ".", 1.0);
    // Spread defaults to 20% of the mean.
    prof.length_spread = number_field(*p, "length_spread", fpath + ".", 0.2 * prof.length_mean);
  }
  return tc;
}

}  // namespace

std::string_view mode_name(TrainingMode mode) {
  return mode == TrainingMode::ALP ? "ALP" : "PlainGRPO";
}

std::string_view decay_mode_name(DecayMode mode) {
  return mode == DecayMode::FactorDecay ? "FactorDecay" : "LiteralDecay";
}

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("", "configuration must be a JSON object");
  reject_unknown(doc,
                 {"task_classes", "group_size", "steps", "seed", "groups_per_step", "mode", "lambda",
                  "epsilon", "baseline", "decay_mode", "components", "clip_ratio", "learning_rate",
                  "epochs_per_batch"},
                 "");

  RunConfig cfg;
  const json* classes = find(doc, "task_classes");
  if (classes == nullptr) throw ValidationError("task_classes", "required field is missing");
  if (!classes->is_array()) throw ValidationError("task_classes", "must be an array");
  for (std::size_t i = 0; i < classes->size(); ++i) {
    cfg.scenario.task_classes.push_back(
        parse_task_class((*classes)[i], "task_classes[" + std::to_string(i) + "]"));
  }

  ScenarioSpec& s = cfg.scenario;
  s.group_size = static_cast<int>(integer_field(doc, "group_size", "", s.group_size));
  s.steps = integer_field(doc, "steps", "", s.steps);
  s.groups_per_step = static_cast<int>(integer_field(doc, "groups_per_step", "", s.groups_per_step));
  if (const json* seed = find(doc, "seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
      throw ValidationError("seed", "must be a non-negative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }

  TrainingOptions& o = cfg.options;
  if (const json* mode = find(doc, "mode")) {
    const std::string m = mode->is_string() ? mode->get<std::string>() : "";
    if (m == "ALP") o.mode = TrainingMode::ALP;
    else if (m == "PlainGRPO") o.mode = TrainingMode::PlainGRPO;
    else throw ValidationError("mode", "must be \"ALP\" or \"PlainGRPO\"");
  }
  if (const json* dm = find(doc, "decay_mode")) {
    const std::string m = dm->is_string() ? dm->get<std::string>() : "";
    if (m == "FactorDecay") o.decay_mode = DecayMode::FactorDecay;
    else if (m == "LiteralDecay") o.decay_mode = DecayMode::LiteralDecay;
    else throw ValidationError("decay_mode", "must be \"FactorDecay\" or \"LiteralDecay\"");
  }
  if (const json* comp = find(doc, "components")) {
    if (!comp->is_object()) throw ValidationError("components", "must be an object");
    reject_unknown(*comp, {"format_encouragement", "length_penalty", "cosine_decay"}, "components.");
    o.components.format_encouragement =
        bool_field(*comp, "format_encouragement", "components.", o.components.format_encouragement);
    o.components.length_penalty = bool_field(*comp, "length_penalty", "components.", o.components.length_penalty);
    o.components.cosine_decay = bool_field(*comp, "cosine_decay", "components.", o.components.cosine_decay);
  }
  o.penalty.lambda = number_field(doc, "lambda", "", o.penalty.lambda);
  o.penalty.epsilon = number_field(doc, "epsilon", "", o.penalty.epsilon);
  o.baseline = number_field(doc, "baseline", "", o.baseline);
  o.update.clip_ratio = number_field(doc, "clip_ratio", "", o.update.clip_ratio);
  o.update.learning_rate = number_field(doc, "learning_rate", "", o.update.learning_rate);
  o.update.epochs_per_batch =
      static_cast<int>(integer_field(doc, "epochs_per_batch", "", o.update.epochs_per_batch));

  s.validate();
  o.penalty.validate();
  o.update.validate();
  return cfg;
}

nlohmann::json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ValidationError("line " + std::to_string(line), "invalid JSON");
  }
  return doc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_config_document(path));
}

json to_json(const RunConfig& config) {
  json classes = json::array();
  for (const auto& tc : config.scenario.task_classes) {
    json per_format = json::object();
    for (ReasoningFormat f : kAllFormats) {
      const auto& p = tc.profile(f);
      per_format[std::string(format_name(f))] = {
          {"accuracy", p.accuracy}, {"length_mean", p.length_mean}, {"length_spread", p.length_spread}};
    }
    classes.push_back({{"name", tc.name}, {"weight", tc.weight}, {"per_format", per_format}});
  }
  const auto& o = config.options;
  return {
      {"task_classes", classes},
      {"group_size", config.scenario.group_size},
      {"steps", config.scenario.steps},
      {"seed", config.scenario.seed},
      {"groups_per_step", config.scenario.groups_per_step},
      {"mode", mode_name(o.mode)},
      {"lambda", o.penalty.lambda},
      {"epsilon", o.penalty.epsilon},
      {"baseline", o.baseline},
      {"decay_mode", decay_mode_name(o.decay_mode)},
      {"components",
       {{"format_encouragement", o.components.format_encouragement},
        {"length_penalty", o.components.length_penalty},
        {"cosine_decay", o.components.cosine_decay}}},
      {"clip_ratio", o.update.clip_ratio},
      {"learning_rate", o.update.learning_rate},
      {"epochs_per_batch", o.update.epochs_per_batch},
  };
}

}  // namespace arm_alp
