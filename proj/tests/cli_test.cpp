#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "arm_alp/commands.hpp"
#include "arm_alp/run_config.hpp"
#include "arm_alp/run_log.hpp"

using namespace arm_alp;
using namespace arm_alp::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScenario = ARM_ALP_SCENARIO_DIR "/collapse.json";
const fs::path kData = ARM_ALP_TEST_DATA_DIR;

struct TempDir {
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("arm_alp_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("simulate validates the config") {
  TempDir dir;
  json doc = json::parse(slurp(kScenario));
  doc.erase("task_classes");
  write_file(dir.path / "bad.json", doc.dump());
  std::ostringstream out, err;
  CHECK(cmd_simulate({dir.path / "bad.json", dir.path, {}}, out, err) == kExitUsage);
  CHECK(err.str().find("task_classes") != std::string::npos);

  write_file(dir.path / "broken.json", "{\n  \"steps\": 3,\n  oops\n}");
  err.str("");
  CHECK(cmd_simulate({dir.path / "broken.json", dir.path, {}}, out, err) == kExitUsage);
  CHECK(err.str().find("line 3") != std::string::npos);

  err.str("");
  CHECK(cmd_simulate({dir.path / "missing.json", dir.path, {}}, out, err) == kExitIo);

  doc = json::parse(slurp(kScenario));
  doc["stepz"] = 1;
  write_file(dir.path / "typo.json", doc.dump());
  err.str("");
  CHECK(cmd_simulate({dir.path / "typo.json", dir.path, {}}, out, err) == kExitUsage);
  CHECK(err.str().find("stepz") != std::string::npos);
}

TEST_CASE("simulate with steps=0 logs the initial snapshot only") {
  TempDir dir;
  SimulateArgs args{kScenario, dir.path, {}};
  args.overrides.steps = 0;
  std::ostringstream out, err;
  REQUIRE(cmd_simulate(args, out, err) == kExitOk);
  const auto paths = lines_of(out.str());
  REQUIRE(paths.size() == 2);
  std::ifstream in(paths[0]);
  const RunLog log = read_run_log(in);
  REQUIRE(log.steps.size() == 1);
  CHECK(log.steps[0].step == 0);
  CHECK_FALSE(log.has_training_steps());
}

TEST_CASE("simulate is deterministic and the embedded config round-trips") {
  TempDir a, b;
  SimulateArgs args{kScenario, a.path, {}};
  args.overrides.steps = 25;
  args.overrides.seed = 7;
  std::ostringstream out_a, out_b, err;
  REQUIRE(cmd_simulate(args, out_a, err) == kExitOk);
  args.out_dir = b.path;
  REQUIRE(cmd_simulate(args, out_b, err) == kExitOk);
  const auto pa = lines_of(out_a.str()), pb = lines_of(out_b.str());
  CHECK(slurp(pa[1]) == slurp(pb[1]));
  CHECK(slurp(pa[0]) == slurp(pb[0]));

  std::ifstream in(pa[0]);
  const RunLog log = read_run_log(in);
  const RunConfig again = parse_run_config(to_json(log.config));
  CHECK(to_json(again) == to_json(log.config));
  CHECK(log.config.scenario.seed == 7);
  CHECK(log.config.scenario.steps == 25);
  const RunLog rerun = simulate(again);
  for (std::size_t c = 0; c < log.config.scenario.task_classes.size(); ++c) {
    CHECK(rerun.final_step().classes[c].distribution == log.final_step().classes[c].distribution);
  }
}

TEST_CASE("shape") {
  ShapeArgs args;
  args.total = 10;
  std::ostringstream out, err;
  std::istringstream two(
      R"({"question_id": "q", "rollouts": [{"id": 0, "format": "ShortCoT", "correct": true, "length": 10},)"
      R"( {"id": 1, "format": "LongCoT", "correct": false, "length": 90}]})"
      "\n");
  CHECK(cmd_shape(args, two, out, err) == kExitOk);
  const auto recs = lines_of(out.str());
  REQUIRE(recs.size() == 2);
  CHECK(json::parse(recs[0])["id"] == 0);
  CHECK(json::parse(recs[1])["id"] == 1);

  std::istringstream empty("");
  out.str("");
  CHECK(cmd_shape(args, empty, out, err) == kExitOk);
  CHECK(out.str().empty());

  std::istringstream bad(
      R"({"question_id": "q", "rollouts": [{"id": 0, "format": "ShortCoT", "correct": true, "length": 10}, {"id": 1, "format": "ShortCoT", "correct": true, "length": 10}]})"
      "\n{not json\n");
  err.str("");
  CHECK(cmd_shape(args, bad, out, err) == kExitUsage);
  CHECK(err.str().find("line 2") != std::string::npos);

  std::istringstream tiny(R"({"question_id": "q", "rollouts": [{"id": 0, "format": "ShortCoT", "correct": true, "length": 10}]})");
  err.str("");
  CHECK(cmd_shape(args, tiny, out, err) == kExitUsage);
  CHECK(err.str().find("line 1") != std::string::npos);
}

TEST_CASE("shape matches the golden traces") {
  ShapeArgs args;
  args.t = 3;
  args.total = 10;
  std::ifstream in(kData / "shape_golden_input.jsonl");
  std::ostringstream out, err;
  REQUIRE(cmd_shape(args, in, out, err) == kExitOk);
  const auto got = lines_of(out.str());
  const auto want = lines_of(slurp(kData / "shape_golden_expected.jsonl"));
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    const json g = json::parse(got[i]), w = json::parse(want[i]);
    CHECK(g["question_id"] == w["question_id"]);
    CHECK(g["id"] == w["id"]);
    CHECK(g["format"] == w["format"]);
    for (const char* key : {"r", "alpha", "beta", "r_prime", "r_double_prime", "r_tilde", "advantage"}) {
      INFO(i << " " << key);
      CHECK(g[key].get<double>() == doctest::Approx(w[key].get<double>()).epsilon(1e-12));
    }
  }
}

TEST_CASE("report") {
  TempDir dir;
  std::ostringstream out, err;
  std::vector<fs::path> logs;
  for (const char* mode : {"ALP", "PlainGRPO"}) {
    SimulateArgs args{kScenario, dir.path / "runs", {}};
    args.overrides.mode = mode;
    args.overrides.steps = 150;
    out.str("");
    REQUIRE(cmd_simulate(args, out, err) == kExitOk);
    logs.push_back(lines_of(out.str())[0]);
  }

  err.str("");
  out.str("");
  REQUIRE(cmd_report({{logs[0]}, dir.path / "single"}, out, err) == kExitOk);
  CHECK_FALSE(fs::exists(dir.path / "single" / "cross_run.csv"));
  CHECK(err.str().find("cross-run comparison omitted") != std::string::npos);

  REQUIRE(cmd_report({logs, dir.path / "pair"}, out, err) == kExitOk);
  const auto rows = lines_of(slurp(dir.path / "pair" / "cross_run.csv"));
  bool easy_negative = false;
  for (const auto& row : rows) {
    if (row.rfind("easy,", 0) == 0) easy_negative = row.find(",-") != std::string::npos;
  }
  CHECK(easy_negative);

  // Reports are pure functions of their inputs.
  REQUIRE(cmd_report({logs, dir.path / "pair2"}, out, err) == kExitOk);
  for (const auto& entry : fs::directory_iterator(dir.path / "pair")) {
    CHECK(slurp(entry.path()) == slurp(dir.path / "pair2" / entry.path().filename()));
  }

  SimulateArgs zero{kScenario, dir.path / "zero", {}};
  zero.overrides.steps = 0;
  out.str("");
  REQUIRE(cmd_simulate(zero, out, err) == kExitOk);
  err.str("");
  REQUIRE(cmd_report({{lines_of(out.str())[0]}, dir.path / "zero_report"}, out, err) == kExitOk);
  CHECK(err.str().find("no training steps") != std::string::npos);
  CHECK(slurp(dir.path / "zero_report" / "report.txt").find("no training steps") != std::string::npos);

  write_file(dir.path / "junk.jsonl", "{\"record\": \"step\"}\n");
  CHECK(cmd_report({{dir.path / "junk.jsonl"}, dir.path / "junk"}, out, err) == kExitUsage);
  CHECK(cmd_report({{dir.path / "nope.jsonl"}, dir.path / "junk"}, out, err) == kExitIo);
}

TEST_CASE("vote and parse commands") {
  std::istringstream votes(R"({"answer": "A", "tokens": 100})" "\n" R"({"answer": "B", "tokens": 100})" "\n"
                           R"({"answer": "B", "tokens": 100})" "\n");
  std::ostringstream out, err;
  REQUIRE(cmd_vote({150}, votes, out, err) == kExitOk);
  const json v = json::parse(out.str());
  CHECK(v["winner"] == "A");
  CHECK(v["samples_used"] == 1);

  std::istringstream response("<COT>\nthink\n</COT>\n<ANSWER>\n42\n</ANSWER>\n");
  out.str("");
  REQUIRE(cmd_parse({}, response, out, err) == kExitOk);
  CHECK(json::parse(out.str())["format"] == "ShortCoT");
}
