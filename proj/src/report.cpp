#include "arm_alp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "arm_alp/errors.hpp"

namespace arm_alp {

namespace fs = std::filesystem;

namespace {

double normal_cdf(double x, double mean, double spread) {
  if (spread <= 0.0) return x < mean ? 0.0 : 1.0;
  return 0.5 * std::erfc(-(x - mean) / (spread * std::sqrt(2.0)));
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void write_trajectory(std::ostream& out, const RunLog& log) {
  out << "step,class,expected_accuracy,expected_length,entropy";
  for (ReasoningFormat f : kAllFormats) out << ",p_" << format_name(f);
  out << '\n';
  for (const auto& step : log.steps) {
    for (std::size_t c = 0; c < step.classes.size(); ++c) {
      const auto& cls = step.classes[c];
      out << step.step << ',' << log.config.scenario.task_classes[c].name << ','
          << format_number(cls.expected_accuracy) << ',' << format_number(cls.expected_length) << ','
          << format_number(cls.entropy);
      for (double p : cls.distribution) out << ',' << format_number(p);
      out << '\n';
    }
  }
}

void write_format_distribution(std::ostream& out, const RunLog& log) {
  out << "class,format,initial_probability,final_probability\n";
  const auto& first = log.steps.front();
  const auto& last = log.final_step();
  for (std::size_t c = 0; c < last.classes.size(); ++c) {
    for (ReasoningFormat f : kAllFormats) {
      const auto k = static_cast<Eigen::Index>(format_index(f));
      out << log.config.scenario.task_classes[c].name << ',' << format_name(f) << ','
          << format_number(first.classes[c].distribution[k]) << ','
          << format_number(last.classes[c].distribution[k]) << '\n';
    }
  }
}

void write_histogram(std::ostream& out, const RunLog& log) {
  out << "class,bin_lo,bin_hi,probability\n";
  const auto& last = log.final_step();
  for (std::size_t c = 0; c < last.classes.size(); ++c) {
    const auto& tc = log.config.scenario.task_classes[c];
    for (const auto& bin : length_histogram(tc, last.classes[c].distribution)) {
      out << tc.name << ',' << format_number(bin.lo) << ',' << format_number(bin.hi) << ','
          << format_number(bin.probability) << '\n';
    }
  }
}

}  // namespace

std::vector<LengthBin> length_histogram(const TaskClass& task_class, const FormatDistribution& policy,
                                        int bins) {
  double upper = 1.0;
  for (ReasoningFormat f : kAllFormats) {
    const auto& p = task_class.profile(f);
    upper = std::max(upper, p.length_mean + 3.0 * p.length_spread);
  }
  const double width = upper / bins;
  std::vector<LengthBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    auto& bin = out[static_cast<std::size_t>(b)];
    bin.lo = b * width;
    bin.hi = (b + 1) * width;
    for (ReasoningFormat f : kAllFormats) {
      const auto& p = task_class.profile(f);
      const double lo = b == 0 ? -INFINITY : bin.lo;
      const double hi = b == bins - 1 ? INFINITY : bin.hi;
      const double mass = normal_cdf(hi, p.length_mean, p.length_spread) -
                          normal_cdf(lo, p.length_mean, p.length_spread);
      bin.probability += policy[static_cast<Eigen::Index>(format_index(f))] * mass;
    }
  }
  return out;
}

std::vector<TokenReduction> token_reductions(const std::vector<RunLog>& logs) {
  std::vector<const RunLog*> alp, plain;
  for (const auto& log : logs) {
    (log.config.options.mode == TrainingMode::ALP ? alp : plain).push_back(&log);
  }
  std::vector<TokenReduction> rows;
  if (alp.empty() || plain.empty()) return rows;

  for (const RunLog* a : alp) {
    const RunLog* p = plain.front();
    for (const RunLog* cand : plain) {
      if (cand->config.scenario.seed == a->config.scenario.seed) {
        p = cand;
        break;
      }
    }
    const auto& ac = a->config.scenario.task_classes;
    const auto& pc = p->config.scenario.task_classes;
    if (ac.size() != pc.size()) throw ValidationError("task_classes", "paired runs disagree on task classes");
    for (std::size_t c = 0; c < ac.size(); ++c) {
      if (ac[c].name != pc[c].name) throw ValidationError("task_classes", "paired runs disagree on task classes");
    }
    auto row = [&](std::string name, double alp_len, double plain_len) {
      return TokenReduction{std::move(name), a->run_id, p->run_id, alp_len, plain_len,
                            100.0 * (alp_len - plain_len) / plain_len};
    };
    for (std::size_t c = 0; c < ac.size(); ++c) {
      rows.push_back(row(ac[c].name, a->final_step().classes[c].expected_length,
                         p->final_step().classes[c].expected_length));
    }
    rows.push_back(row("ALL", weighted_expected_length(a->config.scenario, a->final_step()),
                       weighted_expected_length(p->config.scenario, p->final_step())));
  }
  return rows;
}

ReportResult write_report(const std::vector<RunLog>& logs, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  ReportResult result;
  for (const auto& log : logs) {
    if (!log.has_training_steps()) result.notes.push_back(log.run_id + ": no training steps");
    const fs::path traj = out_dir / (log.run_id + ".trajectory.csv");
    const fs::path dist = out_dir / (log.run_id + ".format_distribution.csv");
    const fs::path hist = out_dir / (log.run_id + ".length_histogram.csv");
    {
      auto out = open_out(traj);
      write_trajectory(out, log);
    }
    {
      auto out = open_out(dist);
      write_format_distribution(out, log);
    }
    {
      auto out = open_out(hist);
      write_histogram(out, log);
    }
    result.files.insert(result.files.end(), {traj, dist, hist});
  }

  const auto reductions = token_reductions(logs);
  if (!reductions.empty()) {
    const fs::path cross = out_dir / "cross_run.csv";
    auto out = open_out(cross);
    out << "class,alp_run_id,plain_run_id,alp_expected_length,plain_expected_length,token_reduction_pct\n";
    for (const auto& r : reductions) {
      out << r.class_name << ',' << r.alp_run_id << ',' << r.plain_run_id << ',' << format_number(r.alp_length)
          << ',' << format_number(r.plain_length) << ',' << format_number(r.reduction_pct) << '\n';
    }
    result.files.push_back(cross);
  } else {
    result.notes.push_back("cross-run comparison omitted: needs both an ALP and a PlainGRPO run");
  }

  const fs::path summary = out_dir / "report.txt";
  {
    auto out = open_out(summary);
    for (const auto& log : logs) {
      const auto& last = log.final_step();
      out << log.run_id << " mode=" << mode_name(log.config.options.mode)
          << " steps=" << (log.steps.size() - 1)
          << " mean_expected_length=" << format_number(weighted_expected_length(log.config.scenario, last))
          << " mean_expected_accuracy=" << format_number(weighted_expected_accuracy(log.config.scenario, last))
          << '\n';
    }
    for (const auto& r : reductions) {
      if (r.class_name == "ALL") {
        out << "token reduction " << r.alp_run_id << " vs " << r.plain_run_id << ": "
            << format_number(r.reduction_pct) << "%\n";
      }
    }
    for (const auto& note : result.notes) out << "note: " << note << '\n';
  }
  result.files.push_back(summary);
  return result;
}

}  // namespace arm_alp
