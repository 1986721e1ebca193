#pragma once

// Independent, loop-only evaluation of the shaping chain used as a test
// oracle. Shares no code with reward_engine.hpp.

#include <cmath>
#include <vector>

namespace oracle {

struct Input {
  std::vector<int> format;  // 0..4 real formats, 5 = malformed
  std::vector<int> correct;
  std::vector<long long> length;
  double lambda = 0.5;
  double epsilon = 1e-6;
  long long t = 0;
  long long total = 1;
  double baseline = 1.0;
  bool literal = false;
};

struct Output {
  std::vector<double> alpha, beta, r_double_prime, r_tilde, advantage;
};

inline Output evaluate(const Input& in) {
  const int g = static_cast<int>(in.format.size());
  long long lo = in.length[0], hi = in.length[0];
  for (long long l : in.length) {
    lo = l < lo ? l : lo;
    hi = l > hi ? l : hi;
  }
  const double pi = std::acos(-1.0);
  Output out;
  for (int i = 0; i < g; ++i) {
    int same = 0;
    for (int j = 0; j < g; ++j) same += in.format[j] == in.format[i];
    const double a = in.format[i] == 5 ? 1.0 : double(g) / same;
    const double b = std::exp(-in.lambda * double(in.length[i] - lo) / (double(hi - lo) + in.epsilon));
    const int r = in.format[i] == 5 ? 0 : in.correct[i];
    const double cosine = 0.5 * (1.0 + std::cos(pi * double(in.t) / double(in.total)));
    const double rdp = a * b * r;
    const double rt = in.literal ? in.baseline + (rdp - in.baseline) * cosine
                                 : (in.baseline + (a * b - in.baseline) * cosine) * r;
    out.alpha.push_back(a);
    out.beta.push_back(b);
    out.r_double_prime.push_back(rdp);
    out.r_tilde.push_back(rt);
  }
  double mean = 0.0;
  for (double v : out.r_tilde) mean += v / g;
  double var = 0.0;
  for (double v : out.r_tilde) var += (v - mean) * (v - mean) / g;
  const double sd = std::sqrt(var);
  for (double v : out.r_tilde) out.advantage.push_back(sd < 1e-12 ? 0.0 : (v - mean) / sd);
  return out;
}

}  // namespace oracle
