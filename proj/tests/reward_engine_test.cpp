#include <doctest.h>

#include <cmath>
#include <random>

#include "arm_alp/reward_engine.hpp"
#include "reward_oracle.hpp"

using namespace arm_alp;

namespace {

using F = ReasoningFormat;

RolloutGroup make_group(const std::vector<F>& formats, const std::vector<bool>& correct,
                        const std::vector<std::int64_t>& lengths) {
  std::vector<Rollout> rs;
  for (std::size_t i = 0; i < formats.size(); ++i) {
    rs.push_back({static_cast<std::int64_t>(i), formats[i], "", correct[i], lengths[i]});
  }
  return RolloutGroup("q", std::move(rs));
}

RolloutGroup uniform_lengths(const std::vector<F>& formats, bool correct = true, std::int64_t len = 100) {
  return make_group(formats, std::vector<bool>(formats.size(), correct),
                    std::vector<std::int64_t>(formats.size(), len));
}

}  // namespace

TEST_CASE("group construction") {
  CHECK_THROWS_AS(uniform_lengths({F::LongCoT}), GroupTooSmall);
  const auto g = make_group({F::LongCoT, F::DirectAnswer, F::Malformed}, {true, false, true}, {300, 5, 40});
  CHECK(g.census(F::LongCoT) == 1);
  CHECK(g.census(F::Malformed) == 1);
  CHECK(g.l_min() == 5);
  CHECK(g.l_max() == 300);
  CHECK(base_reward(g[2]) == 0);  // malformed never earns reward
}

TEST_CASE("format encouragement") {
  // G=8, format appears twice -> 4.
  const auto g = uniform_lengths({F::ShortCoT, F::ShortCoT, F::LongCoT, F::LongCoT, F::LongCoT, F::LongCoT,
                                  F::LongCoT, F::LongCoT});
  CHECK(format_encouragement(g, 0) == 4.0);

  const auto same = uniform_lengths(std::vector<F>(8, F::CodeText));
  for (std::size_t i = 0; i < 8; ++i) CHECK(format_encouragement(same, i) == 1.0);

  // census {LongCoT:5, DirectAnswer:1, ShortCoT:2}; brute-force the count.
  const std::vector<F> formats = {F::LongCoT, F::DirectAnswer, F::LongCoT, F::ShortCoT,
                                  F::LongCoT, F::ShortCoT,     F::LongCoT, F::LongCoT};
  const auto mixed = uniform_lengths(formats);
  int count = 0;
  for (F f : formats) count += f == F::DirectAnswer;
  CHECK(format_encouragement(mixed, 1) == 8.0 / count);
  CHECK(format_encouragement(mixed, 1) == 8.0);

  const auto with_bad = uniform_lengths({F::Malformed, F::Malformed, F::LongCoT, F::ShortCoT});
  CHECK(format_encouragement(with_bad, 0) == 1.0);
  CHECK(format_encouragement(with_bad, 2) == 4.0);
}

TEST_CASE("length penalty") {
  const PenaltyParams<double> p{0.5, 1e-6};
  const auto g = make_group({F::ShortCoT, F::LongCoT, F::CodeText}, {true, true, true}, {100, 500, 300});
  CHECK(length_penalty(g, 0, p) == 1.0);
  CHECK(length_penalty(g, 1, p) == doctest::Approx(0.606531).epsilon(1e-4));
  CHECK(std::abs(length_penalty(g, 1, p) - std::exp(-0.5)) < 1e-4);

  const auto flat = uniform_lengths({F::ShortCoT, F::LongCoT, F::CodeText});
  for (std::size_t i = 0; i < 3; ++i) CHECK(length_penalty(flat, i, p) == 1.0);

  CHECK_THROWS_AS((PenaltyParams<double>{-1.0, 1e-6}.validate()), ValidationError);
  CHECK_THROWS_AS((PenaltyParams<double>{0.5, 0.0}.validate()), ValidationError);
}

TEST_CASE("cosine decay") {
  CHECK(cosine_decay(4.0, Schedule<double>{0, 100, 1.0}) == 4.0);
  CHECK(cosine_decay(4.0, Schedule<double>{100, 100, 1.0}) == 1.0);
  CHECK(cosine_decay(4.0, Schedule<double>{50, 100, 1.0}) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS((Schedule<double>{5, 4, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((Schedule<double>{0, 0, 1.0}.validate()), ValidationError);

  // Monotone toward b from either side.
  for (double v : {4.0, 0.25}) {
    double prev = v;
    for (std::int64_t t = 1; t <= 64; ++t) {
      const double now = cosine_decay(v, Schedule<double>{t, 64, 1.0});
      if (v > 1.0) CHECK(now <= prev);
      else CHECK(now >= prev);
      prev = now;
    }
  }
}

TEST_CASE("shape_group decay modes") {
  const PenaltyParams<double> p{};
  const auto g = make_group({F::DirectAnswer, F::LongCoT, F::LongCoT, F::LongCoT}, {true, false, true, true},
                            {100, 100, 100, 100});
  const auto start = shape_group(g, p, Schedule<double>{0, 10, 1.0});
  CHECK(start[1].r_tilde == 0.0);
  CHECK(start[0].alpha == 4.0);
  CHECK(start[0].r_tilde == 4.0);
  const auto start_literal = shape_group(g, p, Schedule<double>{0, 10, 1.0}, DecayMode::LiteralDecay);
  CHECK(start_literal[0].r_tilde == 4.0);

  for (std::int64_t t : {0, 3, 7, 10}) {
    const auto tr = shape_group(g, p, Schedule<double>{t, 10, 1.0});
    CHECK(tr[1].r_tilde == 0.0);
    for (const auto& x : tr) {
      CHECK(x.r_prime == x.alpha * x.r);
      CHECK(x.r_double_prime == x.beta * x.r_prime);
    }
  }
  const auto literal_end = shape_group(g, p, Schedule<double>{10, 10, 1.0}, DecayMode::LiteralDecay);
  CHECK(literal_end[1].r_tilde == 1.0);

  const auto plain = shape_group(g, p, Schedule<double>{0, 10, 1.0}, DecayMode::FactorDecay,
                                 ShapingComponents::plain());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(plain[i].r_tilde == double(base_reward(g[i])));
}

TEST_CASE("group advantage") {
  const auto a = group_advantage(std::vector<double>{1.0, 0.0});
  CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(-1.0).epsilon(1e-12));

  const auto flat = group_advantage(std::vector<double>{2.5, 2.5, 2.5});
  CHECK(flat.isZero(0.0));

  // Brute-force z-score for [4, 1, 1, 1]: mean 1.75, population sd sqrt(27/16).
  const auto b = group_advantage(std::vector<double>{4.0, 1.0, 1.0, 1.0});
  const double sd = std::sqrt((2.25 * 2.25 + 3 * 0.75 * 0.75) / 4.0);
  CHECK(b[0] == doctest::Approx(2.25 / sd).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(-0.75 / sd).epsilon(1e-12));
  CHECK(std::abs(b.mean()) < 1e-12);

  CHECK_THROWS_AS(group_advantage(std::vector<double>{1.0}), GroupTooSmall);
}

TEST_CASE("advantage is shift and scale invariant") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-5, 5), s(0.1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Vector<double> r(8);
    for (auto& x : r) x = u(gen);
    const auto base = group_advantage(r);
    const double shift = u(gen), scale = s(gen);
    const Vector<double> shifted = (r.array() + shift).matrix();
    CHECK((group_advantage(shifted) - base).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((group_advantage(Vector<double>(scale * r)) - base).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(base.mean()) < 1e-9);
    CHECK(std::abs(std::sqrt(base.squaredNorm() / 8.0) - 1.0) < 1e-9);
  }
}

TEST_CASE("float scalar instantiation") {
  const auto g = make_group({F::ShortCoT, F::LongCoT}, {true, true}, {10, 20});
  const auto tr = shape_group<float>(g, PenaltyParams<float>{}, Schedule<float>{0, 4, 1.0f});
  CHECK(tr[0].r_tilde == doctest::Approx(2.0f));
  CHECK(tr[1].beta == doctest::Approx(std::exp(-0.5f)).epsilon(1e-4));
}

namespace {

struct RandomGroup {
  RolloutGroup group;
  oracle::Input input;
};

RandomGroup random_group(std::mt19937_64& gen, bool allow_malformed) {
  std::uniform_int_distribution<int> fmt(0, allow_malformed ? 5 : 4), coin(0, 1);
  std::uniform_int_distribution<long long> len(1, 4000), step(0, 500);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  oracle::Input in;
  std::vector<Rollout> rs;
  for (int i = 0; i < 8; ++i) {
    in.format.push_back(fmt(gen));
    in.correct.push_back(coin(gen));
    in.length.push_back(len(gen));
    rs.push_back({i, static_cast<F>(in.format.back()), "", in.correct.back() == 1, in.length.back()});
  }
  in.lambda = lam(gen);
  in.total = 500;
  in.t = step(gen);
  return {RolloutGroup("q", std::move(rs)), in};
}

}  // namespace

TEST_CASE("shape_group matches the independent oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    auto [group, in] = random_group(gen, true);
    in.literal = trial % 2 == 1;
    const auto want = oracle::evaluate(in);
    const auto got = shape_group(group, PenaltyParams<double>{in.lambda, in.epsilon},
                                 Schedule<double>{in.t, in.total, in.baseline},
                                 in.literal ? DecayMode::LiteralDecay : DecayMode::FactorDecay);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i].alpha - want.alpha[i]) < 1e-12);
      CHECK(std::abs(got[i].beta - want.beta[i]) < 1e-12);
      CHECK(std::abs(got[i].r_double_prime - want.r_double_prime[i]) < 1e-12);
      CHECK(std::abs(got[i].r_tilde - want.r_tilde[i]) < 1e-12);
      CHECK(std::abs(got[i].advantage - want.advantage[i]) < 1e-12);
    }
  }
}

TEST_CASE("alpha conservation and beta bounds") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto [group, in] = random_group(gen, true);
    const PenaltyParams<double> p{in.lambda, 1e-6};
    int total = 0;
    for (F f : kAllFormats) total += group.census(f);
    total += group.census(F::Malformed);
    CHECK(total == 8);
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i].format != F::Malformed) {
        CHECK(format_encouragement(group, i) == 8.0 / group.census(group[i].format));
      }
      const double beta = length_penalty(group, i, p);
      CHECK(beta <= 1.0);
      CHECK(beta >= std::exp(-p.lambda) - 1e-9);
      if (group[i].length == group.l_min()) CHECK(beta == 1.0);
    }
  }
}

TEST_CASE("shaped reward is non-increasing in length") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<long long> len(1, 2000);
  for (DecayMode mode : {DecayMode::FactorDecay, DecayMode::LiteralDecay}) {
    for (int trial = 0; trial < 100; ++trial) {
      // Two correct ShortCoT rollouts sharing a group; the longer one never
      // scores more.
      std::vector<Rollout> rs = {{0, F::ShortCoT, "", true, len(gen)}, {1, F::ShortCoT, "", true, len(gen)},
                                 {2, F::LongCoT, "", false, len(gen)}, {3, F::DirectAnswer, "", true, len(gen)}};
      const RolloutGroup g("q", rs);
      const auto tr = shape_group(g, PenaltyParams<double>{}, Schedule<double>{trial % 11, 10}, mode);
      if (g[0].length <= g[1].length) CHECK(tr[0].r_tilde >= tr[1].r_tilde);
      else CHECK(tr[0].r_tilde <= tr[1].r_tilde);
    }
  }
}

TEST_CASE("rare format dominance at t = 0") {
  for (std::size_t G : {2u, 4u, 8u, 16u}) {
    std::vector<F> formats(G, F::LongCoT);
    formats[0] = F::DirectAnswer;
    const auto g = uniform_lengths(formats);
    const auto tr = shape_group(g, PenaltyParams<double>{}, Schedule<double>{0, 10, 1.0});
    CHECK(tr[0].r_tilde / tr[1].r_tilde == doctest::Approx(double(G - 1)).epsilon(1e-12));
  }
}
