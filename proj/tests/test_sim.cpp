#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "catsurf/score.hpp"
#include "catsurf/sim.hpp"

using namespace catsurf;

namespace {

Configuration blocked(const std::string& text) {
  return Configuration::parse(text, Boundary::Blocked);
}

// Absorption probability into gas 1 for a blocked lattice of `size` sites
// with two gases, by value iteration on a hand-coded jump chain. Arrival
// rules are written out independently of the library: an arrival at an
// occupied site does nothing; otherwise it removes a differing neighbour
// (each with probability 1/2 when there are two) or sticks.
double exact_two_gas_absorption(int size, double p) {
  const double rate[3] = {0.0, p, 1.0 - p};
  std::vector<std::array<int, 4>> states;
  std::array<int, 4> s{};
  std::function<void(int)> build = [&](int i) {
    if (i == size) {
      states.push_back(s);
      return;
    }
    for (int v = 0; v <= 2; ++v) {
      if (i > 0 && s[i - 1] && v && s[i - 1] != v) continue;
      s[i] = v;
      build(i + 1);
    }
  };
  build(0);
  std::map<std::array<int, 4>, double> h;
  for (const auto& st : states) h[st] = 0.0;
  auto terminal = [&](const std::array<int, 4>& st) -> int {
    for (int i = 1; i < size; ++i)
      if (st[i] != st[0]) return -1;
    return st[0] ? st[0] : -1;
  };
  for (int iter = 0; iter < 20000; ++iter) {
    for (const auto& st : states) {
      int t = terminal(st);
      if (t > 0) {
        h[st] = t == 1 ? 1.0 : 0.0;
        continue;
      }
      double total = 0.0, acc = 0.0;
      for (int site = 0; site < size; ++site) {
        if (st[site]) continue;
        for (int g = 1; g <= 2; ++g) {
          std::vector<int> rivals;
          for (int nb : {site - 1, site + 1})
            if (nb >= 0 && nb < size && st[nb] && st[nb] != g) rivals.push_back(nb);
          if (rivals.empty()) {
            auto next = st;
            next[site] = g;
            acc += rate[g] * h[next];
          } else {
            for (int victim : rivals) {
              auto next = st;
              next[victim] = 0;
              acc += rate[g] * h[next] / static_cast<double>(rivals.size());
            }
          }
          total += rate[g];
        }
      }
      h[st] = acc / total;
    }
  }
  return h[std::array<int, 4>{}];
}

}  // namespace

TEST(Run, AllOnesIsAbsorbedAtTimeZero) {
  auto t = run(ModelSpec::equal_others(4, 0.47), blocked("1111"), {1});
  EXPECT_EQ(t.absorbed, State{1});
  EXPECT_EQ(t.reason, StopReason::Absorbed);
  EXPECT_EQ(t.events, 0u);
  EXPECT_EQ(t.time, 0.0);
}

TEST(Run, RejectsZeroBudgetsAndBadConfigurations) {
  auto spec = ModelSpec::equal_others(2, 0.5);
  StopRule zero_events;
  zero_events.max_events = 0;
  EXPECT_THROW(run(spec, blocked("00"), {1}, zero_events), std::invalid_argument);
  StopRule zero_time;
  zero_time.max_time = 0.0;
  EXPECT_THROW(run(spec, blocked("00"), {1}, zero_time), std::invalid_argument);
  EXPECT_THROW(run(spec, blocked("12"), {1}), std::invalid_argument);
  EXPECT_THROW(run(spec, blocked("03"), {1}), std::invalid_argument);
}

TEST(Run, FingerprintIsAPureFunctionOfTheInputs) {
  auto spec = ModelSpec::equal_others(4, 0.47);
  auto init = Configuration::uniform(64, 0, Boundary::Torus);
  auto a = run(spec, init, {77}, {}, 1);
  auto b = run(spec, init, {77}, {}, 1);
  EXPECT_EQ(a.fingerprint, b.fingerprint);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.final, b.final);
  EXPECT_NE(a.fingerprint, run(spec, init, {78}).fingerprint);
}

TEST(Run, LogIsTimeOrderedAndThinned) {
  auto spec = ModelSpec::equal_others(3, 0.4);
  StopRule stop;
  stop.max_events = 1000;
  auto full = run(spec, Configuration::uniform(16, 0, Boundary::Torus), {5}, stop, 1);
  auto thin = run(spec, Configuration::uniform(16, 0, Boundary::Torus), {5}, stop, 10);
  ASSERT_EQ(full.log.size(), full.events);
  EXPECT_EQ(thin.fingerprint, full.fingerprint);
  for (std::size_t i = 1; i < full.log.size(); ++i) EXPECT_GE(full.log[i].time, full.log[i - 1].time);
  for (std::size_t i = 0; i < thin.log.size(); ++i) EXPECT_EQ(thin.log[i], full.log[10 * i + 9]);
}

TEST(Simulator, EveryStepKeepsTheInvariants) {
  auto spec = ModelSpec::equal_others(4, 0.45);
  Simulator sim(spec, Configuration::uniform(40, 0, Boundary::Torus), {9});
  for (int k = 0; k < 20000 && !sim.absorbed(); ++k) {
    auto before = sim.config();
    auto rec = sim.step();
    ASSERT_TRUE(satisfies_adjacency(sim.config()));
    EXPECT_EQ(rec.kind == OutcomeKind::Noop, before[rec.site] != 0);
    EXPECT_EQ(sim.absorbed(), is_absorbing(sim.config()));
  }
}

TEST(Simulator, EventRateEqualsLatticeSize) {
  auto spec = ModelSpec::equal_others(4, 0.2);
  StopRule stop;
  stop.on_absorption = false;
  stop.max_time = 50.0;
  auto t = run(spec, Configuration::uniform(100, 0, Boundary::Torus), {10}, stop);
  const double expected = 100 * 50.0;
  EXPECT_LT(std::abs(static_cast<double>(t.events) - expected), 4 * std::sqrt(expected));
}

TEST(Simulator, InfiniteVariantUsesFreshIdentifiers) {
  auto spec = ModelSpec::infinite(0.3);
  Simulator sim(spec, Configuration::uniform(30, 0, Boundary::Torus), {4});
  for (int k = 0; k < 5000 && !sim.absorbed(); ++k) {
    sim.step();
    std::set<State> seen;
    for (State s : sim.config().sites())
      if (s >= 2) {
        EXPECT_TRUE(seen.insert(s).second) << "identifier " << s << " appears twice";
      }
    ASSERT_TRUE(satisfies_adjacency(sim.config()));
  }
}

TEST(Absorption, SingleSiteFirstArrivalDecides) {
  auto est = estimate_absorption(ModelSpec::finite({0.3, 0.7}), 1, Boundary::Blocked, 10000, {1});
  EXPECT_EQ(est.undecided, 0u);
  EXPECT_NEAR(est.gas_one_frequency(), 0.3, 0.05);
  EXPECT_LT(std::abs(est.gas_one_frequency() - 0.3), 3 * std::sqrt(0.3 * 0.7 / 10000));
}

TEST(Absorption, TwoSiteChainOracleHasClosedForm) {
  for (double p : {0.2, 0.5, 0.65}) {
    const double q = 1 - p;
    EXPECT_NEAR(exact_two_gas_absorption(2, p), p * p / (p * p + q * q), 1e-9) << p;
  }
}

TEST(Absorption, SmallLatticesMatchTheExactChain) {
  for (int size : {2, 3}) {
    for (double p : {0.35, 0.6}) {
      const double exact = exact_two_gas_absorption(size, p);
      auto est =
          estimate_absorption(ModelSpec::finite({p, 1 - p}), size, Boundary::Blocked, 10000, {2});
      const double sigma = std::sqrt(exact * (1 - exact) / 10000);
      EXPECT_LT(std::abs(est.gas_one_frequency() - exact), 3 * sigma)
          << "size " << size << " p " << p << " exact " << exact;
    }
  }
}

TEST(Absorption, IndependentOfThreadCount) {
  auto spec = ModelSpec::equal_others(3, 0.45);
  ReplicaOptions one{std::nullopt, 1}, four{std::nullopt, 4};
  auto a = estimate_absorption(spec, 24, Boundary::Torus, 40, {3}, one);
  auto b = estimate_absorption(spec, 24, Boundary::Torus, 40, {3}, four);
  EXPECT_EQ(a.absorbed, b.absorbed);
  EXPECT_EQ(a.mean_time, b.mean_time);
}

TEST(Absorption, BudgetExhaustionIsReportedAsUndecided) {
  ReplicaOptions opts;
  opts.max_events = 10;
  auto est = estimate_absorption(ModelSpec::equal_others(4, 0.4), 64, Boundary::Torus, 5, {1}, opts);
  EXPECT_EQ(est.undecided, 5u);
  EXPECT_DOUBLE_EQ(est.undecided_frequency(), 1.0);
  EXPECT_THROW(estimate_absorption(ModelSpec::equal_others(4, 0.4), 8, Boundary::Torus, 0, {1}),
               std::invalid_argument);
}

TEST(Sweep, ValidatesTheGrid) {
  EXPECT_THROW(sweep(GasCount::finite(3), {}, 16, Boundary::Torus, 5, {1}), std::invalid_argument);
  EXPECT_THROW(sweep(GasCount::finite(3), {0.0}, 16, Boundary::Torus, 5, {1}),
               std::invalid_argument);
  EXPECT_THROW(sweep(GasCount::finite(3), {1.0}, 16, Boundary::Torus, 5, {1}),
               std::invalid_argument);
}

TEST(Sweep, FrequencyGrowsWithTheRate) {
  auto r = sweep(GasCount::finite(3), {0.30, 0.40, 0.50}, 32, Boundary::Torus, 60, {6});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_GE(r.rows[2].estimate.gas_one_frequency(), r.rows[0].estimate.gas_one_frequency());
  if (r.crossing) {
    EXPECT_GT(*r.crossing, 0.30);
    EXPECT_LT(*r.crossing, 0.50);
  }
}

TEST(Weight, CappedWeightOfAllOnes) {
  auto t = ScoreTable::table1();
  EXPECT_DOUBLE_EQ(capped_weight(blocked("11111"), t), 5 + 0.664);
  EXPECT_DOUBLE_EQ(capped_weight(blocked("1100000"), t), weight(blocked("1100000"), t).weight);
}

TEST(GeneratorDrift, MatchesTheCertificateEngineOnConcreteFrontiers) {
  auto t = ScoreTable::table1();
  auto spec = ModelSpec::equal_others(4, 0.47);
  RateModel rates{GasCount::finite(4), 0.47};
  for (const char* block : {"222", "000", "101", "110", "203", "020"}) {
    for (const char* tail : {"000000", "222222", "020202", "110011"}) {
      std::string text = std::string("110") + block + tail + "0000";
      auto config = blocked(text);
      if (!satisfies_adjacency(config)) continue;
      auto canon = CanonicalBlock::parse(std::string(block) + tail);
      const std::string relabelled = canon.str();
      const double expected =
          drift(CanonicalBlock::parse(block), t, rates, relabelled.substr(3),
                Completion::values("0000"))
              .value;
      EXPECT_NEAR(generator_drift(config, spec, t), expected, 1e-12) << text;
    }
  }
}

TEST(EmpiricalDrift, RejectsBadInput) {
  auto t = ScoreTable::table1();
  auto spec = ModelSpec::equal_others(4, 0.47);
  EXPECT_THROW(empirical_drift(spec, blocked("1102222"), t, 0.0, 10, {1}), std::invalid_argument);
  EXPECT_THROW(empirical_drift(spec, blocked("0222222"), t, 0.2, 10, {1}), std::invalid_argument);
  EXPECT_THROW(empirical_drift(spec, Configuration::parse("1102222", Boundary::Torus), t, 0.2, 10,
                               {1}),
               std::invalid_argument);
}

TEST(EmpiricalDrift, OnlyGasOneArrivingGivesDriftAtLeastOne) {
  auto t = ScoreTable::table1();
  auto spec = ModelSpec::finite({1.0, 0.0});
  auto est = empirical_drift(spec, blocked("11" + std::string(40, '0')), t, 0.2, 2000, {4});
  EXPECT_GE(est.initial_generator_drift, 1.0);
  EXPECT_GE(est.compensator_mean, 1.0 - 1e-9);
  EXPECT_GT(est.naive_mean, 0.9);
}

TEST(EmpiricalDrift, EstimatorsAgreeWithinNoise) {
  auto t = ScoreTable::table1();
  auto spec = ModelSpec::equal_others(4, 0.5);
  auto est = empirical_drift(spec, blocked("110" + std::string(39, '2')), t, 0.2, 4000, {8});
  const double se = std::hypot(est.naive_stderr, est.compensator_stderr);
  EXPECT_LT(std::abs(est.naive_mean - est.compensator_mean), 4 * se);
  EXPECT_LT(est.compensator_stderr, est.naive_stderr);
}

TEST(Diagnostics, SeriesStaysInRangeAndStopsWhenTheBlockDies) {
  auto t = ScoreTable::table1();
  auto spec = ModelSpec::equal_others(4, 0.3);
  bool saw_stop = false;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto s = weight_diagnostics(spec, blocked("110" + std::string(30, '2')), t, {seed}, 20.0, 0.1,
                                0.5);
    ASSERT_FALSE(s.samples.empty());
    for (const auto& x : s.samples) {
      EXPECT_GE(x.u, 0.0);
      EXPECT_LE(x.u, 1.0);
      EXPECT_EQ(x.u == 1.0, std::isinf(x.weight));
    }
    if (s.stopped_at) {
      saw_stop = true;
      EXPECT_EQ(s.samples.back().block_len, 0u);
    }
  }
  EXPECT_TRUE(saw_stop);
}
