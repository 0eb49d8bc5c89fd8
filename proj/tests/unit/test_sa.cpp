#include "dpbeam/sa.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace dpbeam;

namespace {

QuboInstance random_instance(Eigen::Index n, std::uint64_t seed, double offset = 0.0) {
  std::mt19937_64 rng(seed);
  return QuboInstance::from_upper(oracle::random_upper(n, rng), offset);
}

}  // namespace

TEST(QuboEnergy, SmallExample) {
  RMatrix q(2, 2);
  q << 1, 2, 0, 3;
  const auto inst = QuboInstance::from_upper(q, 0.0);
  EXPECT_DOUBLE_EQ(qubo_energy(inst, {1, 1}), 6.0);
  EXPECT_DOUBLE_EQ(qubo_energy(inst, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(qubo_energy(inst, {0, 0}), 0.0);
}

TEST(QuboEnergy, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const RMatrix upper = oracle::random_upper(10, rng, 5.0);
    const auto inst = QuboInstance::from_upper(upper, 0.75);
    for (int s = 0; s < 50; ++s) {
      const Bits x = oracle::random_bits(10, rng);
      EXPECT_NEAR(qubo_energy(inst, x), oracle::qubo_energy(upper, 0.75, x), 1e-12);
    }
  }
}

TEST(EnergyDelta, MatchesDefinitionAndIsInvolution) {
  const auto inst = random_instance(15, 2, 0.3);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    LocalFields f(inst, oracle::random_bits(15, rng));
    for (Eigen::Index k = 0; k < 15; ++k) {
      Bits y = f.bits();
      y[static_cast<std::size_t>(k)] ^= 1U;
      const double d = energy_delta(inst, f, k);
      EXPECT_NEAR(d, qubo_energy(inst, y) - qubo_energy(inst, f.bits()), 1e-12);
      const Bits before = f.bits();
      const double e0 = f.energy();
      f.flip(k);
      EXPECT_NEAR(energy_delta(inst, f, k), -d, 1e-12);
      f.flip(k);
      EXPECT_EQ(f.bits(), before);
      EXPECT_NEAR(f.energy(), e0, 1e-12);
    }
  }
  LocalFields f(inst, Bits(15, 0));
  EXPECT_THROW(energy_delta(inst, f, 15), InvalidArgument);
}

TEST(LocalFields, DriftStaysSmallOverManyFlips) {
  const auto inst = random_instance(20, 4);
  LocalFields f(inst, Bits(20, 0));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) f.flip(static_cast<Eigen::Index>(rng() % 20));
  EXPECT_LT(std::abs(f.energy() - qubo_energy(inst, f.bits())), 1e-6);
  EXPECT_NO_THROW(f.audit());
}

TEST(GSchedule, Examples) {
  const GScheduleParams p{5, 15, 1.0, 0.2};
  EXPECT_EQ(g_schedule(0.0, p), 15);
  EXPECT_EQ(g_schedule(10.0, p), 5);
  EXPECT_EQ(g_schedule(1.0, p), 10);
  int prev = 100;
  for (double e = 0.0; e < 3.0; e += 0.05) {
    const int g = g_schedule(e, p);
    EXPECT_LE(g, prev);
    EXPECT_GE(g, 5);
    EXPECT_LE(g, 15);
    prev = g;
  }
}

TEST(MetropolisAccept, LimitsOfInverseTemperature) {
  for (double u : {0.0, 0.3, 0.999999}) {
    EXPECT_TRUE(metropolis_accept(-1.0, 1e6, u));
    EXPECT_TRUE(metropolis_accept(0.0, 1e6, u));
    EXPECT_FALSE(metropolis_accept(1e-3, std::numeric_limits<double>::infinity(), u));
    EXPECT_FALSE(metropolis_accept(1.0, 1e6, u));
  }
  for (double u : {0.0, 0.5, 0.999999}) EXPECT_TRUE(metropolis_accept(2.0, 0.0, u));
  EXPECT_TRUE(metropolis_accept(1.0, std::log(2.0), 0.49));
  EXPECT_FALSE(metropolis_accept(1.0, std::log(2.0), 0.51));
}

TEST(CounterRng, ReproducibleAndUniform) {
  CounterRng a(9), b(9), c(10);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
  }
  CounterRng r(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(RunSa, PositiveDefiniteInstanceNeverGoesNegative) {
  RMatrix q = RMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) q(i, j) = 0.5 + 0.1 * (i + j);
  SaParams p;
  p.batches = 20;
  p.sweeps = 20;
  const auto out = run_sa(QuboInstance::from_upper(q, 0.0), p);
  EXPECT_FALSE(out.negative_found);
  EXPECT_EQ(out.best_energy, 0.0);
  EXPECT_EQ(out.best_config, Bits(8, 0));
}

TEST(RunSa, NegativeOffsetStopsOnC1Immediately) {
  const auto inst = QuboInstance::from_upper(RMatrix::Zero(6, 6), -1.0);
  const auto out = run_sa(inst, SaParams{});
  EXPECT_TRUE(out.negative_found);
  EXPECT_EQ(out.stop_reason, StopReason::C1);
  EXPECT_EQ(out.batches_run, 1);
  EXPECT_EQ(out.bits_explored, 0u);
}

TEST(RunSa, FindsGroundStateOnSmallInstances) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const RMatrix upper = oracle::random_upper(12, rng);
    const double ground = oracle::exhaustive_min(upper, 0.0);
    SaParams p;
    p.batches = 200;
    p.sweeps = 200;
    p.early_stop = EarlyStop::Off;
    p.seed = seed;
    const auto out = run_sa(QuboInstance::from_upper(upper, 0.0), p);
    EXPECT_NEAR(out.best_energy, oracle::qubo_energy(upper, 0.0, out.best_config), 1e-12);
    if (out.best_energy <= ground + 1e-9) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(RunSa, DeterministicForFixedSeed) {
  const auto inst = random_instance(30, 6, 2.0);
  SaParams p;
  p.batches = 30;
  p.sweeps = 30;
  p.seed = 77;
  const auto a = run_sa(inst, p);
  const auto b = run_sa(inst, p);
  EXPECT_EQ(a.best_config, b.best_config);
  EXPECT_EQ(a.best_energy, b.best_energy);
  EXPECT_EQ(a.bits_explored, b.bits_explored);
  EXPECT_EQ(a.stop_reason, b.stop_reason);
  EXPECT_EQ(a.best_trace, b.best_trace);
}

TEST(RunSa, C1CertificateIsSound) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = random_instance(16, 100 + seed, 1.5);
    SaParams p;
    p.seed = seed;
    p.early_stop = EarlyStop::C1;
    const auto out = run_sa(inst, p);
    if (out.stop_reason == StopReason::C1) {
      EXPECT_TRUE(out.negative_found);
      EXPECT_LT(qubo_energy(inst, out.best_config), 0.0);
    }
    EXPECT_NEAR(out.best_energy, qubo_energy(inst, out.best_config), 1e-9);
  }
}

TEST(RunSa, BestTraceIsMonotone) {
  const auto inst = random_instance(25, 8, 5.0);
  SaParams p;
  p.batches = 40;
  p.sweeps = 10;
  p.early_stop = EarlyStop::Off;
  const auto out = run_sa(inst, p);
  ASSERT_EQ(out.best_trace.size(), 40u);
  EXPECT_EQ(out.stop_reason, StopReason::Exhausted);
  for (std::size_t i = 1; i < out.best_trace.size(); ++i) EXPECT_LE(out.best_trace[i], out.best_trace[i - 1]);
  for (std::size_t i = 0; i < out.best_trace.size(); ++i) EXPECT_LE(out.best_trace[i], out.batch_best[i]);
  EXPECT_EQ(out.bits_explored, 40u * 10u * 25u);
}

TEST(RunSa, StagnationStopsEarly) {
  // Unsatisfiable: all energies >= 1, so only C2 or exhaustion can stop it.
  RMatrix q = RMatrix::Zero(10, 10);
  q.diagonal().setConstant(0.5);
  SaParams p;
  p.batches = 100;
  p.sweeps = 5;
  const auto out = run_sa(QuboInstance::from_upper(q, 1.0), p);
  EXPECT_EQ(out.stop_reason, StopReason::C2);
  EXPECT_LE(out.batches_run, 1 + p.g_max);
  EXPECT_GE(out.batches_run, 1 + p.g_min);
  EXPECT_FALSE(out.negative_found);

  p.early_stop = EarlyStop::C1;
  EXPECT_EQ(run_sa(QuboInstance::from_upper(q, 1.0), p).batches_run, 100);
}

TEST(RunSa, ParallelBatchesReachSameQuality) {
  std::mt19937_64 rng(12);
  const RMatrix upper = oracle::random_upper(12, rng);
  const double ground = oracle::exhaustive_min(upper, 0.0);
  SaParams p;
  p.batches = 64;
  p.sweeps = 100;
  p.threads = 4;
  p.early_stop = EarlyStop::Off;
  const auto out = run_sa(QuboInstance::from_upper(upper, 0.0), p);
  EXPECT_NEAR(out.best_energy, ground, 1e-9);
  EXPECT_EQ(out.batches_run, 64);

  p.early_stop = EarlyStop::C1;
  const auto neg = run_sa(QuboInstance::from_upper(upper, 0.0), p);
  EXPECT_TRUE(neg.negative_found);
  EXPECT_LT(qubo_energy(QuboInstance::from_upper(upper, 0.0), neg.best_config), 0.0);
}

TEST(RunSa, RejectsBadParameters) {
  const auto inst = random_instance(4, 1);
  SaParams p;
  p.batches = 0;
  EXPECT_THROW(run_sa(inst, p), InvalidArgument);
  p = SaParams{};
  p.beta_hot = 20.0;
  EXPECT_THROW(run_sa(inst, p), InvalidArgument);
  EXPECT_THROW(parse_early_stop("sometimes"), InvalidArgument);
  EXPECT_EQ(parse_early_stop("c1c2"), EarlyStop::C1C2);
}

TEST(ExhaustiveSolver, MatchesOracle) {
  std::mt19937_64 rng(14);
  for (int n : {1, 3, 8, 14}) {
    const RMatrix upper = oracle::random_upper(n, rng);
    const auto out = ExhaustiveSolver{}(QuboInstance::from_upper(upper, 0.1));
    EXPECT_NEAR(out.best_energy, oracle::exhaustive_min(upper, 0.1), 1e-12);
    EXPECT_EQ(out.bits_explored, std::uint64_t{1} << n);
  }
  EXPECT_THROW(ExhaustiveSolver{4}(random_instance(5, 1)), InvalidArgument);
}
