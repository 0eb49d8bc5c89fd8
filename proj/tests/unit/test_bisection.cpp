#include "dpbeam/bisection.hpp"
#include "dpbeam/continuous.hpp"
#include "dpbeam/coupling.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace dpbeam;

namespace {

CouplingMatrices tiny_problem(int side, double theta_deg, double phi_deg) {
  const auto g = build_planar_array(side, 0.5, 1.0);
  return compute_coupling(g, TargetRegion(Direction::from_degrees(theta_deg, phi_deg), 0.1));
}

/// Records every instance it is asked to solve, then delegates.
struct RecordingSolver {
  std::vector<double>* trials;
  SaOutcome operator()(const QuboInstance& q) const {
    trials->push_back(q.t());
    return ExhaustiveSolver{}(q);
  }
};

}  // namespace

TEST(Bisection, MatchesBruteForceWithExactBackend) {
  struct Case {
    int side;
    int k;
    double theta, phi;
  };
  for (const auto& c : {Case{2, 2, 20, 30}, Case{3, 2, 35, 200}, Case{2, 4, 10, 45}, Case{3, 4, 25, 300}}) {
    const auto m = tiny_problem(c.side, c.theta, c.phi);
    const auto alpha = PhaseAlphabet::standard(c.k);
    const auto brute = oracle::max_ratio(m.A, m.B, alpha.phases());
    const auto res = bisection_solve(m.A, m.B, alpha, ExhaustiveSolver{});
    EXPECT_LE(std::abs(res.t_star - brute.best), 1e-6) << c.side << "x" << c.side << " K=" << c.k;
    EXPECT_LE(res.t_star, brute.best + 1e-12);
    EXPECT_NEAR(ratio_objective(res.w_star.w, m.A, m.B), brute.best, 1e-6);
    EXPECT_GE(ratio_objective(res.w_star.w, m.A, m.B), res.t_star - 1e-12);
    for (Eigen::Index i = 0; i < res.w_star.size(); ++i) EXPECT_TRUE(alpha.contains(res.w_star.w[i]));
  }
}

TEST(Bisection, FirstTrialIsMidpointAndStepCountBounded) {
  const auto m = tiny_problem(2, 15, 60);
  std::vector<double> trials;
  const auto res = bisection_solve(m.A, m.B, PhaseAlphabet::four_phase(), RecordingSolver{&trials});
  ASSERT_FALSE(trials.empty());
  EXPECT_DOUBLE_EQ(trials.front(), 0.5);
  EXPECT_EQ(res.t_updates(), 20u);
  EXPECT_LE(static_cast<int>(res.t_updates()), max_bisection_steps(1.0, 1e-6));
  EXPECT_EQ(trials.size(), res.t_updates());
}

TEST(Bisection, BoundsTightenMonotonically) {
  const auto m = tiny_problem(3, 22, 111);
  const auto res = bisection_solve(m.A, m.B, PhaseAlphabet::two_phase(), ExhaustiveSolver{});
  double t0 = 0.0, t1 = 1.0;
  for (const auto& s : res.history) {
    EXPECT_GE(s.t0, t0);
    EXPECT_LE(s.t1, t1);
    EXPECT_LT(s.t0, s.t1);
    if (s.decision == BisectionDecision::RaiseLower) {
      EXPECT_LT(s.min_energy, 0.0);
      EXPECT_EQ(s.t0, s.t);
    } else {
      EXPECT_GE(s.min_energy, 0.0);
      EXPECT_EQ(s.t1, s.t);
    }
    t0 = s.t0;
    t1 = s.t1;
  }
  EXPECT_LT(t1 - t0, 1e-6);
  EXPECT_EQ(res.t_star, t0);
}

TEST(Bisection, SignAroundOptimum) {
  const auto m = tiny_problem(3, 30, 10);
  const auto alpha = PhaseAlphabet::four_phase();
  const auto coeffs = build_fractional_coefficients(m.A, m.B, alpha);
  const auto res = bisection_solve(coeffs, alpha, ExhaustiveSolver{});
  const double tol = 1e-6;
  EXPECT_LT(ExhaustiveSolver{}(assemble_bisection_qubo(coeffs, res.t_star - 2 * tol)).best_energy, 0.0);
  EXPECT_GE(ExhaustiveSolver{}(assemble_bisection_qubo(coeffs, res.t_star + 2 * tol)).best_energy, 0.0);
}

TEST(Bisection, DiscreteRatioNeverExceedsContinuousOptimum) {
  for (int k : {2, 4}) {
    const auto m = tiny_problem(3, 40, 250);
    const auto lambda = solve_continuous(m.A, m.B).lambda_max;
    const auto res = bisection_solve(m.A, m.B, PhaseAlphabet::standard(k), ExhaustiveSolver{});
    EXPECT_LE(ratio_objective(res.w_star.w, m.A, m.B), lambda + 1e-9);
    EXPECT_LE(res.t_star, lambda + 1e-9);
  }
}

TEST(Bisection, WorksWithAnnealerBackend) {
  const auto m = tiny_problem(3, 18.247, 18.247);
  const auto alpha = PhaseAlphabet::four_phase();
  const auto brute = oracle::max_ratio(m.A, m.B, alpha.phases());
  SaParams p;
  p.batches = 50;
  p.sweeps = 100;
  const auto res = bisection_solve(m.A, m.B, alpha, SaSolver{p});
  EXPECT_LE(res.t_star, brute.best + 1e-12);
  EXPECT_GE(res.t_star, brute.best - 1e-3);
  EXPECT_GT(res.bits_explored, 0u);
}

TEST(Bisection, ZeroNumeratorReturnsZeroWithWarning) {
  const auto g = build_planar_array(2, 0.5, 1.0);
  const CMatrix b = compute_B(g);
  const CMatrix a = CMatrix::Zero(4, 4);
  const auto res = bisection_solve(a, b, PhaseAlphabet::two_phase(), ExhaustiveSolver{});
  EXPECT_EQ(res.t_star, 0.0);
  EXPECT_EQ(res.t_updates(), 0u);
  ASSERT_EQ(res.diagnostics.warnings.size(), 1u);
  EXPECT_EQ(res.w_star.w, CVector::Ones(4));
}

TEST(Bisection, VerifyUpperRejectsBadBracket) {
  const auto m = tiny_problem(2, 5, 5);
  BisectionState s;
  s.t1 = 1e-4;  // far below the achievable ratio
  BisectionOptions opt;
  opt.verify_upper = true;
  EXPECT_THROW(bisection_solve(m.A, m.B, PhaseAlphabet::two_phase(), ExhaustiveSolver{}, s, opt),
               InternalConsistencyError);
  s = BisectionState{};
  s.alpha = 1.0;
  EXPECT_THROW(bisection_solve(m.A, m.B, PhaseAlphabet::two_phase(), ExhaustiveSolver{}, s), InvalidArgument);
}

TEST(Bisection, NonDefaultAlphaStillConverges) {
  const auto m = tiny_problem(2, 12, 80);
  const auto alpha = PhaseAlphabet::two_phase();
  const auto brute = oracle::max_ratio(m.A, m.B, alpha.phases());
  BisectionState s;
  s.alpha = 0.3;
  const auto res = bisection_solve(m.A, m.B, alpha, ExhaustiveSolver{}, s);
  EXPECT_NEAR(res.t_star, brute.best, 1e-6);
}
