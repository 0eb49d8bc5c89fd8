#pragma once

#include "dpbeam/fractional.hpp"
#include "dpbeam/sa.hpp"

#include <concepts>
#include <optional>

namespace dpbeam {

/// Any QUBO back-end: returns its best configuration and whether a
/// negative-energy configuration was found.
template <typename S>
concept QuboBackend = requires(S& s, const QuboInstance& q) {
  { s(q) } -> std::convertible_to<SaOutcome>;
};

enum class BisectionDecision { RaiseLower, LowerUpper };

inline std::string_view to_string(BisectionDecision d) {
  return d == BisectionDecision::RaiseLower ? "raise_lower" : "lower_upper";
}

struct BisectionStep {
  double t = 0.0;
  BisectionDecision decision = BisectionDecision::LowerUpper;
  /// Smallest H_t seen by the back-end; q = -min_energy.
  double min_energy = 0.0;
  std::uint64_t bits_explored = 0;
  StopReason stop_reason = StopReason::Exhausted;
  int batches_run = 0;
  double t0 = 0.0;  // bounds after the step
  double t1 = 1.0;
  /// Best energy of every batch the back-end ran.
  std::vector<double> batch_best;
};

/// Bracket [t0, t1] on the optimal ratio with the trial rule
/// t = alpha t0 + (1 - alpha) t1.
struct BisectionState {
  double t0 = 0.0;
  double t1 = 1.0;
  double alpha = 0.5;
  double tol = 1e-6;
  std::vector<BisectionStep> history;

  void validate() const {
    detail::require(0.0 <= t0 && t0 < t1 && t1 <= 1.0, "bisection bounds must satisfy 0 <= t0 < t1 <= 1");
    detail::require(alpha > 0.0 && alpha < 1.0, "bisection alpha must lie in (0, 1)");
    detail::require(tol > 0.0, "bisection tolerance must be positive");
  }
  bool done() const { return t1 - t0 < tol; }
  double trial() const { return alpha * t0 + (1.0 - alpha) * t1; }
};

struct BisectionOptions {
  /// Run one back-end pass at t = t1 first and fail if it is not an upper bound.
  bool verify_upper = false;
};

struct BisectionResult {
  double t_star = 0.0;
  WeightVector w_star;
  Bits x_star;
  std::vector<BisectionStep> history;
  std::uint64_t bits_explored = 0;
  Diagnostics diagnostics;

  std::size_t t_updates() const { return history.size(); }
};

/// Upper bound on the number of steps plain bisection (alpha = 1/2) needs.
inline int max_bisection_steps(double width, double tol) {
  return static_cast<int>(std::ceil(std::log2(width / tol)));
}

/// Maximizes f/g over the phase alphabet. Each step minimizes
/// H_t = t g - f; a negative energy proves the ratio exceeds t (t0 <- t),
/// otherwise t1 <- t. Returns t0 and the configuration certifying it.
template <QuboBackend Solver>
BisectionResult bisection_solve(const FractionalCoefficients& coeffs, const PhaseAlphabet& alphabet, Solver&& solver,
                                BisectionState state = {}, const BisectionOptions& options = {}) {
  state.validate();
  BisectionResult out;
  const std::size_t n = coeffs.elements;
  const Bits zero(static_cast<std::size_t>(coeffs.variables()), 0);
  out.x_star = zero;
  out.w_star = bits_to_weights(zero, alphabet, n);

  const double a_scale = std::max(coeffs.A0.cwiseAbs().maxCoeff(), coeffs.b0.cwiseAbs().maxCoeff());
  const double b_scale = std::max(coeffs.A1.cwiseAbs().maxCoeff(), coeffs.b1.cwiseAbs().maxCoeff());
  if (a_scale <= 1e-14 * b_scale && std::abs(coeffs.c0) <= 1e-14 * std::max(b_scale, std::abs(coeffs.c1))) {
    out.t_star = 0.0;
    out.diagnostics.warn("numerator matrix is numerically zero; returning t = 0 with the all-zero-bit weight");
    return out;
  }

  if (options.verify_upper) {
    SaOutcome check = solver(assemble_bisection_qubo(coeffs, state.t1));
    out.bits_explored += check.bits_explored;
    if (check.negative_found) {
      throw InternalConsistencyError("initial upper bound t1 is below an achievable ratio");
    }
  }

  while (!state.done()) {
    const double t = state.trial();
    SaOutcome res = solver(assemble_bisection_qubo(coeffs, t));
    BisectionStep step;
    step.t = t;
    step.min_energy = res.best_energy;
    step.bits_explored = res.bits_explored;
    step.stop_reason = res.stop_reason;
    step.batches_run = res.batches_run;
    step.batch_best = std::move(res.batch_best);
    if (res.negative_found) {
      step.decision = BisectionDecision::RaiseLower;
      state.t0 = t;
      out.x_star = std::move(res.best_config);
    } else {
      step.decision = BisectionDecision::LowerUpper;
      state.t1 = t;
    }
    step.t0 = state.t0;
    step.t1 = state.t1;
    out.bits_explored += step.bits_explored;
    state.history.push_back(step);
  }
  out.t_star = state.t0;
  out.w_star = bits_to_weights(out.x_star, alphabet, n);
  out.history = std::move(state.history);
  if (out.t_star == 0.0) out.diagnostics.warn("no trial t was accepted; returning the all-zero-bit weight");
  return out;
}

template <QuboBackend Solver>
BisectionResult bisection_solve(const CMatrix& A, const CMatrix& B, const PhaseAlphabet& alphabet, Solver&& solver,
                                BisectionState state = {}, const BisectionOptions& options = {}) {
  const auto coeffs = build_fractional_coefficients(A, B, alphabet);
  detail::require(static_cast<Eigen::Index>(coeffs.elements) == A.rows(), "coefficient size mismatch");
  return bisection_solve(coeffs, alphabet, std::forward<Solver>(solver), std::move(state), options);
}

}  // namespace dpbeam
