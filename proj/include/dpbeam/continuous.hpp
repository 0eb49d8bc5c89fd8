#pragma once

#include "dpbeam/alphabet.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace dpbeam {

struct ContinuousOptions {
  /// Above this size the top eigenpair comes from Lanczos instead of a
  /// full dense decomposition.
  Eigen::Index dense_limit = 1024;
  int lanczos_max_basis = 240;
  int lanczos_max_restarts = 30;
  double lanczos_tol = 1e-12;
  /// Reject B when lambda_min(B) <= this * lambda_max(B).
  double min_relative_eigenvalue = 1e-10;
  /// Solve against B + delta I with delta = this * mean(diag B). Zero keeps
  /// B as given. Half-wavelength lattices from about 24 x 24 up carry
  /// non-radiating modes with eigenvalues near machine precision; a small
  /// load bounds the condition number without moving radiating solutions.
  double diagonal_loading = 0.0;
};

struct ContinuousSolution {
  double lambda_max = 0.0;
  WeightVector w_max;
  /// ||A w - lambda B w|| / ||A w||, with the loaded B when loading is on.
  double relative_residual = 0.0;
  /// Absolute delta added to the diagonal of B.
  double loading = 0.0;
};

inline double ratio_objective(const CVector& w, const CMatrix& A, const CMatrix& B) {
  const double den = std::real(w.dot(B * w));
  if (!(den > 0.0)) throw InternalConsistencyError("ratio objective: non-positive denominator w^H B w");
  return std::real(w.dot(A * w)) / den;
}

namespace detail {

// Extreme eigenvalues of a Hermitian PD matrix from its Cholesky factor:
// power iteration for the largest, inverse iteration for the smallest.
inline std::pair<double, double> extreme_eigen_estimates(const CMatrix& B, const Eigen::LLT<CMatrix>& llt) {
  const Eigen::Index n = B.rows();
  CVector v = CVector::Ones(n).normalized();
  double hi = 0.0;
  for (int it = 0; it < 30; ++it) {
    CVector next = B * v;
    hi = next.norm();
    if (hi == 0.0) break;
    v = next / hi;
  }
  CVector u = CVector::Ones(n).normalized();
  double inv = 0.0;
  for (int it = 0; it < 30; ++it) {
    CVector next = llt.solve(u);
    inv = next.norm();
    if (!std::isfinite(inv) || inv == 0.0) break;
    u = next / inv;
  }
  const double lo = (std::isfinite(inv) && inv > 0.0) ? 1.0 / inv : 0.0;
  return {lo, hi};
}

inline void fix_global_phase(CVector& w) {
  Eigen::Index idx = 0;
  w.cwiseAbs().maxCoeff(&idx);
  const Complex pivot = w[idx];
  if (std::abs(pivot) > 0.0) w *= std::conj(pivot) / std::abs(pivot);
}

// Top eigenpair of the Hermitian operator `apply` by Lanczos with full
// reorthogonalization and explicit restarts from the current Ritz vector.
template <typename Apply>
std::pair<double, CVector> lanczos_top(Eigen::Index n, Apply&& apply, const ContinuousOptions& opt) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> normal;
  CVector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = Complex(normal(rng), normal(rng));
  start.normalize();

  const int max_basis = static_cast<int>(std::min<Eigen::Index>(opt.lanczos_max_basis, n));
  double theta = 0.0;
  double last_residual = std::numeric_limits<double>::infinity();
  CVector ritz = start;
  for (int restart = 0; restart <= opt.lanczos_max_restarts; ++restart) {
    CMatrix V(n, max_basis);
    std::vector<double> alpha, beta;
    V.col(0) = ritz;
    int m = 0;
    bool invariant = false;
    for (int j = 0; j < max_basis; ++j) {
      CVector w = apply(V.col(j));
      alpha.push_back(std::real(V.col(j).dot(w)));
      // Full reorthogonalization (twice is enough).
      for (int pass = 0; pass < 2; ++pass) {
        CVector proj = V.leftCols(j + 1).adjoint() * w;
        w.noalias() -= V.leftCols(j + 1) * proj;
      }
      const double b = w.norm();
      m = j + 1;
      if (b < 1e-14 * std::max(1.0, std::abs(alpha.back()))) {
        invariant = true;
        break;
      }
      if (j + 1 < max_basis) V.col(j + 1) = w / b;
      beta.push_back(b);
    }
    RMatrix T = RMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(T);
    theta = es.eigenvalues()[m - 1];
    RVector s = es.eigenvectors().col(m - 1);
    ritz = V.leftCols(m) * s.cast<Complex>();
    ritz.normalize();
    const double residual = invariant ? 0.0 : (apply(ritz) - theta * ritz).norm();
    if (residual <= opt.lanczos_tol * std::max(std::abs(theta), 1e-300) || m == n) break;
    // Rounding in the triangular solves sets a floor on the residual when B
    // is badly conditioned; stop once a restart no longer halves it.
    if (residual > 0.5 * last_residual) break;
    last_residual = residual;
  }
  return {theta, ritz};
}

}  // namespace detail

/// Largest generalized eigenpair of A w = lambda B w by Cholesky reduction
/// B = L L^H. The eigenvector is scaled to w^H B w = 1 with its largest
/// entry real and positive.
inline ContinuousSolution solve_continuous(const CMatrix& A, const CMatrix& B, const ContinuousOptions& opt = {}) {
  detail::require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows() && A.rows() > 0,
                  "A and B must be square and of equal size");
  const Eigen::Index n = A.rows();
  detail::require(opt.diagonal_loading >= 0.0, "diagonal loading must be non-negative");
  const double delta = opt.diagonal_loading * B.diagonal().real().mean();
  CMatrix loaded;
  if (delta > 0.0) {
    loaded = B;
    loaded.diagonal().array() += delta;
  }
  const CMatrix& Bs = delta > 0.0 ? loaded : B;
  Eigen::LLT<CMatrix> llt(Bs);
  if (llt.info() != Eigen::Success) {
    throw IllConditioned("B is not numerically positive definite (Cholesky failed)", 0.0);
  }
  const auto [lo, hi] = detail::extreme_eigen_estimates(Bs, llt);
  if (!(lo > opt.min_relative_eigenvalue * hi)) {
    throw IllConditioned("B is numerically singular: smallest eigenvalue " + std::to_string(lo) +
                             " vs largest " + std::to_string(hi),
                         lo);
  }
  const auto L = llt.matrixL();
  const auto LH = llt.matrixU();

  double lambda = 0.0;
  CVector y;
  if (n <= opt.dense_limit) {
    CMatrix X = L.solve(A);
    CMatrix C = L.solve(X.adjoint());
    C = (0.5 * (C + C.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(C);
    lambda = es.eigenvalues()[n - 1];
    y = es.eigenvectors().col(n - 1);
  } else {
    auto apply = [&](const CVector& v) -> CVector {
      CVector t = LH.solve(v);
      CVector at = A * t;
      return L.solve(at);
    };
    std::tie(lambda, y) = detail::lanczos_top(n, apply, opt);
  }
  CVector w = LH.solve(y);
  const double bn = std::real(w.dot(Bs * w));
  w /= std::sqrt(bn);
  detail::fix_global_phase(w);

  ContinuousSolution out;
  out.lambda_max = lambda;
  out.w_max = WeightVector{w, WeightLabel::Continuous};
  out.loading = delta;
  const CVector aw = A * w;
  const double an = aw.norm();
  out.relative_residual = an > 0.0 ? (aw - lambda * (Bs * w)).norm() / an : 0.0;
  return out;
}

/// Nearest-phase rounding, amplitude discarded. Zero entries map to phase
/// index 0 and leave a warning in `diag`.
inline WeightVector quantize_weights(const WeightVector& w, const PhaseAlphabet& alphabet, Diagnostics* diag = nullptr) {
  WeightVector out{CVector(w.size()), alphabet.quantized_label()};
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Complex z = w.w[i];
    if (z == Complex{0.0, 0.0}) {
      ++zeros;
      out.w[i] = alphabet.phases()[0];
      continue;
    }
    out.w[i] = alphabet.phases()[alphabet.nearest_index(wrapped_arg(z))];
  }
  if (zeros > 0 && diag) diag->warn(std::to_string(zeros) + " zero-amplitude weight(s) quantized to phase index 0");
  return out;
}

}  // namespace dpbeam
