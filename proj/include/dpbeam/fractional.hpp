#pragma once

#include "dpbeam/alphabet.hpp"
#include "dpbeam/qubo.hpp"

namespace dpbeam {

/// Real quadratic forms over bit vectors:
///   f(x) = x^T A0 x + b0^T x + c0 = w^H A w
///   g(x) = x^T A1 x + b1^T x + c1 = w^H B w
/// with w = bits_to_weights(x).
struct FractionalCoefficients {
  RMatrix A0;
  RVector b0;
  double c0 = 0.0;
  RMatrix A1;
  RVector b1;
  double c1 = 0.0;
  std::size_t elements = 0;

  Eigen::Index variables() const { return b0.size(); }

  double numerator(const Bits& x) const { return evaluate(A0, b0, c0, x); }
  double denominator(const Bits& x) const { return evaluate(A1, b1, c1, x); }

 private:
  static double evaluate(const RMatrix& m, const RVector& b, double c, const Bits& x) {
    detail::require(static_cast<Eigen::Index>(x.size()) == b.size(), "bit vector length does not match coefficients");
    RVector xv(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) xv[i] = x[static_cast<std::size_t>(i)];
    return xv.dot(m * xv) + b.dot(xv) + c;
  }
};

namespace detail {

inline void require_hermitian(const CMatrix& m, const char* name) {
  require(m.rows() == m.cols(), std::string(name) + " must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
  require(skew <= 1e-10 * scale, std::string(name) + " is not Hermitian");
}

inline void quadratic_terms(const CMatrix& h, const PhaseAlphabet& alphabet, RMatrix& m, RVector& b, double& c) {
  const Eigen::Index n = h.rows();
  // x is real, so only the real part of the Hermitian form survives.
  RMatrix re = h.real();
  re = (0.5 * (re + re.transpose())).eval();
  const CVector row_sums = h * CVector::Ones(n);
  const double total = std::real(row_sums.sum());
  if (alphabet.bits_per_element() == 1) {
    const Complex d = alphabet.delta();
    const Complex w0 = alphabet.w0();
    m = std::norm(d) * re;
    b = 2.0 * (std::conj(d) * w0 * row_sums).real();
    c = std::norm(w0) * total;
    return;
  }
  const Complex a = alphabet.a(), bb = alphabet.b(), cc = alphabet.c();
  m.resize(2 * n, 2 * n);
  m.topLeftCorner(n, n) = std::norm(a) * re;
  m.bottomRightCorner(n, n) = std::norm(bb) * re;
  const RMatrix cross = (std::conj(a) * bb * h).real();
  m.topRightCorner(n, n) = cross;
  m.bottomLeftCorner(n, n) = cross.transpose();
  b.resize(2 * n);
  b.head(n) = 2.0 * (std::conj(a) * cc * row_sums).real();
  b.tail(n) = 2.0 * (std::conj(bb) * cc * row_sums).real();
  c = std::norm(cc) * total;
}

}  // namespace detail

/// Rewrites w^H A w and w^H B w as real quadratics in the bits of the affine
/// phase map.
inline FractionalCoefficients build_fractional_coefficients(const CMatrix& A, const CMatrix& B, const PhaseAlphabet& alphabet) {
  detail::require_hermitian(A, "A");
  detail::require_hermitian(B, "B");
  detail::require(A.rows() == B.rows(), "A and B must have equal size");
  FractionalCoefficients out;
  out.elements = static_cast<std::size_t>(A.rows());
  detail::quadratic_terms(A, alphabet, out.A0, out.b0, out.c0);
  detail::quadratic_terms(B, alphabet, out.A1, out.b1, out.c1);
  return out;
}

/// H_t(x) = t g(x) - f(x) as a QUBO.
inline QuboInstance assemble_bisection_qubo(const FractionalCoefficients& coeffs, double t) {
  detail::require(t >= 0.0 && t <= 1.0, "bisection parameter t must lie in [0, 1]");
  RMatrix m = t * coeffs.A1 - coeffs.A0;
  const RVector lin = t * coeffs.b1 - coeffs.b0;
  return QuboInstance::from_quadratic(std::move(m), lin, t * coeffs.c1 - coeffs.c0, t);
}

}  // namespace dpbeam
