#pragma once

#include "dpbeam/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

namespace dpbeam {

enum class WeightLabel { Continuous, Discrete2, Discrete4, Quantized2, Quantized4 };

inline std::string_view to_string(WeightLabel label) {
  switch (label) {
    case WeightLabel::Continuous: return "continuous";
    case WeightLabel::Discrete2: return "discrete-2";
    case WeightLabel::Discrete4: return "discrete-4";
    case WeightLabel::Quantized2: return "quantized-2";
    case WeightLabel::Quantized4: return "quantized-4";
  }
  return "unknown";
}

struct WeightVector {
  CVector w;
  WeightLabel label = WeightLabel::Continuous;

  Eigen::Index size() const { return w.size(); }
};

/// Phase in [0, 2pi).
inline double wrapped_arg(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

/// Discrete transmission phases together with the affine bit -> weight map.
///
/// Two phases use one bit per element, w = w0 + delta * x. Four phases use
/// two bits (u, v) per element, w = a*u + b*v + c, which enumerates
/// {c, b+c, a+c, a+b+c}.
class PhaseAlphabet {
 public:
  static PhaseAlphabet two_phase(Complex w0 = 1.0, Complex w1 = -1.0) {
    PhaseAlphabet p;
    p.k_ = 2;
    p.w0_ = w0;
    p.w1_ = w1;
    p.phases_ = {w0, w1};
    p.finish();
    return p;
  }

  static PhaseAlphabet four_phase(Complex a = Complex{-1.0, -1.0}, Complex b = Complex{-1.0, 1.0}, Complex c = 1.0) {
    PhaseAlphabet p;
    p.k_ = 4;
    p.a_ = a;
    p.b_ = b;
    p.c_ = c;
    p.phases_ = {c, b + c, a + c, a + b + c};
    p.finish();
    return p;
  }

  /// {1, -1} for K = 2, {1, j, -1, -j} for K = 4.
  static PhaseAlphabet standard(int k) {
    if (k == 2) return two_phase();
    if (k == 4) return four_phase();
    throw InvalidArgument("phase count must be 2 or 4");
  }

  int phase_count() const { return k_; }
  int bits_per_element() const { return k_ == 2 ? 1 : 2; }

  /// Phases sorted by angle in [0, 2pi); index order used for tie-breaks.
  const std::vector<Complex>& phases() const { return phases_; }

  Complex w0() const { return w0_; }
  Complex w1() const { return w1_; }
  Complex delta() const { return w1_ - w0_; }
  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }

  WeightLabel discrete_label() const { return k_ == 2 ? WeightLabel::Discrete2 : WeightLabel::Discrete4; }
  WeightLabel quantized_label() const { return k_ == 2 ? WeightLabel::Quantized2 : WeightLabel::Quantized4; }

  bool contains(Complex z, double tol = 1e-12) const {
    return std::any_of(phases_.begin(), phases_.end(), [&](Complex p) { return std::abs(p - z) <= tol; });
  }

  /// Index into phases() nearest in angle; ties go to the smaller index.
  std::size_t nearest_index(double angle) const {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phases_.size(); ++i) {
      double d = std::abs(std::remainder(angle - angles_[i], kTwoPi));
      if (d < best_dist - 1e-12) {
        best_dist = d;
        best = i;
      }
    }
    return best;
  }

 private:
  PhaseAlphabet() = default;

  void finish() {
    for (Complex p : phases_) {
      detail::require(std::abs(std::abs(p) - 1.0) < 1e-9, "alphabet phases must have unit modulus");
    }
    for (std::size_t i = 0; i < phases_.size(); ++i)
      for (std::size_t j = i + 1; j < phases_.size(); ++j)
        detail::require(std::abs(phases_[i] - phases_[j]) > 1e-9, "alphabet phases must be distinct");
    std::sort(phases_.begin(), phases_.end(), [](Complex x, Complex y) { return wrapped_arg(x) < wrapped_arg(y); });
    angles_.clear();
    for (Complex p : phases_) angles_.push_back(wrapped_arg(p));
  }

  int k_ = 2;
  Complex w0_{1.0}, w1_{-1.0};
  Complex a_{0.0}, b_{0.0}, c_{1.0};
  std::vector<Complex> phases_;
  std::vector<double> angles_;
};

/// Maps N_V = bits_per_element * n bits to n weights. For four phases the
/// layout is x = [u; v] with u the first n bits.
inline WeightVector bits_to_weights(const Bits& x, const PhaseAlphabet& alphabet, std::size_t elements) {
  const std::size_t bpe = static_cast<std::size_t>(alphabet.bits_per_element());
  detail::require(x.size() == bpe * elements, "bit vector length does not match alphabet and element count");
  WeightVector out{CVector(static_cast<Eigen::Index>(elements)), alphabet.discrete_label()};
  if (bpe == 1) {
    for (std::size_t i = 0; i < elements; ++i)
      out.w[static_cast<Eigen::Index>(i)] = alphabet.w0() + alphabet.delta() * static_cast<double>(x[i]);
    return out;
  }
  const std::uint8_t* u = x.data();
  const std::uint8_t* v = x.data() + (x.size() - elements);
  for (std::size_t i = 0; i < elements; ++i) {
    out.w[static_cast<Eigen::Index>(i)] =
        alphabet.a() * static_cast<double>(u[i]) + alphabet.b() * static_cast<double>(v[i]) + alphabet.c();
  }
  return out;
}

}  // namespace dpbeam
