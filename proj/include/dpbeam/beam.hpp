#pragma once

#include "dpbeam/continuous.hpp"
#include "dpbeam/coupling.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace dpbeam {

inline constexpr double kDbFloor = -80.0;

/// Far-field amplitude T(u)^H w. Planar grids use the separable form so a
/// direction costs O(n) multiplies and O(sqrt n) exponentials.
class ArrayFactor {
 public:
  ArrayFactor(const ArrayGeometry& geometry, const CVector& w) : geometry_(geometry), w_(w) {
    detail::require(static_cast<std::size_t>(w.size()) == geometry.size(), "weight vector size does not match array");
    if (geometry.grid() && geometry.planar_xy()) {
      const int side = geometry.grid()->side;
      grid_weights_ = Eigen::Map<const CMatrix>(w_.data(), side, side);  // (col, row)
    }
  }

  Complex amplitude(const Vec3& u) const {
    const double k = geometry_.wavenumber();
    if (grid_weights_.size() > 0) {
      const int side = geometry_.grid()->side;
      const double d = geometry_.grid()->spacing;
      const double half = 0.5 * (side - 1);
      CVector ex(side), ey(side);
      for (int m = 0; m < side; ++m) {
        ex[m] = std::polar(1.0, k * u.x() * (m - half) * d);
        ey[m] = std::polar(1.0, k * u.y() * (m - half) * d);
      }
      return ex.transpose() * grid_weights_ * ey;
    }
    Complex s = 0.0;
    for (std::size_t i = 0; i < geometry_.size(); ++i) {
      s += std::polar(1.0, k * u.dot(geometry_.position(i))) * w_[static_cast<Eigen::Index>(i)];
    }
    return s;
  }

  double gain(const Vec3& u) const { return std::norm(amplitude(u)); }
  double gain(const Direction& d) const { return gain(direction_unit_vector(d)); }

 private:
  ArrayGeometry geometry_;
  CVector w_;
  CMatrix grid_weights_;
};

/// |T(direction)^H w|^2.
inline double beam_gain(const CVector& w, const ArrayGeometry& geometry, const Direction& direction) {
  detail::require(w.size() > 0 && w.norm() > 0.0, "beam gain needs a nonzero weight vector");
  return ArrayFactor(geometry, w).gain(direction);
}

/// Gain relative to an isotropic radiator of equal total power:
/// 4 pi |T^H w|^2 / (w^H B w), with B over the full sphere.
inline double directivity(const CVector& w, const ArrayGeometry& geometry, const Direction& direction, const CMatrix& B) {
  const double total = std::real(w.dot(B * w));
  detail::require(total > 0.0, "directivity needs w^H B w > 0");
  return 4.0 * kPi * beam_gain(w, geometry, direction) / total;
}

inline double to_db(double linear) {
  if (!(linear > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(linear));
}

struct PatternPoint {
  Direction direction;
  double gain = 0.0;
  double gain_db = kDbFloor;
};

struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
  double at(int i, int steps) const { return steps <= 1 ? lo : lo + (hi - lo) * i / (steps - 1); }
  double step(int steps) const { return steps <= 1 ? 0.0 : (hi - lo) / (steps - 1); }
};

/// Gains on a theta-major uniform grid. gain_db = 10 log10(gain / normalization).
struct BeamPattern {
  std::vector<PatternPoint> points;
  AngleRange theta;
  AngleRange phi;
  int theta_steps = 0;
  int phi_steps = 0;
  double normalization = 1.0;
  std::size_t argmax = 0;
  /// Evaluates gain off-grid; used for refinement.
  std::function<double(const Direction&)> evaluate;

  const PatternPoint& at(int it, int ip) const { return points[static_cast<std::size_t>(it) * phi_steps + ip]; }
  double max_gain() const { return points.at(argmax).gain; }
};

/// Uniform grid evaluation. A non-positive `normalization` normalizes to the
/// grid maximum (so the peak reads 0 dB).
inline BeamPattern pattern_grid(const CVector& w, const ArrayGeometry& geometry, AngleRange theta, AngleRange phi,
                                int theta_steps, int phi_steps, double normalization = 0.0) {
  detail::require(theta_steps >= 1 && phi_steps >= 1, "pattern grid needs positive step counts");
  detail::require(w.size() > 0 && w.norm() > 0.0, "pattern needs a nonzero weight vector");
  auto factor = std::make_shared<ArrayFactor>(geometry, w);
  BeamPattern p;
  p.theta = theta;
  p.phi = phi;
  p.theta_steps = theta_steps;
  p.phi_steps = phi_steps;
  p.points.reserve(static_cast<std::size_t>(theta_steps) * phi_steps);
  double best = -1.0;
  for (int it = 0; it < theta_steps; ++it) {
    for (int ip = 0; ip < phi_steps; ++ip) {
      const Direction d{theta.at(it, theta_steps), phi.at(ip, phi_steps)};
      const double g = factor->gain(d);
      if (g > best) {
        best = g;
        p.argmax = p.points.size();
      }
      p.points.push_back({d, g, 0.0});
    }
  }
  p.normalization = normalization > 0.0 ? normalization : best;
  for (auto& pt : p.points) pt.gain_db = to_db(pt.gain / p.normalization);
  p.evaluate = [factor](const Direction& d) { return factor->gain(d); };
  return p;
}

struct MaxGainDirection {
  double theta = 0.0;
  double phi = 0.0;
  double gain = 0.0;
  double gain_db = kDbFloor;

  Direction direction() const { return {theta, phi}; }
};

namespace detail {

template <typename F>
double golden_section_max(F&& f, double lo, double hi, int iterations = 40) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace detail

/// Grid argmax (first in theta-major order, so ties favour smaller theta then
/// smaller phi) refined by one golden-section pass along theta and one along
/// phi within a grid cell.
inline MaxGainDirection max_gain_direction(const BeamPattern& pattern) {
  detail::require(!pattern.points.empty(), "pattern is empty");
  const PatternPoint& peak = pattern.points[pattern.argmax];
  MaxGainDirection out{peak.direction.theta, peak.direction.phi, peak.gain, peak.gain_db};
  if (!pattern.evaluate) return out;

  const double dt = std::abs(pattern.theta.step(pattern.theta_steps));
  const double dp = std::abs(pattern.phi.step(pattern.phi_steps));
  double theta = out.theta, phi = out.phi;
  if (dt > 0.0) {
    const double lo = std::max(0.0, theta - dt), hi = theta + dt;
    const double cand = detail::golden_section_max([&](double th) { return pattern.evaluate({th, phi}); }, lo, hi);
    if (pattern.evaluate({cand, phi}) > out.gain) theta = cand;
  }
  double g = pattern.evaluate({theta, phi});
  if (dp > 0.0) {
    const double cand = detail::golden_section_max([&](double ph) { return pattern.evaluate({theta, ph}); }, phi - dp, phi + dp);
    if (pattern.evaluate({theta, cand}) > g) phi = cand;
  }
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  g = pattern.evaluate({theta, phi});
  if (g >= out.gain) {
    out.theta = theta;
    out.phi = phi;
    out.gain = g;
    out.gain_db = to_db(g / pattern.normalization);
  }
  return out;
}

/// Largest gain (dB relative to the pattern peak) outside a cone of
/// `exclusion_radius` around `main_lobe`.
inline double peak_sidelobe_db(const BeamPattern& pattern, const Direction& main_lobe, double exclusion_radius) {
  double best = 0.0;
  for (const auto& pt : pattern.points) {
    if (angular_distance(pt.direction, main_lobe) <= exclusion_radius) continue;
    best = std::max(best, pt.gain);
  }
  return to_db(best / pattern.max_gain());
}

/// Archimedean spiral of target directions: s_i = (i+1)/count,
/// theta = s theta_max, phi = 2 pi turns s (mod 2 pi).
inline std::vector<Direction> spiral_targets(int count, double theta_max, double turns = 6.0) {
  detail::require(count >= 1, "spiral needs at least one target");
  detail::require(theta_max > 0.0 && theta_max <= kPi / 2.0, "spiral theta_max must lie in (0, pi/2]");
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i + 1) / count;
    double phi = std::fmod(kTwoPi * turns * s, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    out.push_back({s * theta_max, phi});
  }
  return out;
}

}  // namespace dpbeam
