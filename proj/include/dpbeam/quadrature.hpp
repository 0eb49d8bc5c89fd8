#pragma once

#include "dpbeam/geometry.hpp"

#include <cmath>
#include <vector>

namespace dpbeam {

struct QuadratureSpec {
  int polar_nodes = 64;     // Gauss-Legendre nodes in cos(colatitude)
  int azimuth_nodes = 128;  // trapezoid nodes in azimuth

  static constexpr int kMinPolar = 2;
  static constexpr int kMinAzimuth = 3;

  void validate() const {
    detail::require(polar_nodes >= kMinPolar, "quadrature needs at least 2 polar nodes");
    detail::require(azimuth_nodes >= kMinAzimuth, "quadrature needs at least 3 azimuth nodes");
  }
  bool operator==(const QuadratureSpec&) const = default;
};

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n) {
  detail::require(n >= 1, "Gauss-Legendre order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

/// Weighted directions covering a spherical cap.
struct SphereNodes {
  std::vector<Vec3> directions;
  std::vector<double> weights;

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Orthonormal frame whose third axis is `pole`.
inline void local_frame(const Vec3& pole, Vec3& e1, Vec3& e2) {
  const Vec3 helper = std::abs(pole.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  e1 = helper.cross(pole).normalized();
  e2 = pole.cross(e1);
}

/// Cap of angular radius `radius` around `center`: Gauss-Legendre in
/// cos(colatitude) measured from the cap center, trapezoid in azimuth.
/// radius = pi gives the whole sphere.
inline SphereNodes cap_nodes(const Direction& center, double radius, const QuadratureSpec& spec) {
  spec.validate();
  detail::require(radius > 0.0 && radius <= kPi, "cap radius must lie in (0, pi]");
  const Vec3 pole = direction_unit_vector(center);
  Vec3 e1, e2;
  local_frame(pole, e1, e2);

  const auto rule = gauss_legendre(spec.polar_nodes);
  const double s_lo = std::cos(radius);
  const double half_width = 0.5 * (1.0 - s_lo);
  const double mid = 0.5 * (1.0 + s_lo);
  const double dphi = kTwoPi / spec.azimuth_nodes;

  SphereNodes out;
  out.directions.reserve(static_cast<std::size_t>(spec.polar_nodes) * spec.azimuth_nodes);
  out.weights.reserve(out.directions.capacity());
  for (int i = 0; i < spec.polar_nodes; ++i) {
    const double s = mid + half_width * rule.nodes[i];
    const double sin_col = std::sqrt(std::max(0.0, 1.0 - s * s));
    const double w_s = half_width * rule.weights[i];
    for (int j = 0; j < spec.azimuth_nodes; ++j) {
      const double phi = dphi * j;
      out.directions.push_back(sin_col * std::cos(phi) * e1 + sin_col * std::sin(phi) * e2 + s * pole);
      out.weights.push_back(w_s * dphi);
    }
  }
  return out;
}

inline double cap_area(double radius) { return kTwoPi * (1.0 - std::cos(radius)); }

}  // namespace dpbeam
