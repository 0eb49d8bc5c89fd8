#pragma once

#include "dpbeam/geometry.hpp"
#include "dpbeam/quadrature.hpp"

#include <cmath>
#include <limits>

namespace dpbeam {

/// T_i = exp(-j k u . r_i) for a unit direction u.
inline CVector steering_vector(const ArrayGeometry& geometry, const Vec3& u) {
  const double k = geometry.wavenumber();
  CVector t(static_cast<Eigen::Index>(geometry.size()));
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    t[static_cast<Eigen::Index>(i)] = std::polar(1.0, -k * u.dot(geometry.position(i)));
  }
  return t;
}

inline CVector steering_vector(const ArrayGeometry& geometry, const Direction& d) {
  return steering_vector(geometry, direction_unit_vector(d));
}

enum class SphereExtent { Full, Hemisphere };
enum class BMethod { Analytic, Quadrature };

struct QuadratureInfo {
  int polar_nodes = 0;
  int azimuth_nodes = 0;
  /// Largest entry change against a half-resolution rule, relative to the
  /// largest entry. NaN when not estimated; 0 for closed forms.
  double estimated_error = std::numeric_limits<double>::quiet_NaN();
};

struct CouplingMatrices {
  CMatrix A;  // flux through the target cap
  CMatrix B;  // flux through the whole sphere (or hemisphere)
  QuadratureInfo a_info;
  QuadratureInfo b_info;
};

inline void hermitize(CMatrix& m) { m = (0.5 * (m + m.adjoint())).eval(); }

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

namespace detail {

// Planar lattice: A_ij depends only on the grid offset between i and j, so
// integrate the (2N-1)^2 offsets once and scatter.
inline CMatrix integrate_lattice(const ArrayGeometry& g, const SphereNodes& nodes) {
  const int side = g.grid()->side;
  const double d = g.grid()->spacing;
  const double k = g.wavenumber();
  const int span = 2 * side - 1;
  CMatrix kernel = CMatrix::Zero(span, span);  // (col offset, row offset)
  CVector px(span), py(span);
  for (std::size_t q = 0; q < nodes.directions.size(); ++q) {
    const Vec3& u = nodes.directions[q];
    const double w = nodes.weights[q];
    for (int m = 0; m < span; ++m) {
      const double off = (m - (side - 1)) * d;
      px[m] = std::polar(1.0, -k * u.x() * off);
      py[m] = std::polar(1.0, -k * u.y() * off);
    }
    kernel.noalias() += (w * px) * py.transpose();
  }
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  CMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int rj = static_cast<int>(j / side), cj = static_cast<int>(j % side);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int ri = static_cast<int>(i / side), ci = static_cast<int>(i % side);
      out(i, j) = kernel(ci - cj + side - 1, ri - rj + side - 1);
    }
  }
  return out;
}

// General positions: accumulate sum_q w_q T_q T_q^H in blocks of nodes.
inline CMatrix integrate_general(const ArrayGeometry& g, const SphereNodes& nodes) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  const double k = g.wavenumber();
  CMatrix out = CMatrix::Zero(n, n);
  constexpr std::size_t kBlock = 512;
  for (std::size_t start = 0; start < nodes.directions.size(); start += kBlock) {
    const std::size_t stop = std::min(start + kBlock, nodes.directions.size());
    CMatrix t(n, static_cast<Eigen::Index>(stop - start));
    for (std::size_t q = start; q < stop; ++q) {
      const double sw = std::sqrt(nodes.weights[q]);
      const Vec3& u = nodes.directions[q];
      for (Eigen::Index i = 0; i < n; ++i) {
        t(i, static_cast<Eigen::Index>(q - start)) = sw * std::polar(1.0, -k * u.dot(g.position(static_cast<std::size_t>(i))));
      }
    }
    out.noalias() += t * t.adjoint();
  }
  return out;
}

inline bool lattice_applicable(const ArrayGeometry& g) { return g.grid().has_value() && g.planar_xy(); }

inline CMatrix integrate(const ArrayGeometry& g, const SphereNodes& nodes) {
  return lattice_applicable(g) ? integrate_lattice(g, nodes) : integrate_general(g, nodes);
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline CMatrix cap_integral(const ArrayGeometry& g, const Direction& center, double radius,
                            const QuadratureSpec& spec, QuadratureInfo& info) {
  CMatrix m = integrate(g, cap_nodes(center, radius, spec));
  hermitize(m);
  info.polar_nodes = spec.polar_nodes;
  info.azimuth_nodes = spec.azimuth_nodes;
  if (lattice_applicable(g) && spec.polar_nodes >= 4 && spec.azimuth_nodes >= 6) {
    const QuadratureSpec coarse{spec.polar_nodes / 2, spec.azimuth_nodes / 2};
    CMatrix c = integrate(g, cap_nodes(center, radius, coarse));
    hermitize(c);
    const double scale = max_abs(m);
    info.estimated_error = scale > 0.0 ? max_abs(m - c) / scale : 0.0;
  }
  return m;
}

}  // namespace detail

/// Closed form of the full-sphere integral: B_ij = 4 pi sinc(k |r_i - r_j|).
inline CMatrix analytic_B(const ArrayGeometry& geometry, double area = 4.0 * kPi) {
  const Eigen::Index n = static_cast<Eigen::Index>(geometry.size());
  const double k = geometry.wavenumber();
  CMatrix b(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double dist = (geometry.position(static_cast<std::size_t>(i)) - geometry.position(static_cast<std::size_t>(j))).norm();
      const double v = area * sinc(k * dist);
      b(i, j) = v;
      b(j, i) = v;
    }
  }
  return b;
}

struct BOptions {
  BMethod method = BMethod::Analytic;
  SphereExtent extent = SphereExtent::Full;
  QuadratureSpec quadrature{128, 256};
};

/// Energy flux through the whole sphere (or the upper hemisphere).
inline CMatrix compute_B(const ArrayGeometry& geometry, const BOptions& options = {}, QuadratureInfo* info = nullptr) {
  QuadratureInfo local;
  QuadratureInfo& meta = info ? *info : local;
  if (options.method == BMethod::Analytic) {
    if (options.extent == SphereExtent::Full) {
      meta = QuadratureInfo{0, 0, 0.0};
      return analytic_B(geometry);
    }
    // For a z = 0 array the integrand is even under u_z -> -u_z, so each
    // hemisphere carries exactly half.
    if (geometry.planar_xy()) {
      meta = QuadratureInfo{0, 0, 0.0};
      return analytic_B(geometry, kTwoPi);
    }
  }
  options.quadrature.validate();
  const double radius = options.extent == SphereExtent::Full ? kPi : kPi / 2.0;
  return detail::cap_integral(geometry, Direction{0.0, 0.0}, radius, options.quadrature, meta);
}

/// Energy flux through the spherical cap `region`.
inline CMatrix compute_A(const ArrayGeometry& geometry, const TargetRegion& region, const QuadratureSpec& spec = {},
                         QuadratureInfo* info = nullptr) {
  spec.validate();
  QuadratureInfo local;
  return detail::cap_integral(geometry, region.center, region.angular_radius, spec, info ? *info : local);
}

inline CouplingMatrices compute_coupling(const ArrayGeometry& geometry, const TargetRegion& region,
                                         const QuadratureSpec& cap_spec = {}, const BOptions& b_options = {}) {
  CouplingMatrices out;
  out.A = compute_A(geometry, region, cap_spec, &out.a_info);
  out.B = compute_B(geometry, b_options, &out.b_info);
  return out;
}

/// Dense storage for both matrices, in bytes.
inline double coupling_bytes(std::size_t n) { return 2.0 * static_cast<double>(n) * static_cast<double>(n) * sizeof(Complex); }

}  // namespace dpbeam
