#pragma once

#include "dpbeam/types.hpp"

#include <cmath>
#include <optional>

namespace dpbeam {

/// Polar angle theta from +z (array broadside) and azimuth phi from +x, in radians.
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  static Direction from_degrees(double theta_deg, double phi_deg) {
    return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
  }
  double theta_deg() const { return rad_to_deg(theta); }
  double phi_deg() const { return rad_to_deg(phi); }
};

inline Vec3 direction_unit_vector(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

inline Vec3 direction_unit_vector(const Direction& d) { return direction_unit_vector(d.theta, d.phi); }

/// Great-circle distance between two directions, radians.
inline double angular_distance(const Direction& a, const Direction& b) {
  const Vec3 ua = direction_unit_vector(a);
  const Vec3 ub = direction_unit_vector(b);
  return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

/// Circular patch (spherical cap) on the far-field sphere.
struct TargetRegion {
  Direction center;
  double angular_radius = 0.05;

  TargetRegion() = default;
  TargetRegion(Direction c, double radius) : center(c), angular_radius(radius) {
    detail::require(radius > 0.0 && radius < kPi / 2.0, "target angular radius must lie in (0, pi/2)");
  }
};

/// Square-lattice description retained by planar arrays; lets the coupling
/// module assemble matrices from a difference table instead of per pair.
struct GridLayout {
  int side = 0;
  double spacing = 0.0;
};

/// Isotropic point elements. Positions are in meters; ordering is row-major
/// with x varying fastest.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Vec3> positions, double wavelength, std::optional<GridLayout> grid = std::nullopt)
      : positions_(std::move(positions)), wavelength_(wavelength), grid_(grid) {
    detail::require(!positions_.empty(), "array needs at least one element");
    detail::require(wavelength_ > 0.0 && std::isfinite(wavelength_), "wavelength must be positive");
    for (const auto& p : positions_) detail::require(p.allFinite(), "element positions must be finite");
    if (grid_) {
      detail::require(static_cast<std::size_t>(grid_->side) * grid_->side == positions_.size(),
                      "grid layout does not match element count");
    }
  }

  std::size_t size() const { return positions_.size(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const { return kTwoPi / wavelength_; }
  const std::optional<GridLayout>& grid() const { return grid_; }

  /// True when every element lies in the z = 0 plane.
  bool planar_xy() const {
    for (const auto& p : positions_)
      if (p.z() != 0.0) return false;
    return true;
  }

 private:
  std::vector<Vec3> positions_;
  double wavelength_;
  std::optional<GridLayout> grid_;
};

/// N x N grid in the z = 0 plane, centered on the origin.
inline ArrayGeometry build_planar_array(int side, double spacing, double wavelength) {
  detail::require(side >= 1, "grid side must be positive");
  detail::require(spacing > 0.0 && std::isfinite(spacing), "element spacing must be positive");
  detail::require(wavelength > 0.0 && std::isfinite(wavelength), "wavelength must be positive");
  std::vector<Vec3> positions;
  positions.reserve(static_cast<std::size_t>(side) * side);
  const double half = 0.5 * (side - 1);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      positions.emplace_back((col - half) * spacing, (row - half) * spacing, 0.0);
    }
  }
  return ArrayGeometry(std::move(positions), wavelength, GridLayout{side, spacing});
}

}  // namespace dpbeam
