#pragma once

// On-disk cache of coupling matrices. Each matrix is stored as
// little-endian float64, interleaved (re, im), row-major; a JSON sidecar
// records the key material and shape.

#include "dpbeam/config.hpp"
#include "dpbeam/coupling.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

namespace dpbeam {

static_assert(std::endian::native == std::endian::little, "coupling cache assumes a little-endian host");

/// Everything the matrices depend on, in canonical text form.
inline std::string coupling_key_material(const RunConfig& c) {
  std::ostringstream o;
  o << "N=" << c.geometry.N << ";d=" << detail::toml_double(c.geometry.spacing_over_lambda)
    << ";lambda=" << detail::toml_double(c.geometry.lambda) << ";theta=" << detail::toml_double(c.target.theta_deg)
    << ";phi=" << detail::toml_double(c.target.phi_deg) << ";rho=" << detail::toml_double(c.target.cap_radius_rad)
    << ";polar=" << c.quadrature.polar_nodes << ";azimuth=" << c.quadrature.azimuth_nodes << ";sphere=" << c.quadrature.sphere;
  return o.str();
}

inline std::string coupling_key(const RunConfig& c) { return hex64(fnv1a(coupling_key_material(c))); }

namespace detail {

inline void write_matrix_bin(const std::filesystem::path& path, const CMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<double> row(static_cast<std::size_t>(2 * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row[static_cast<std::size_t>(2 * j)] = m(i, j).real();
      row[static_cast<std::size_t>(2 * j + 1)] = m(i, j).imag();
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("short write to " + path.string());
}

inline std::optional<CMatrix> read_matrix_bin(const std::filesystem::path& path, Eigen::Index n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  CMatrix m(n, n);
  std::vector<double> row(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) return std::nullopt;
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(row[static_cast<std::size_t>(2 * j)], row[static_cast<std::size_t>(2 * j + 1)]);
  }
  if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  return m;
}

}  // namespace detail

/// Returns cached matrices when the sidecar matches the key material exactly.
inline std::optional<CouplingMatrices> load_cached_coupling(const std::filesystem::path& dir, const RunConfig& c) {
  const std::string key = coupling_key(c);
  std::ifstream side(dir / (key + ".json"));
  if (!side) return std::nullopt;
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (meta.value("key_material", std::string{}) != coupling_key_material(c)) return std::nullopt;
  const Eigen::Index n = meta.value("n", Eigen::Index{0});
  if (n <= 0) return std::nullopt;
  auto a = detail::read_matrix_bin(dir / (key + ".A.bin"), n);
  auto b = detail::read_matrix_bin(dir / (key + ".B.bin"), n);
  if (!a || !b) return std::nullopt;
  CouplingMatrices m;
  m.A = std::move(*a);
  m.B = std::move(*b);
  auto err = [&](const char* k) {
    return meta.contains(k) && meta[k].is_number() ? meta[k].get<double>() : std::numeric_limits<double>::quiet_NaN();
  };
  m.a_info = {meta.value("a_polar_nodes", 0), meta.value("a_azimuth_nodes", 0), err("a_estimated_error")};
  m.b_info = {meta.value("b_polar_nodes", 0), meta.value("b_azimuth_nodes", 0), err("b_estimated_error")};
  return m;
}

inline void store_cached_coupling(const std::filesystem::path& dir, const RunConfig& c, const CouplingMatrices& m) {
  std::filesystem::create_directories(dir);
  const std::string key = coupling_key(c);
  detail::write_matrix_bin(dir / (key + ".A.bin"), m.A);
  detail::write_matrix_bin(dir / (key + ".B.bin"), m.B);
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json meta{{"format", "float64-le interleaved re/im, row-major"},
                      {"key", key},
                      {"key_material", coupling_key_material(c)},
                      {"n", m.A.rows()},
                      {"a_polar_nodes", m.a_info.polar_nodes},
                      {"a_azimuth_nodes", m.a_info.azimuth_nodes},
                      {"a_estimated_error", finite_or_null(m.a_info.estimated_error)},
                      {"b_polar_nodes", m.b_info.polar_nodes},
                      {"b_azimuth_nodes", m.b_info.azimuth_nodes},
                      {"b_estimated_error", finite_or_null(m.b_info.estimated_error)}};
  std::ofstream(dir / (key + ".json")) << meta.dump(2) << '\n';
}

}  // namespace dpbeam
