#pragma once

// Run configuration: a TOML file with nested tables, parsed with toml++.
// Unknown keys are errors. serialize_config writes every field, so the
// echo in a report shows the defaults that were actually in force.

#include "dpbeam/sa.hpp"

#include <toml++/toml.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dpbeam {

/// Thrown for anything wrong with a configuration; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct GeometryConfig {
  int N = 16;
  double spacing_over_lambda = 0.5;
  double lambda = 1.0;
  bool operator==(const GeometryConfig&) const = default;
};

struct TargetConfig {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  double cap_radius_rad = 0.05;
  bool operator==(const TargetConfig&) const = default;
};

struct QuadratureConfig {
  int polar_nodes = 64;
  int azimuth_nodes = 128;
  /// Domain of the denominator integral: "full" or "hemisphere".
  std::string sphere = "full";
  /// Directory for cached A/B matrices; empty disables the cache.
  std::string cache_dir;
  bool operator==(const QuadratureConfig&) const = default;
};

struct SolverConfig {
  /// "sa" or "exhaustive".
  std::string backend = "sa";
  int batches = 50;
  int sweeps = 50;
  double beta_hot = 0.1;
  double beta_cold = 10.0;
  int g_min = 5;
  int g_max = 15;
  double g_midpoint = 0.0;
  double g_steepness = 0.0;
  EarlyStop early_stop = EarlyStop::C1C2;
  int threads = 1;
  double tol = 1e-6;
  double alpha = 0.5;
  bool verify_upper = false;
  double diagonal_loading = 1e-9;  // relative to mean diag(B)
  bool operator==(const SolverConfig&) const = default;
};

struct EvaluationConfig {
  int theta_steps = 181;
  int phi_steps = 361;
  double theta_max_deg = 90.0;
  std::vector<std::string> methods{"continuous", "discrete", "quantized"};
  bool write_patterns = true;
  bool write_plots = true;
  int spiral_count = 10;
  double spiral_theta_max_deg = 15.0;
  double spiral_turns = 6.0;
  bool operator==(const EvaluationConfig&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  double memory_budget_gib = 8.0;
  /// Optional tag naming the sweep mode a config was written for.
  std::string sweep_mode;
  int K = 4;
  GeometryConfig geometry;
  TargetConfig target;
  QuadratureConfig quadrature;
  SolverConfig solver;
  EvaluationConfig evaluation;

  bool operator==(const RunConfig&) const = default;

  SaParams sa_params() const {
    SaParams p;
    p.batches = solver.batches;
    p.sweeps = solver.sweeps;
    p.beta_hot = solver.beta_hot;
    p.beta_cold = solver.beta_cold;
    p.g_min = solver.g_min;
    p.g_max = solver.g_max;
    p.g_midpoint = solver.g_midpoint;
    p.g_steepness = solver.g_steepness;
    p.seed = seed;
    p.early_stop = solver.early_stop;
    p.threads = solver.threads;
    return p;
  }
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"continuous", "discrete", "quantized"};
  return m;
}

namespace detail {

inline std::string toml_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

/// Reads one table, dispatching each key to a setter and rejecting the rest.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = node->value_exact<bool>();
      if (!v) fail(key, "a boolean");
      out = *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
      auto v = node->value_exact<std::string>();
      if (!v) fail(key, "a string");
      out = *v;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      auto v = node->value_exact<std::int64_t>();
      if (!v || *v < 0) fail(key, "a non-negative integer");
      out = static_cast<std::uint64_t>(*v);
    } else if constexpr (std::is_integral_v<T>) {
      auto v = node->value_exact<std::int64_t>();
      if (!v || *v < std::numeric_limits<T>::min() || *v > std::numeric_limits<T>::max()) fail(key, "an integer");
      out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!node->is_number()) fail(key, "a number");
      out = *node->value<double>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      const toml::array* arr = node->as_array();
      if (!arr) fail(key, "an array of strings");
      out.clear();
      for (const auto& el : *arr) {
        auto v = el.value_exact<std::string>();
        if (!v) fail(key, "an array of strings");
        out.push_back(*v);
      }
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  void get_early_stop(const char* key, EarlyStop& out) {
    std::string s(to_string(out));
    get(key, s);
    try {
      out = parse_early_stop(s);
    } catch (const InvalidArgument& e) {
      throw ConfigError(qualified(key) + ": " + e.what());
    }
  }

  const toml::table* subtable(const char* key) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (!node) return nullptr;
    if (!node->is_table()) throw ConfigError(qualified(key) + " must be a table");
    return node->as_table();
  }

  void finish() const {
    for (const auto& [k, v] : table_) {
      if (!seen_.count(std::string(k.str()))) throw ConfigError("unknown config key '" + qualified(std::string(k.str())) + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError("config key '" + qualified(key) + "' must be " + what);
  }

  const toml::table& table_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Range and consistency checks; throws ConfigError.
inline void validate_config(const RunConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  check(c.K == 2 || c.K == 4, "K must be 2 or 4");
  check(c.geometry.N >= 1, "geometry.N must be at least 1");
  check(c.geometry.spacing_over_lambda > 0.0, "geometry.spacing_over_lambda must be positive");
  check(c.geometry.lambda > 0.0, "geometry.lambda must be positive");
  check(std::isfinite(c.target.theta_deg) && std::isfinite(c.target.phi_deg), "target angles must be finite");
  check(c.target.cap_radius_rad > 0.0 && c.target.cap_radius_rad < kPi / 2.0, "target.cap_radius_rad must lie in (0, pi/2)");
  check(c.quadrature.polar_nodes >= 2 && c.quadrature.azimuth_nodes >= 3, "quadrature needs >= 2 polar and >= 3 azimuth nodes");
  check(c.quadrature.sphere == "full" || c.quadrature.sphere == "hemisphere", "quadrature.sphere must be 'full' or 'hemisphere'");
  check(c.solver.backend == "sa" || c.solver.backend == "exhaustive", "solver.backend must be 'sa' or 'exhaustive'");
  check(c.solver.tol > 0.0 && c.solver.tol < 1.0, "solver.tol must lie in (0, 1)");
  check(c.solver.alpha > 0.0 && c.solver.alpha < 1.0, "solver.alpha must lie in (0, 1)");
  check(c.solver.diagonal_loading >= 0.0 && c.solver.diagonal_loading < 1e-2,
        "solver.diagonal_loading must lie in [0, 0.01)");
  try {
    c.sa_params().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  check(c.evaluation.theta_steps >= 1 && c.evaluation.phi_steps >= 1, "evaluation grid steps must be positive");
  check(c.evaluation.theta_max_deg > 0.0 && c.evaluation.theta_max_deg <= 180.0, "evaluation.theta_max_deg must lie in (0, 180]");
  for (const auto& m : c.evaluation.methods) {
    check(std::find(known_methods().begin(), known_methods().end(), m) != known_methods().end(),
          "unknown evaluation method '" + m + "'");
  }
  check(c.evaluation.spiral_count >= 1, "evaluation.spiral_count must be at least 1");
  check(c.evaluation.spiral_theta_max_deg > 0.0 && c.evaluation.spiral_theta_max_deg <= 90.0,
        "evaluation.spiral_theta_max_deg must lie in (0, 90]");
  check(c.memory_budget_gib > 0.0, "memory_budget_gib must be positive");
  check(!c.output_dir.empty(), "output_dir must not be empty");
}

inline RunConfig parse_config(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  RunConfig c;
  detail::TableReader top(root, "");
  top.get("seed", c.seed);
  top.get("output_dir", c.output_dir);
  top.get("memory_budget_gib", c.memory_budget_gib);
  top.get("sweep_mode", c.sweep_mode);
  top.get("K", c.K);
  if (const auto* t = top.subtable("geometry")) {
    detail::TableReader r(*t, "geometry");
    r.get("N", c.geometry.N);
    r.get("spacing_over_lambda", c.geometry.spacing_over_lambda);
    r.get("lambda", c.geometry.lambda);
    r.finish();
  }
  if (const auto* t = top.subtable("target")) {
    detail::TableReader r(*t, "target");
    r.get("theta_deg", c.target.theta_deg);
    r.get("phi_deg", c.target.phi_deg);
    r.get("cap_radius_rad", c.target.cap_radius_rad);
    r.finish();
  }
  if (const auto* t = top.subtable("quadrature")) {
    detail::TableReader r(*t, "quadrature");
    r.get("polar_nodes", c.quadrature.polar_nodes);
    r.get("azimuth_nodes", c.quadrature.azimuth_nodes);
    r.get("sphere", c.quadrature.sphere);
    r.get("cache_dir", c.quadrature.cache_dir);
    r.finish();
  }
  if (const auto* t = top.subtable("solver")) {
    detail::TableReader r(*t, "solver");
    r.get("backend", c.solver.backend);
    r.get("batches", c.solver.batches);
    r.get("sweeps", c.solver.sweeps);
    r.get("beta_hot", c.solver.beta_hot);
    r.get("beta_cold", c.solver.beta_cold);
    r.get("g_min", c.solver.g_min);
    r.get("g_max", c.solver.g_max);
    r.get("g_midpoint", c.solver.g_midpoint);
    r.get("g_steepness", c.solver.g_steepness);
    r.get_early_stop("early_stop", c.solver.early_stop);
    r.get("threads", c.solver.threads);
    r.get("tol", c.solver.tol);
    r.get("alpha", c.solver.alpha);
    r.get("verify_upper", c.solver.verify_upper);
    r.get("diagonal_loading", c.solver.diagonal_loading);
    r.finish();
  }
  if (const auto* t = top.subtable("evaluation")) {
    detail::TableReader r(*t, "evaluation");
    r.get("theta_steps", c.evaluation.theta_steps);
    r.get("phi_steps", c.evaluation.phi_steps);
    r.get("theta_max_deg", c.evaluation.theta_max_deg);
    r.get("methods", c.evaluation.methods);
    r.get("write_patterns", c.evaluation.write_patterns);
    r.get("write_plots", c.evaluation.write_plots);
    r.get("spiral_count", c.evaluation.spiral_count);
    r.get("spiral_theta_max_deg", c.evaluation.spiral_theta_max_deg);
    r.get("spiral_turns", c.evaluation.spiral_turns);
    r.finish();
  }
  top.finish();
  validate_config(c);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; every field is written.
inline std::string serialize_config(const RunConfig& c) {
  using detail::toml_double;
  using detail::toml_string;
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::ostringstream o;
  o << "seed = " << c.seed << "\n";
  o << "output_dir = " << toml_string(c.output_dir) << "\n";
  o << "memory_budget_gib = " << toml_double(c.memory_budget_gib) << "\n";
  o << "sweep_mode = " << toml_string(c.sweep_mode) << "\n";
  o << "K = " << c.K << "\n";
  o << "\n[geometry]\n";
  o << "N = " << c.geometry.N << "\n";
  o << "spacing_over_lambda = " << toml_double(c.geometry.spacing_over_lambda) << "\n";
  o << "lambda = " << toml_double(c.geometry.lambda) << "\n";
  o << "\n[target]\n";
  o << "theta_deg = " << toml_double(c.target.theta_deg) << "\n";
  o << "phi_deg = " << toml_double(c.target.phi_deg) << "\n";
  o << "cap_radius_rad = " << toml_double(c.target.cap_radius_rad) << "\n";
  o << "\n[quadrature]\n";
  o << "polar_nodes = " << c.quadrature.polar_nodes << "\n";
  o << "azimuth_nodes = " << c.quadrature.azimuth_nodes << "\n";
  o << "sphere = " << toml_string(c.quadrature.sphere) << "\n";
  o << "cache_dir = " << toml_string(c.quadrature.cache_dir) << "\n";
  o << "\n[solver]\n";
  o << "backend = " << toml_string(c.solver.backend) << "\n";
  o << "batches = " << c.solver.batches << "\n";
  o << "sweeps = " << c.solver.sweeps << "\n";
  o << "beta_hot = " << toml_double(c.solver.beta_hot) << "\n";
  o << "beta_cold = " << toml_double(c.solver.beta_cold) << "\n";
  o << "g_min = " << c.solver.g_min << "\n";
  o << "g_max = " << c.solver.g_max << "\n";
  o << "g_midpoint = " << toml_double(c.solver.g_midpoint) << "\n";
  o << "g_steepness = " << toml_double(c.solver.g_steepness) << "\n";
  o << "early_stop = " << toml_string(std::string(to_string(c.solver.early_stop))) << "\n";
  o << "threads = " << c.solver.threads << "\n";
  o << "tol = " << toml_double(c.solver.tol) << "\n";
  o << "alpha = " << toml_double(c.solver.alpha) << "\n";
  o << "verify_upper = " << b(c.solver.verify_upper) << "\n";
  o << "diagonal_loading = " << toml_double(c.solver.diagonal_loading) << "\n";
  o << "\n[evaluation]\n";
  o << "theta_steps = " << c.evaluation.theta_steps << "\n";
  o << "phi_steps = " << c.evaluation.phi_steps << "\n";
  o << "theta_max_deg = " << toml_double(c.evaluation.theta_max_deg) << "\n";
  o << "methods = [";
  for (std::size_t i = 0; i < c.evaluation.methods.size(); ++i) o << (i ? ", " : "") << toml_string(c.evaluation.methods[i]);
  o << "]\n";
  o << "write_patterns = " << b(c.evaluation.write_patterns) << "\n";
  o << "write_plots = " << b(c.evaluation.write_plots) << "\n";
  o << "spiral_count = " << c.evaluation.spiral_count << "\n";
  o << "spiral_theta_max_deg = " << toml_double(c.evaluation.spiral_theta_max_deg) << "\n";
  o << "spiral_turns = " << toml_double(c.evaluation.spiral_turns) << "\n";
  return o.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Hash of the canonical config text, which includes the seed. The output
/// directory is excluded so moving a run does not rename it.
inline std::string run_id(const RunConfig& c) {
  RunConfig copy = c;
  copy.output_dir = "out";
  return hex64(fnv1a(serialize_config(copy)));
}

}  // namespace dpbeam
