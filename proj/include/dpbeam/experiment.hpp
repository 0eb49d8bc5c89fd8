#pragma once

// End-to-end runs: geometry -> coupling matrices -> continuous baseline ->
// bisection over QUBOs -> beam evaluation -> files under out/<run-id>/.

#include "dpbeam/beam.hpp"
#include "dpbeam/bisection.hpp"
#include "dpbeam/config.hpp"
#include "dpbeam/coupling_cache.hpp"
#include "dpbeam/plot.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace dpbeam {

inline constexpr const char* kReportSchema = "dpbeam.run-report/1";

/// A failure inside one pipeline stage. `config_error` selects exit code 2
/// over 3 in the CLI.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, bool config_error)
      : std::runtime_error("stage '" + stage + "': " + message), stage_(std::move(stage)), config_error_(config_error) {}
  const std::string& stage() const { return stage_; }
  bool config_error() const { return config_error_; }

 private:
  std::string stage_;
  bool config_error_;
};

struct MethodResult {
  std::string method;
  WeightVector weights;
  double ratio = 0.0;
  /// Refined pattern peak; gain is directivity (linear).
  MaxGainDirection peak;
  double max_gain_dbi = kDbFloor;
  double target_gain_dbi = kDbFloor;
  double pointing_error_deg = 0.0;
  double peak_sidelobe_db = kDbFloor;
};

struct RunReport {
  std::string run_id;
  RunConfig config;
  double lambda_max = 0.0;
  double continuous_residual = 0.0;
  double t_star = 0.0;
  std::size_t t_updates = 0;
  int t_update_bound = 0;
  std::uint64_t bits_explored = 0;
  std::vector<BisectionStep> history;
  std::vector<MethodResult> methods;
  std::vector<std::string> warnings;
  QuadratureInfo a_info;
  QuadratureInfo b_info;
  bool coupling_from_cache = false;
  double sidelobe_exclusion_deg = 0.0;
  double wall_time_s = 0.0;
  std::filesystem::path output_dir;

  const MethodResult* method(std::string_view name) const {
    for (const auto& m : methods)
      if (m.method == name) return &m;
    return nullptr;
  }
};

struct ExperimentOptions {
  bool write_outputs = true;
  /// Skip beam evaluation (sweeps that only need solver statistics).
  bool evaluate = true;
  std::ostream* log = nullptr;
  ContinuousOptions continuous;
};

/// Bytes of dense storage a run needs at its peak: A and B (complex n x n),
/// the two real coefficient matrices and one QUBO (N_V x N_V each), plus
/// one complex n x n temporary while the coefficients are formed.
inline double estimate_memory_bytes(const RunConfig& c) {
  const double n = static_cast<double>(c.geometry.N) * c.geometry.N;
  const double nv = n * (c.K == 4 ? 2.0 : 1.0);
  return 3.0 * n * n * sizeof(Complex) + 3.0 * nv * nv * sizeof(double);
}

inline void check_memory_budget(const RunConfig& c) {
  const double need = estimate_memory_bytes(c);
  const double budget = c.memory_budget_gib * 1024.0 * 1024.0 * 1024.0;
  if (need > budget) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "N=%d, K=%d needs about %.2f GiB of dense matrices, over the %.2f GiB budget; "
                  "reduce geometry.N or K, or raise memory_budget_gib if the machine has the memory",
                  c.geometry.N, c.K, need / (1024.0 * 1024.0 * 1024.0), c.memory_budget_gib);
    throw ConfigError(buf);
  }
}

namespace detail {

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json config_json(const RunConfig& c) {
  const auto& s = c.solver;
  const auto& e = c.evaluation;
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"memory_budget_gib", c.memory_budget_gib},
          {"sweep_mode", c.sweep_mode},
          {"K", c.K},
          {"geometry", {{"N", c.geometry.N}, {"spacing_over_lambda", c.geometry.spacing_over_lambda}, {"lambda", c.geometry.lambda}}},
          {"target", {{"theta_deg", c.target.theta_deg}, {"phi_deg", c.target.phi_deg}, {"cap_radius_rad", c.target.cap_radius_rad}}},
          {"quadrature",
           {{"polar_nodes", c.quadrature.polar_nodes},
            {"azimuth_nodes", c.quadrature.azimuth_nodes},
            {"sphere", c.quadrature.sphere},
            {"cache_dir", c.quadrature.cache_dir}}},
          {"solver",
           {{"backend", s.backend},
            {"batches", s.batches},
            {"sweeps", s.sweeps},
            {"beta_hot", s.beta_hot},
            {"beta_cold", s.beta_cold},
            {"g_min", s.g_min},
            {"g_max", s.g_max},
            {"g_midpoint", s.g_midpoint},
            {"g_steepness", s.g_steepness},
            {"early_stop", to_string(s.early_stop)},
            {"threads", s.threads},
            {"tol", s.tol},
            {"alpha", s.alpha},
            {"verify_upper", s.verify_upper},
            {"diagonal_loading", s.diagonal_loading}}},
          {"evaluation",
           {{"theta_steps", e.theta_steps},
            {"phi_steps", e.phi_steps},
            {"theta_max_deg", e.theta_max_deg},
            {"methods", e.methods},
            {"write_patterns", e.write_patterns},
            {"write_plots", e.write_plots},
            {"spiral_count", e.spiral_count},
            {"spiral_theta_max_deg", e.spiral_theta_max_deg},
            {"spiral_turns", e.spiral_turns}}}};
}

/// The effective solver settings, including the rules behind "auto" values.
inline nlohmann::json solver_defaults_json(const RunConfig& c, const ContinuousOptions& co) {
  const auto& s = c.solver;
  nlohmann::json sa{{"batches", s.batches},
                    {"sweeps", s.sweeps},
                    {"beta_hot", s.beta_hot},
                    {"beta_cold", s.beta_cold},
                    {"beta_schedule", "geometric from beta_hot to beta_cold over the sweeps of each batch"},
                    {"beta_scale", "1 / mean |Q_ij| of each QUBO instance"},
                    {"g_min", s.g_min},
                    {"g_max", s.g_max},
                    {"g_midpoint", s.g_midpoint},
                    {"g_steepness", s.g_steepness},
                    {"g_midpoint_rule", s.g_midpoint == 0.0 ? "median of positive batch-best energies" : "fixed"},
                    {"g_steepness_rule", s.g_steepness == 0.0 ? "midpoint / 5" : "fixed"},
                    {"early_stop", to_string(s.early_stop)},
                    {"threads", s.threads},
                    {"batch_seed_rule", "seed + batch index, reused at every bisection step"},
                    {"seed", c.seed}};
  return {{"backend", s.backend},
          {"annealer", sa},
          {"bisection", {{"t0", 0.0}, {"t1", 1.0}, {"tol", s.tol}, {"alpha", s.alpha}, {"verify_upper", s.verify_upper}}},
          {"continuous",
           {{"dense_limit", co.dense_limit},
            {"lanczos_max_basis", co.lanczos_max_basis},
            {"lanczos_max_restarts", co.lanczos_max_restarts},
            {"lanczos_tol", co.lanczos_tol},
            {"min_relative_eigenvalue", co.min_relative_eigenvalue},
            {"diagonal_loading", c.solver.diagonal_loading},
            {"diagonal_loading_rule", "B + diagonal_loading * mean(diag B) * I for the eigenproblem; ratios use B"},
            {"global_phase", "largest-magnitude entry real and positive"}}},
          {"coupling",
           {{"A", "Gauss-Legendre x trapezoid cap quadrature"},
            {"B", "closed form 4 pi sinc(k |r_i - r_j|), halved for the hemisphere"},
            {"polar_nodes", c.quadrature.polar_nodes},
            {"azimuth_nodes", c.quadrature.azimuth_nodes}}},
          {"gain", "directivity 4 pi |T^H w|^2 / w^H B_full w in dBi"}};
}

inline nlohmann::json step_json(const BisectionStep& s, bool with_batches) {
  nlohmann::json j{{"t", s.t},
                   {"decision", to_string(s.decision)},
                   {"min_energy", finite_or_null(s.min_energy)},
                   {"bits_explored", s.bits_explored},
                   {"stop_reason", to_string(s.stop_reason)},
                   {"batches_run", s.batches_run},
                   {"t0", s.t0},
                   {"t1", s.t1}};
  if (with_batches) {
    nlohmann::json arr = nlohmann::json::array();
    for (double e : s.batch_best) arr.push_back(finite_or_null(e));
    j["batch_best"] = std::move(arr);
  }
  return j;
}

}  // namespace detail

/// Report JSON. `with_wall_time` false gives the deterministic body.
inline nlohmann::json report_json(const RunReport& r, bool with_wall_time = true, const ContinuousOptions& co = {}) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& m : r.methods) {
    methods[m.method] = {{"label", to_string(m.weights.label)},
                         {"ratio", m.ratio},
                         {"max_gain_dbi", m.max_gain_dbi},
                         {"theta_deg", rad_to_deg(m.peak.theta)},
                         {"phi_deg", rad_to_deg(m.peak.phi)},
                         {"target_gain_dbi", m.target_gain_dbi},
                         {"pointing_error_deg", m.pointing_error_deg},
                         {"peak_sidelobe_db", m.peak_sidelobe_db}};
  }
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.history) steps.push_back(detail::step_json(s, false));
  nlohmann::json j{{"schema", kReportSchema},
                   {"run_id", r.run_id},
                   {"config", detail::config_json(r.config)},
                   {"solver_defaults", detail::solver_defaults_json(r.config, co)},
                   {"results",
                    {{"lambda_max", r.lambda_max},
                     {"continuous_relative_residual", r.continuous_residual},
                     {"t_star", r.t_star},
                     {"t_updates", r.t_updates},
                     {"t_update_bound", r.t_update_bound},
                     {"bits_explored", r.bits_explored},
                     {"sidelobe_exclusion_deg", r.sidelobe_exclusion_deg},
                     {"methods", methods}}},
                   {"bisection_trace", steps},
                   {"quadrature",
                    {{"a_polar_nodes", r.a_info.polar_nodes},
                     {"a_azimuth_nodes", r.a_info.azimuth_nodes},
                     {"a_estimated_error", detail::finite_or_null(r.a_info.estimated_error)},
                     {"coupling_from_cache", r.coupling_from_cache}}},
                   {"warnings", r.warnings}};
  if (with_wall_time) j["wall_time_s"] = r.wall_time_s;
  return j;
}

namespace detail {

struct StageGuard {
  const char* name;
  std::ostream* log;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  StageGuard(const char* n, std::ostream* l) : name(n), log(l) {
    if (log) *log << "[dpbeam] " << name << " ...\n" << std::flush;
  }
  ~StageGuard() {
    if (log) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *log << "[dpbeam] " << name << " done in " << s << " s\n" << std::flush;
    }
  }
};

template <typename F>
auto run_stage(const char* name, std::ostream* log, F&& f) -> decltype(f()) {
  StageGuard guard(name, log);
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), true);
  } catch (const IllConditioned& e) {
    throw StageError(name, std::string("ill-conditioned: ") + e.what(), false);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), false);
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace detail

inline ArrayGeometry geometry_for(const RunConfig& c) {
  return build_planar_array(c.geometry.N, c.geometry.spacing_over_lambda * c.geometry.lambda, c.geometry.lambda);
}

inline TargetRegion target_for(const RunConfig& c) {
  return TargetRegion(Direction::from_degrees(c.target.theta_deg, c.target.phi_deg), c.target.cap_radius_rad);
}

/// Half-width of the main lobe used to separate it from sidelobes:
/// 1.2 lambda / aperture, never smaller than the target cap.
inline double sidelobe_exclusion_radius(const RunConfig& c) {
  const double aperture = c.geometry.N * c.geometry.spacing_over_lambda;
  return std::max(c.target.cap_radius_rad, 1.2 / aperture);
}

inline RunReport run_experiment(const RunConfig& config, const ExperimentOptions& options = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  std::ostream* log = options.log;
  RunReport report;
  report.config = config;
  ContinuousOptions copt = options.continuous;
  copt.diagonal_loading = config.solver.diagonal_loading;

  detail::run_stage("config", log, [&] {
    validate_config(config);
    check_memory_budget(config);
    report.run_id = run_id(config);
    return 0;
  });
  const auto out_dir = std::filesystem::path(config.output_dir) / report.run_id;
  report.output_dir = out_dir;

  try {
    const ArrayGeometry geometry = detail::run_stage("geometry", log, [&] { return geometry_for(config); });
    const TargetRegion region = detail::run_stage("target", log, [&] { return target_for(config); });
    const PhaseAlphabet alphabet = PhaseAlphabet::standard(config.K);
    const bool hemisphere = config.quadrature.sphere == "hemisphere";

    CouplingMatrices m = detail::run_stage("coupling", log, [&] {
      if (!config.quadrature.cache_dir.empty()) {
        if (auto cached = load_cached_coupling(config.quadrature.cache_dir, config)) {
          report.coupling_from_cache = true;
          return std::move(*cached);
        }
      }
      BOptions bopt;
      bopt.extent = hemisphere ? SphereExtent::Hemisphere : SphereExtent::Full;
      auto mats = compute_coupling(geometry, region, {config.quadrature.polar_nodes, config.quadrature.azimuth_nodes}, bopt);
      if (!config.quadrature.cache_dir.empty()) store_cached_coupling(config.quadrature.cache_dir, config, mats);
      return mats;
    });
    report.a_info = m.a_info;
    report.b_info = m.b_info;
    // Directivity always uses the full sphere; a z = 0 array radiates the
    // same power into each hemisphere.
    const double full_sphere_factor = hemisphere ? 2.0 : 1.0;

    const ContinuousSolution cont =
        detail::run_stage("continuous", log, [&] { return solve_continuous(m.A, m.B, copt); });
    report.lambda_max = cont.lambda_max;
    report.continuous_residual = cont.relative_residual;

    BisectionResult bis = detail::run_stage("bisection", log, [&] {
      const auto coeffs = build_fractional_coefficients(m.A, m.B, alphabet);
      BisectionState state;
      state.tol = config.solver.tol;
      state.alpha = config.solver.alpha;
      BisectionOptions bopt;
      bopt.verify_upper = config.solver.verify_upper;
      if (config.solver.backend == "exhaustive") return bisection_solve(coeffs, alphabet, ExhaustiveSolver{}, state, bopt);
      return bisection_solve(coeffs, alphabet, SaSolver{config.sa_params()}, state, bopt);
    });
    report.t_star = bis.t_star;
    report.t_updates = bis.t_updates();
    report.t_update_bound = max_bisection_steps(1.0, config.solver.tol);
    report.bits_explored = bis.bits_explored;
    report.history = bis.history;
    for (const auto& w : bis.diagnostics.warnings) report.warnings.push_back("bisection: " + w);

    std::vector<BeamPattern> patterns;
    if (options.evaluate) {
      detail::run_stage("evaluation", log, [&] {
        Diagnostics qdiag;
        const double excl = sidelobe_exclusion_radius(config);
        report.sidelobe_exclusion_deg = rad_to_deg(excl);
        for (const auto& name : config.evaluation.methods) {
          MethodResult r;
          r.method = name;
          if (name == "continuous") {
            r.weights = cont.w_max;
          } else if (name == "discrete") {
            r.weights = bis.w_star;
          } else {
            r.weights = quantize_weights(cont.w_max, alphabet, &qdiag);
          }
          const CVector& w = r.weights.w;
          r.ratio = ratio_objective(w, m.A, m.B);
          const double total = full_sphere_factor * std::real(w.dot(m.B * w));
          auto pattern = pattern_grid(w, geometry, {0.0, deg_to_rad(config.evaluation.theta_max_deg)}, {0.0, kTwoPi},
                                      config.evaluation.theta_steps, config.evaluation.phi_steps);
          r.peak = max_gain_direction(pattern);
          r.max_gain_dbi = to_db(4.0 * kPi * r.peak.gain / total);
          r.target_gain_dbi = to_db(4.0 * kPi * beam_gain(w, geometry, region.center) / total);
          r.pointing_error_deg = rad_to_deg(angular_distance(r.peak.direction(), region.center));
          r.peak_sidelobe_db = peak_sidelobe_db(pattern, r.peak.direction(), excl);
          report.methods.push_back(std::move(r));
          patterns.push_back(std::move(pattern));
        }
        for (const auto& w : qdiag.warnings) report.warnings.push_back("quantize: " + w);
        return 0;
      });
    }

    if (options.write_outputs) {
      detail::run_stage("output", log, [&] {
        std::filesystem::remove_all(out_dir);
        std::filesystem::create_directories(out_dir);
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& s : report.history) trace.push_back(detail::step_json(s, true));
        detail::write_text(out_dir / "qubo_trace.json",
                           nlohmann::json{{"schema", "dpbeam.qubo-trace/1"}, {"run_id", report.run_id}, {"steps", trace}}.dump(2) + "\n");
        for (std::size_t i = 0; i < patterns.size(); ++i) {
          const auto& name = report.methods[i].method;
          if (config.evaluation.write_patterns) {
            std::ofstream csv(out_dir / ("pattern_" + name + ".csv"));
            write_pattern_csv(csv, patterns[i]);
          }
          if (config.evaluation.write_plots) {
            std::filesystem::create_directories(out_dir / "plots");
            std::ofstream svg(out_dir / "plots" / ("pattern_" + name + ".svg"));
            HeatmapStyle style;
            style.title = name + " weights, N=" + std::to_string(config.geometry.N) + ", K=" + std::to_string(config.K);
            style.marker = region.center;
            write_heatmap_svg(svg, patterns[i], style);
          }
        }
        report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        detail::write_text(out_dir / "report.json", report_json(report, true, copt).dump(2) + "\n");
        return 0;
      });
    }
  } catch (...) {
    if (options.write_outputs) {
      std::error_code ec;
      std::filesystem::remove_all(out_dir, ec);
    }
    throw;
  }
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepMode { ElementCount, Spiral, Timing };

inline std::string_view to_string(SweepMode m) {
  switch (m) {
    case SweepMode::ElementCount: return "element-count";
    case SweepMode::Spiral: return "spiral";
    case SweepMode::Timing: return "timing";
  }
  return "element-count";
}

inline SweepMode parse_sweep_mode(std::string_view s) {
  if (s == "element-count") return SweepMode::ElementCount;
  if (s == "spiral") return SweepMode::Spiral;
  if (s == "timing") return SweepMode::Timing;
  throw ConfigError("sweep mode must be one of element-count, spiral, timing");
}

/// One config per array size.
inline std::vector<RunConfig> expand_sizes(const RunConfig& base, const std::vector<int>& sizes) {
  if (sizes.empty()) throw ConfigError("size list is empty");
  std::vector<RunConfig> out;
  for (int n : sizes) {
    RunConfig c = base;
    c.geometry.N = n;
    validate_config(c);
    out.push_back(std::move(c));
  }
  return out;
}

/// One config per spiral target, from the base config's evaluation block.
inline std::vector<RunConfig> expand_spiral(const RunConfig& base) {
  if (base.evaluation.spiral_count < 1) throw ConfigError("spiral sweep needs spiral_count >= 1");
  std::vector<RunConfig> out;
  for (const auto& d : spiral_targets(base.evaluation.spiral_count, deg_to_rad(base.evaluation.spiral_theta_max_deg),
                                      base.evaluation.spiral_turns)) {
    RunConfig c = base;
    c.target.theta_deg = d.theta_deg();
    c.target.phi_deg = d.phi_deg();
    out.push_back(std::move(c));
  }
  return out;
}

struct SweepResult {
  std::string csv;
  std::filesystem::path path;
  std::vector<RunReport> reports;
};

/// Runs every config and aggregates one CSV row per config.
inline SweepResult run_sweep(const std::vector<RunConfig>& configs, SweepMode mode, const std::filesystem::path& out_dir,
                             ExperimentOptions options = {}) {
  if (configs.empty()) throw ConfigError("sweep needs at least one config");
  for (const auto& c : configs) {
    if (!c.sweep_mode.empty() && c.sweep_mode != to_string(mode)) {
      throw ConfigError("config tagged for sweep mode '" + c.sweep_mode + "' passed to a '" + std::string(to_string(mode)) +
                        "' sweep");
    }
    validate_config(c);
  }
  using detail::format_double;
  SweepResult out;
  std::ostringstream csv;
  if (mode == SweepMode::Timing) {
    options.evaluate = false;
    csv << "N,K,theta_deg,phi_deg,bits_off,bits_c1,bits_c1c2,t_star_off,t_star_c1,t_star_c1c2,t_updates_off,t_updates_c1,"
           "t_updates_c1c2,reduction_c1,reduction_c1c2\n";
    for (const auto& base : configs) {
      std::array<RunReport, 3> r;
      const std::array<EarlyStop, 3> modes{EarlyStop::Off, EarlyStop::C1, EarlyStop::C1C2};
      for (std::size_t i = 0; i < 3; ++i) {
        RunConfig c = base;
        c.solver.early_stop = modes[i];
        r[i] = run_experiment(c, options);
      }
      auto red = [&](std::size_t i) { return static_cast<double>(r[0].bits_explored) / static_cast<double>(r[i].bits_explored); };
      csv << base.geometry.N << ',' << base.K << ',' << format_double(base.target.theta_deg) << ','
          << format_double(base.target.phi_deg) << ',' << r[0].bits_explored << ',' << r[1].bits_explored << ','
          << r[2].bits_explored << ',' << format_double(r[0].t_star) << ',' << format_double(r[1].t_star) << ','
          << format_double(r[2].t_star) << ',' << r[0].t_updates << ',' << r[1].t_updates << ',' << r[2].t_updates << ','
          << format_double(red(1)) << ',' << format_double(red(2)) << '\n';
      for (auto& x : r) out.reports.push_back(std::move(x));
    }
  } else if (mode == SweepMode::ElementCount) {
    csv << "N,elements,lambda_max,t_star,continuous_max_gain_dbi,discrete_max_gain_dbi,quantized_max_gain_dbi,t_updates,"
           "bits_explored\n";
    for (const auto& c : configs) {
      RunConfig cc = c;
      cc.evaluation.methods = known_methods();
      auto r = run_experiment(cc, options);
      csv << c.geometry.N << ',' << c.geometry.N * c.geometry.N << ',' << format_double(r.lambda_max) << ','
          << format_double(r.t_star) << ',' << format_double(r.method("continuous")->max_gain_dbi) << ','
          << format_double(r.method("discrete")->max_gain_dbi) << ',' << format_double(r.method("quantized")->max_gain_dbi)
          << ',' << r.t_updates << ',' << r.bits_explored << '\n';
      out.reports.push_back(std::move(r));
    }
  } else {
    csv << "theta,phi,max_gain_db,achieved_theta,achieved_phi\n";
    for (const auto& c : configs) {
      RunConfig cc = c;
      if (std::find(cc.evaluation.methods.begin(), cc.evaluation.methods.end(), "discrete") == cc.evaluation.methods.end())
        cc.evaluation.methods.push_back("discrete");
      auto r = run_experiment(cc, options);
      const auto* d = r.method("discrete");
      csv << format_double(c.target.theta_deg) << ',' << format_double(c.target.phi_deg) << ','
          << format_double(d->max_gain_dbi) << ',' << format_double(rad_to_deg(d->peak.theta)) << ','
          << format_double(rad_to_deg(d->peak.phi)) << '\n';
      out.reports.push_back(std::move(r));
    }
  }
  out.csv = csv.str();
  if (options.write_outputs) {
    std::filesystem::create_directories(out_dir);
    out.path = out_dir / ("sweep_" + std::string(to_string(mode)) + ".csv");
    detail::write_text(out.path, out.csv);
  }
  return out;
}

}  // namespace dpbeam
