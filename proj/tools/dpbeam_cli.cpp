// dpbeam command-line front end.
//
//   dpbeam solve       --config run.toml [--seed N] [--early-stop off|c1|c1c2] [--phases 2|4] [--out DIR]
//   dpbeam sweep       --mode element-count|spiral|timing --config a.toml [--config b.toml ...] [--sizes 8,12,16]
//   dpbeam oracle      --config tiny.toml
//   dpbeam export-qubo --config run.toml [--t 0.5 ...] [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical or runtime error.

#include "dpbeam/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> early_stop;
  std::optional<int> phases;
  std::optional<std::string> out;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Override the RNG seed");
    app->add_option("--early-stop", early_stop, "Annealer early stop: off, c1, c1c2")
        ->check(CLI::IsMember({"off", "c1", "c1c2"}));
    app->add_option("--phases", phases, "Phase alphabet size")->check(CLI::IsMember({2, 4}));
    app->add_option("--out", out, "Output directory");
  }

  void apply(dpbeam::RunConfig& c) const {
    if (seed) c.seed = *seed;
    if (early_stop) c.solver.early_stop = dpbeam::parse_early_stop(*early_stop);
    if (phases) c.K = *phases;
    if (out) c.output_dir = *out;
    dpbeam::validate_config(c);
  }
};

dpbeam::RunConfig load(const std::string& path, const Overrides& o) {
  auto c = dpbeam::load_config(path);
  o.apply(c);
  return c;
}

int cmd_solve(const std::string& config_path, const Overrides& o, bool quiet) {
  const auto config = load(config_path, o);
  dpbeam::ExperimentOptions opt;
  opt.log = quiet ? nullptr : &std::cerr;
  const auto r = dpbeam::run_experiment(config, opt);
  std::cout << "run_id " << r.run_id << "\n";
  std::cout << "output " << r.output_dir.string() << "\n";
  std::cout << "lambda_max " << r.lambda_max << "\n";
  std::cout << "t_star " << r.t_star << " (" << r.t_updates << " t updates, " << r.bits_explored << " bits explored)\n";
  for (const auto& m : r.methods) {
    std::cout << m.method << " max_gain_dbi " << m.max_gain_dbi << " at theta " << dpbeam::rad_to_deg(m.peak.theta)
              << " phi " << dpbeam::rad_to_deg(m.peak.phi) << "\n";
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw dpbeam::ConfigError("--sizes must be a comma-separated list of integers");
    }
  }
  return out;
}

int cmd_sweep(const std::string& mode_name, const std::vector<std::string>& paths, const std::string& sizes,
              const Overrides& o, bool quiet) {
  const auto mode = dpbeam::parse_sweep_mode(mode_name);
  std::vector<dpbeam::RunConfig> configs;
  for (const auto& p : paths) {
    auto base = load(p, o);
    std::vector<dpbeam::RunConfig> expanded{base};
    if (!sizes.empty()) expanded = dpbeam::expand_sizes(base, parse_sizes(sizes));
    for (auto& c : expanded) {
      if (mode == dpbeam::SweepMode::Spiral) {
        for (auto& s : dpbeam::expand_spiral(c)) configs.push_back(std::move(s));
      } else {
        configs.push_back(std::move(c));
      }
    }
  }
  dpbeam::ExperimentOptions opt;
  opt.log = quiet ? nullptr : &std::cerr;
  const std::filesystem::path out = o.out ? *o.out : configs.front().output_dir;
  const auto r = dpbeam::run_sweep(configs, mode, out, opt);
  std::cout << r.csv;
  std::cerr << "wrote " << r.path.string() << "\n";
  return 0;
}

int cmd_oracle(const std::string& config_path, const Overrides& o) {
  const auto c = load(config_path, o);
  const std::size_t n = static_cast<std::size_t>(c.geometry.N) * c.geometry.N;
  const int bits = static_cast<int>(n) * (c.K == 4 ? 2 : 1);
  if (bits > 24) throw dpbeam::ConfigError("oracle enumeration is limited to 24 bits; N=" + std::to_string(c.geometry.N) +
                                           " with K=" + std::to_string(c.K) + " needs " + std::to_string(bits));
  const auto geometry = dpbeam::geometry_for(c);
  dpbeam::BOptions bopt;
  bopt.extent = c.quadrature.sphere == "hemisphere" ? dpbeam::SphereExtent::Hemisphere : dpbeam::SphereExtent::Full;
  const auto m = dpbeam::compute_coupling(geometry, dpbeam::target_for(c),
                                          {c.quadrature.polar_nodes, c.quadrature.azimuth_nodes}, bopt);
  const auto alphabet = dpbeam::PhaseAlphabet::standard(c.K);
  const auto& phases = alphabet.phases();

  // Plain enumeration of every phase vector, independent of the QUBO path.
  std::vector<std::size_t> idx(n, 0), best_idx(n, 0);
  dpbeam::CVector w(static_cast<Eigen::Index>(n));
  double best = -1.0;
  std::uint64_t count = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) w[static_cast<Eigen::Index>(i)] = phases[idx[i]];
    const double r = dpbeam::ratio_objective(w, m.A, m.B);
    ++count;
    if (r > best) {
      best = r;
      best_idx = idx;
    }
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == phases.size()) idx[pos++] = 0;
    if (pos == n) break;
  }
  dpbeam::BisectionState state;
  state.tol = c.solver.tol;
  state.alpha = c.solver.alpha;
  const auto bis = dpbeam::bisection_solve(m.A, m.B, alphabet, dpbeam::ExhaustiveSolver{}, state);
  nlohmann::json j{{"configurations", count},
                   {"max_ratio", best},
                   {"argmax_phase_deg", nlohmann::json::array()},
                   {"bisection_t_star", bis.t_star},
                   {"bisection_ratio", dpbeam::ratio_objective(bis.w_star.w, m.A, m.B)},
                   {"gap", best - bis.t_star},
                   {"within_tol", std::abs(best - bis.t_star) <= c.solver.tol}};
  for (std::size_t i : best_idx) j["argmax_phase_deg"].push_back(dpbeam::rad_to_deg(std::arg(phases[i])));
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_export_qubo(const std::string& config_path, std::vector<double> ts, const Overrides& o) {
  const auto c = load(config_path, o);
  dpbeam::check_memory_budget(c);
  if (ts.empty()) ts.push_back(0.5);
  const auto geometry = dpbeam::geometry_for(c);
  dpbeam::BOptions bopt;
  bopt.extent = c.quadrature.sphere == "hemisphere" ? dpbeam::SphereExtent::Hemisphere : dpbeam::SphereExtent::Full;
  const auto m = dpbeam::compute_coupling(geometry, dpbeam::target_for(c),
                                          {c.quadrature.polar_nodes, c.quadrature.azimuth_nodes}, bopt);
  const auto coeffs = dpbeam::build_fractional_coefficients(m.A, m.B, dpbeam::PhaseAlphabet::standard(c.K));
  const std::filesystem::path dir = std::filesystem::path(c.output_dir) / dpbeam::run_id(c);
  std::filesystem::create_directories(dir);
  for (double t : ts) {
    const auto q = dpbeam::assemble_bisection_qubo(coeffs, t);
    const auto path = dir / ("qubo_t" + dpbeam::detail::format_double(t) + ".txt");
    std::ofstream out(path);
    dpbeam::write_qubo_triplets(out, q);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::cout << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-phase beamforming by bisection over QUBO subproblems"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress stage progress on stderr");

  std::string config_path;
  Overrides overrides;

  auto* solve = app.add_subcommand("solve", "Run one configuration end to end");
  solve->add_option("--config", config_path, "Run config (TOML)")->required();
  overrides.add_to(solve);

  std::string mode;
  std::vector<std::string> sweep_paths;
  std::string sizes;
  auto* sweep = app.add_subcommand("sweep", "Run a list of configurations and aggregate a CSV");
  sweep->add_option("--mode", mode, "element-count, spiral or timing")->required();
  sweep->add_option("--config", sweep_paths, "Run configs (repeatable)")->required();
  sweep->add_option("--sizes", sizes, "Expand each config over these array sizes, e.g. 8,12,16");
  overrides.add_to(sweep);

  auto* oracle = app.add_subcommand("oracle", "Brute-force a tiny instance and compare with bisection");
  oracle->add_option("--config", config_path, "Run config (TOML)")->required();
  overrides.add_to(oracle);

  std::vector<double> ts;
  auto* export_qubo = app.add_subcommand("export-qubo", "Write bisection QUBOs as triplet files");
  export_qubo->add_option("--config", config_path, "Run config (TOML)")->required();
  export_qubo->add_option("--t", ts, "Bisection parameter(s) in [0, 1] (default 0.5)");
  overrides.add_to(export_qubo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(config_path, overrides, quiet);
    if (sweep->parsed()) return cmd_sweep(mode, sweep_paths, sizes, overrides, quiet);
    if (oracle->parsed()) return cmd_oracle(config_path, overrides);
    if (export_qubo->parsed()) return cmd_export_qubo(config_path, ts, overrides);
  } catch (const dpbeam::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.config_error() ? kExitConfig : kExitNumeric;
  } catch (const dpbeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dpbeam::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
