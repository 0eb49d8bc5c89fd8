#pragma once

#include "dpbeam/qubo.hpp"
#include "dpbeam/rng.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <string_view>
#include <thread>

namespace dpbeam {

enum class EarlyStop { Off, C1, C1C2 };
enum class StopReason { C1, C2, Exhausted };

inline std::string_view to_string(EarlyStop mode) {
  switch (mode) {
    case EarlyStop::Off: return "off";
    case EarlyStop::C1: return "c1";
    case EarlyStop::C1C2: return "c1c2";
  }
  return "off";
}

inline EarlyStop parse_early_stop(std::string_view s) {
  if (s == "off") return EarlyStop::Off;
  if (s == "c1") return EarlyStop::C1;
  if (s == "c1c2") return EarlyStop::C1C2;
  throw InvalidArgument("early stop mode must be one of off, c1, c1c2");
}

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::C1: return "C1";
    case StopReason::C2: return "C2";
    case StopReason::Exhausted: return "exhausted";
  }
  return "exhausted";
}

struct SaParams {
  int batches = 50;
  int sweeps = 50;
  /// Inverse temperatures before rescaling by 1 / mean|Q_ij|; interpolated
  /// geometrically across the sweeps of every batch.
  double beta_hot = 0.1;
  double beta_cold = 10.0;
  int g_min = 5;
  int g_max = 15;
  /// Sigmoid midpoint and steepness of the stagnation budget. Zero selects
  /// the running median of positive batch-best energies and 1/5 of it.
  double g_midpoint = 0.0;
  double g_steepness = 0.0;
  std::uint64_t seed = 1;
  EarlyStop early_stop = EarlyStop::C1C2;
  /// Batches run concurrently when > 1. bits_explored is then not
  /// reproducible; best energies are.
  int threads = 1;

  void validate() const {
    detail::require(batches >= 1, "SA needs at least one batch");
    detail::require(sweeps >= 1, "SA needs at least one sweep per batch");
    detail::require(beta_hot > 0.0 && beta_hot <= beta_cold, "SA requires 0 < beta_hot <= beta_cold");
    detail::require(g_min >= 1 && g_min <= g_max, "SA requires 1 <= G_min <= G_max");
    detail::require(g_midpoint >= 0.0 && g_steepness >= 0.0, "G-schedule midpoint and steepness must be non-negative");
    detail::require(threads >= 1, "SA thread count must be positive");
  }
  bool operator==(const SaParams&) const = default;
};

struct SaOutcome {
  Bits best_config;
  double best_energy = std::numeric_limits<double>::infinity();
  StopReason stop_reason = StopReason::Exhausted;
  std::uint64_t bits_explored = 0;
  bool negative_found = false;
  int batches_run = 0;
  /// Best energy of each completed batch, and the running minimum after it.
  std::vector<double> batch_best;
  std::vector<double> best_trace;
};

/// Local fields h_k = Q_kk + sum_{j != k} Q_kj x_j of the current
/// configuration; flipping bit k changes H by (1 - 2 x_k) h_k.
class LocalFields {
 public:
  LocalFields(const QuboInstance& instance, Bits x) : instance_(&instance), x_(std::move(x)) {
    detail::require(static_cast<Eigen::Index>(x_.size()) == instance.size(), "bit vector length does not match QUBO size");
    resync();
  }

  double delta(Eigen::Index k) const {
    return x_[static_cast<std::size_t>(k)] ? -fields_[k] : fields_[k];
  }

  void flip(Eigen::Index k) {
    const double step = x_[static_cast<std::size_t>(k)] ? -1.0 : 1.0;
    energy_ += step * fields_[k];
    x_[static_cast<std::size_t>(k)] ^= 1U;
    fields_.noalias() += step * instance_->coupling().col(k);
  }

  /// Rebuilds fields and energy from scratch.
  void resync() {
    fields_ = instance_->linear();
    const RMatrix& c = instance_->coupling();
    for (Eigen::Index j = 0; j < instance_->size(); ++j)
      if (x_[static_cast<std::size_t>(j)]) fields_.noalias() += c.col(j);
    energy_ = qubo_energy(*instance_, x_);
  }

  /// Full recomputation vs the incremental energy; throws when they differ
  /// by more than `rel_tol` of the instance magnitude.
  void audit(double rel_tol = 1e-9) const {
    const double full = qubo_energy(*instance_, x_);
    const double tol = rel_tol * std::max(1.0, instance_->magnitude());
    if (std::abs(full - energy_) > tol) {
      throw InternalConsistencyError("annealer local fields are stale: incremental energy " + std::to_string(energy_) +
                                     " vs recomputed " + std::to_string(full));
    }
  }

  double energy() const { return energy_; }
  const Bits& bits() const { return x_; }

 private:
  const QuboInstance* instance_;
  Bits x_;
  RVector fields_;
  double energy_ = 0.0;
};

/// H(x with bit k flipped) - H(x), O(1).
inline double energy_delta(const QuboInstance& instance, const LocalFields& fields, Eigen::Index k) {
  detail::require(k >= 0 && k < instance.size(), "flip index out of range");
  return fields.delta(k);
}

struct GScheduleParams {
  int g_min = 5;
  int g_max = 15;
  double midpoint = 1.0;
  double steepness = 0.2;
};

/// Stagnation budget in batches: G_max near zero energy, falling to G_min
/// for large energies along a sigmoid.
inline int g_schedule(double min_energy, const GScheduleParams& p) {
  const double z = -(min_energy - p.midpoint) / p.steepness;
  const double s = 1.0 / (1.0 + std::exp(-z));
  const double g = std::round(p.g_min + (p.g_max - p.g_min) * s);
  return static_cast<int>(std::clamp(g, static_cast<double>(p.g_min), static_cast<double>(p.g_max)));
}

/// Metropolis rule: downhill always, uphill with probability exp(-beta d).
inline bool metropolis_accept(double delta, double beta, double u) {
  if (delta <= 0.0) return true;
  const double x = beta * delta;
  return x < 700.0 && u < std::exp(-x);
}

namespace detail {

struct BatchResult {
  Bits best_config;
  double best_energy = std::numeric_limits<double>::infinity();
  std::uint64_t bits_explored = 0;
  bool c1_hit = false;
  bool cancelled = false;
};

inline std::vector<double> beta_schedule(const SaParams& p, double scale) {
  std::vector<double> betas(static_cast<std::size_t>(p.sweeps));
  for (int s = 0; s < p.sweeps; ++s) {
    const double frac = p.sweeps == 1 ? 1.0 : static_cast<double>(s) / (p.sweeps - 1);
    betas[static_cast<std::size_t>(s)] = scale * p.beta_hot * std::pow(p.beta_cold / p.beta_hot, frac);
  }
  return betas;
}

inline BatchResult run_batch(const QuboInstance& instance, const SaParams& p, const std::vector<double>& betas, int batch,
                             std::atomic<bool>* cancel) {
  const Eigen::Index n = instance.size();
  CounterRng rng(p.seed + static_cast<std::uint64_t>(batch));
  Bits x(static_cast<std::size_t>(n));
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
  LocalFields fields(instance, std::move(x));
  const bool c1 = p.early_stop != EarlyStop::Off;

  BatchResult r;
  r.best_energy = fields.energy();
  r.best_config = fields.bits();
  if (c1 && r.best_energy < 0.0) {
    r.c1_hit = true;
    return r;
  }
  for (double beta : betas) {
    if (cancel && cancel->load(std::memory_order_relaxed)) {
      r.cancelled = true;
      break;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      ++r.bits_explored;
      const double d = fields.delta(k);
      if (c1 && fields.energy() + d < 0.0) {
        fields.flip(k);
        // Confirm the certificate against a full evaluation before stopping.
        if (qubo_energy(instance, fields.bits()) < 0.0) {
          r.best_energy = fields.energy();
          r.best_config = fields.bits();
          r.c1_hit = true;
          if (cancel) cancel->store(true, std::memory_order_relaxed);
          return r;
        }
        fields.resync();
        continue;
      }
      if (d > 0.0 && !metropolis_accept(d, beta, rng.uniform())) continue;
      fields.flip(k);
      if (fields.energy() < r.best_energy) {
        r.best_energy = fields.energy();
        r.best_config = fields.bits();
      }
    }
  }
  fields.audit();
  return r;
}

inline double median_positive(const std::vector<double>& values) {
  std::vector<double> pos;
  for (double v : values)
    if (v > 0.0) pos.push_back(v);
  if (pos.empty()) return 0.0;
  const std::size_t mid = pos.size() / 2;
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(mid), pos.end());
  double m = pos[mid];
  if (pos.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace detail

/// Simulated annealing with sequential Metropolis sweeps, independent
/// batches, and the C1 (negative energy seen) / C2 (stagnant for G batches)
/// early stops.
inline SaOutcome run_sa(const QuboInstance& instance, const SaParams& params) {
  params.validate();
  detail::require(instance.size() > 0, "QUBO instance is empty");
  const double mean = instance.mean_abs_entry();
  const auto betas = detail::beta_schedule(params, mean > 0.0 ? 1.0 / mean : 1.0);

  SaOutcome out;
  int stagnant = 0;
  std::atomic<bool> cancel{false};
  const int wave = std::max(1, params.threads);

  for (int first = 0; first < params.batches; first += wave) {
    const int count = std::min(wave, params.batches - first);
    std::vector<detail::BatchResult> results(static_cast<std::size_t>(count));
    if (count == 1) {
      results[0] = detail::run_batch(instance, params, betas, first, nullptr);
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < count; ++i) {
        pool.emplace_back([&, i] {
          results[static_cast<std::size_t>(i)] = detail::run_batch(instance, params, betas, first + i, &cancel);
        });
      }
      for (auto& t : pool) t.join();
    }

    for (auto& r : results) {
      out.bits_explored += r.bits_explored;
      if (r.cancelled && !r.c1_hit) continue;
      ++out.batches_run;
      out.batch_best.push_back(r.best_energy);
      const bool improved = r.best_energy < out.best_energy;
      if (improved) {
        out.best_energy = r.best_energy;
        out.best_config = std::move(r.best_config);
      }
      out.best_trace.push_back(out.best_energy);
      if (r.c1_hit) {
        out.stop_reason = StopReason::C1;
        out.negative_found = true;
        return out;
      }
      stagnant = improved ? 0 : stagnant + 1;
      if (params.early_stop == EarlyStop::C1C2 && out.best_energy >= 0.0) {
        GScheduleParams g{params.g_min, params.g_max, params.g_midpoint, params.g_steepness};
        if (g.midpoint == 0.0) g.midpoint = detail::median_positive(out.batch_best);
        if (g.steepness == 0.0) g.steepness = g.midpoint / 5.0;
        const int budget = (g.midpoint > 0.0 && g.steepness > 0.0) ? g_schedule(out.best_energy, g) : g.g_max;
        if (stagnant >= budget) {
          out.stop_reason = StopReason::C2;
          out.negative_found = out.best_energy < 0.0;
          return out;
        }
      }
    }
  }
  out.negative_found = out.best_energy < 0.0;
  out.stop_reason = StopReason::Exhausted;
  return out;
}

/// Adapter used by the bisection driver.
struct SaSolver {
  SaParams params;
  SaOutcome operator()(const QuboInstance& instance) const { return run_sa(instance, params); }
};

/// Gray-code enumeration of all 2^N_V configurations; exact ground state.
/// Ties keep the first configuration in Gray order (starting at x = 0).
struct ExhaustiveSolver {
  int max_variables = 26;

  SaOutcome operator()(const QuboInstance& instance) const {
    const Eigen::Index n = instance.size();
    detail::require(n >= 1 && n <= max_variables, "exhaustive solver: too many variables");
    LocalFields fields(instance, Bits(static_cast<std::size_t>(n), 0));
    SaOutcome out;
    out.best_energy = fields.energy();
    out.best_config = fields.bits();
    out.bits_explored = 1;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
      const int k = std::countr_zero(i);
      fields.flip(k);
      ++out.bits_explored;
      if (fields.energy() < out.best_energy) {
        out.best_energy = fields.energy();
        out.best_config = fields.bits();
      }
    }
    // Recompute the winner exactly; incremental sums drift over 2^n flips.
    out.best_energy = qubo_energy(instance, out.best_config);
    out.batches_run = 1;
    out.batch_best = {out.best_energy};
    out.best_trace = {out.best_energy};
    out.negative_found = out.best_energy < 0.0;
    out.stop_reason = StopReason::Exhausted;
    return out;
  }
};

}  // namespace dpbeam
