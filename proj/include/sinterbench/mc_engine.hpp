#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sinterbench/distribution.hpp"
#include "sinterbench/measurement.hpp"
#include "sinterbench/pid.hpp"
#include "sinterbench/thermal.hpp"

namespace sinterbench {

struct McConfig {
  std::size_t paths = 10000;
  NoiseModel noise = GaussianNoise{};
  std::uint64_t seed = 0;
  SeedDomain domain = SeedDomain::simulation;
  /// 1-based iterations whose full sample vectors are kept. The final
  /// iteration is always added.
  std::vector<int> record_iters;
  /// Per-iteration statistics (moments over all paths; mode and percentile
  /// interval from the first `quantile_paths` paths outside record_iters).
  bool collect_iteration_stats = true;
  std::size_t quantile_paths = 8192;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  /// <= 0: worker_count().
  int threads = 0;
};

struct PathTrajectory {
  std::vector<double> error;
  std::vector<double> power;
  std::vector<double> temperature;  // true spot temperature that was measured
};

struct IterationStats {
  int iter = 0;
  SummaryStats error;
  SummaryStats power;
};

struct EnsembleResult {
  std::vector<IterationStats> iterations;  // empty unless collected
  std::vector<int> record_iters;           // sorted, unique, ends at n_iters
  std::vector<EmpiricalDistribution> error_samples;  // one per record_iters entry
  std::vector<EmpiricalDistribution> power_samples;
  EmpiricalDistribution e_ss;  // final-iteration errors, path order
};

/// One noisy closed-loop rollout on its own substream.
PathTrajectory run_path(const ControlConfig& cfg, const PidGains& gains,
                        const LumpedParams& plant, const NoiseModel& noise, Substream stream);

/// Ensemble over `mc.paths` independent paths. Paths are grouped in fixed
/// chunks whose partial sums are merged in chunk order, so every output bit
/// is independent of the worker count.
EnsembleResult run_ensemble(const McConfig& mc, const ControlConfig& cfg, const PidGains& gains,
                            const LumpedParams& plant);

/// Path-by-path reference built on run_path. Samples match run_ensemble
/// bit for bit; moments agree to rounding.
EnsembleResult run_ensemble_serial(const McConfig& mc, const ControlConfig& cfg,
                                   const PidGains& gains, const LumpedParams& plant);

/// Large-sample reference distribution of the steady-state error, drawn
/// from the ground-truth seed domain (disjoint from every benchmark stream).
EmpiricalDistribution ground_truth(const ControlConfig& cfg, const PidGains& gains,
                                   const LumpedParams& plant, const NoiseModel& noise,
                                   std::size_t m_gt, std::uint64_t seed, int threads = 0);

}  // namespace sinterbench
