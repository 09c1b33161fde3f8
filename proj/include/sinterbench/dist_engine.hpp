#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sinterbench/distribution.hpp"
#include "sinterbench/mc_engine.hpp"
#include "sinterbench/measurement.hpp"
#include "sinterbench/pid.hpp"
#include "sinterbench/thermal.hpp"

namespace sinterbench {

struct DistConfig {
  /// Representation size N: particles carried between iterations and noise
  /// atoms drawn per iteration.
  std::size_t size = 32;
  /// 1-based iterations whose error and power mixtures are kept. The final
  /// iteration is always added.
  std::vector<int> record_iters;
  bool collect_iteration_stats = true;
  /// Upper bound on particles x noise atoms formed in one iteration.
  std::size_t expansion_budget = std::size_t{1} << 22;
};

struct DistResult {
  std::vector<IterationStats> iterations;  // empty unless collected
  std::vector<int> record_iters;
  std::vector<DiracMixture> error_mixtures;  // one per record_iters entry
  std::vector<DiracMixture> power_mixtures;
  DiracMixture e_ss;
  /// Particle x atom pairs pushed through the loop over the whole run.
  std::size_t pair_evaluations = 0;
};

/// Single deterministic pass of the closed loop over a weighted particle set
/// of joint (spot temperature, integral, previous error) states.
///
/// Each iteration pairs every particle with every quantized noise atom,
/// pushes the pair through measurement, PID and plant, and reports the error
/// and power of all pairs as mixtures. The pairs are then regrouped into N
/// equal-weight particles: pairs are ordered by the controller command the
/// successor state would issue on a noise-free measurement, consecutive
/// groups are formed, and each group is replaced by its component-wise
/// centroid, which keeps the mean of every state component exact.
DistResult run_distributional(const DistConfig& dc, const ControlConfig& cfg,
                              const PidGains& gains, const LumpedParams& plant,
                              const NoiseModel& noise);

/// Applies f to every support point; weights follow their points and
/// coinciding points are merged.
DiracMixture lift_through(const std::function<double(double)>& f, const DiracMixture& m);

}  // namespace sinterbench
