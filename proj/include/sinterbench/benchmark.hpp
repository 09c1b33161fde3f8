#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sinterbench/measurement.hpp"
#include "sinterbench/pid.hpp"
#include "sinterbench/thermal.hpp"

namespace sinterbench {

struct BenchPlan {
  std::vector<NoiseModel> noises{GaussianNoise{}, UniformNoise{}};
  std::vector<std::size_t> mc_sizes{256, 512, 1152, 2048, 4096, 8192, 16000, 32000};
  std::vector<std::size_t> dist_sizes{4, 16, 32, 64, 128};
  int repetitions = 30;
  std::size_t ground_truth_size = 200000;
  std::uint64_t seed = 0;
  /// Workers for each timed MC run. One worker gives a per-core comparison
  /// against the single-threaded distributional engine.
  int mc_threads = 1;
  /// Workers for ground-truth generation (untimed); <= 0 means all.
  int ground_truth_threads = 0;

  void validate() const;
  /// Reduced plan for smoke runs.
  static BenchPlan quick();
};

enum class Method { mc, distributional };
std::string to_string(Method m);

struct BenchmarkRecord {
  Method method = Method::mc;
  std::size_t size = 0;
  std::string noise;  // noise_kind tag
  double w1_mean = 0;
  double w1_std = 0;
  double runtime_ms_mean = 0;
  double runtime_ms_std = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;
  std::vector<double> w1;          // per repetition
  std::vector<double> runtime_ms;  // per repetition
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  /// W1 between the two halves of each ground truth: the accuracy floor the
  /// reference itself can resolve.
  std::map<std::string, double> ground_truth_floor;
  double timer_resolution_ns = 0;
  std::vector<std::string> warnings;
};

using BenchProgress = std::function<void(const BenchmarkRecord&)>;

/// Times every (method, size, noise) cell and scores each run's
/// steady-state error distribution by W1 against a per-noise ground truth.
/// Only the propagation run is timed; each cell gets one untimed warmup.
BenchmarkReport run_benchmark(const BenchPlan& plan, const ControlConfig& cfg,
                              const PidGains& gains, const LumpedParams& plant,
                              const BenchProgress& progress = {});

struct SpeedupReport {
  std::string noise;
  std::size_t mc_size = 0;
  std::size_t dist_size = 0;
  double mc_runtime_ms = 0;
  double dist_runtime_ms = 0;
  double mc_w1 = 0;
  double dist_w1 = 0;
  double ratio = 0;
  bool matched = false;
};

/// Per noise type: picks the cheapest distributional cell whose W1 mean is
/// statistically indistinguishable from the best one (within the sum of
/// their W1 stds, or within `tolerance[noise]` when that is larger), then
/// the smallest MC cell at least as accurate, and reports the runtime ratio.
/// Without a matching MC cell the ratio is taken at the largest MC cell and
/// `matched` is false.
std::vector<SpeedupReport> speedup_at_matched_accuracy(
    const std::vector<BenchmarkRecord>& records,
    const std::map<std::string, double>& tolerance = {});

/// Smallest positive step of the monotonic clock observed over a short probe.
double measure_timer_resolution_ns();

}  // namespace sinterbench
