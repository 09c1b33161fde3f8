#include "sinterbench/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "sinterbench/dist_engine.hpp"
#include "sinterbench/errors.hpp"
#include "sinterbench/mc_engine.hpp"

namespace sinterbench {

namespace {

using Clock = std::chrono::steady_clock;

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void finalize(BenchmarkRecord& r) {
  r.repetitions = static_cast<int>(r.w1.size());
  r.w1_mean = mean_of(r.w1);
  r.w1_std = std_of(r.w1);
  r.runtime_ms_mean = mean_of(r.runtime_ms);
  r.runtime_ms_std = std_of(r.runtime_ms);
}

template <class Run>
double timed_ms(Run&& run) {
  const auto start = Clock::now();
  run();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

// Distinct substream family per (cell size, repetition).
std::uint64_t mc_seed(std::uint64_t base, std::size_t size, int rep) {
  return mix64(mix64(base ^ (0x5eedull << 32) ^ size) + static_cast<std::uint64_t>(rep));
}

}  // namespace

void BenchPlan::validate() const {
  if (repetitions < 2) throw ConfigError("bench.repetitions must be at least 2");
  if (noises.empty()) throw ConfigError("bench.noises must not be empty");
  if (mc_sizes.empty() || dist_sizes.empty()) throw ConfigError("bench ladders must not be empty");
  for (std::size_t m : mc_sizes) {
    if (m < 2) throw ConfigError("bench.mc_sizes entries must be at least 2");
  }
  for (std::size_t n : dist_sizes) {
    if (n < 1) throw ConfigError("bench.dist_sizes entries must be at least 1");
  }
  if (ground_truth_size < 10000) throw ConfigError("bench.ground_truth_size must be at least 10000");
  for (const auto& n : noises) sinterbench::validate(n);
}

BenchPlan BenchPlan::quick() {
  BenchPlan p;
  p.mc_sizes = {256, 1152, 4096};
  p.dist_sizes = {4, 16, 32};
  p.repetitions = 2;
  p.ground_truth_size = 20000;
  return p;
}

std::string to_string(Method m) { return m == Method::mc ? "mc" : "distributional"; }

double measure_timer_resolution_ns() {
  double best = std::numeric_limits<double>::infinity();
  for (int probe = 0; probe < 200; ++probe) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::nano>(b - a).count());
  }
  return best;
}

BenchmarkReport run_benchmark(const BenchPlan& plan, const ControlConfig& cfg,
                              const PidGains& gains, const LumpedParams& plant,
                              const BenchProgress& progress) {
  plan.validate();
  cfg.validate();
  gains.validate();
  plant.validate();

  BenchmarkReport report;
  report.timer_resolution_ns = measure_timer_resolution_ns();

  for (const auto& noise : plan.noises) {
    const std::string kind = noise_kind(noise);
    const EmpiricalDistribution truth = ground_truth(cfg, gains, plant, noise,
                                                     plan.ground_truth_size, plan.seed,
                                                     plan.ground_truth_threads);
    {
      const auto half = truth.samples.size() / 2;
      EmpiricalDistribution a{{truth.samples.begin(), truth.samples.begin() + half}};
      EmpiricalDistribution b{{truth.samples.begin() + half, truth.samples.end()}};
      report.ground_truth_floor[kind] = wasserstein(1.0, a, b);
    }

    for (std::size_t n : plan.dist_sizes) {
      DistConfig dc;
      dc.size = n;
      dc.collect_iteration_stats = false;
      BenchmarkRecord rec;
      rec.method = Method::distributional;
      rec.size = n;
      rec.noise = kind;
      rec.seed = plan.seed;
      (void)run_distributional(dc, cfg, gains, plant, noise);
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        DistResult out;
        rec.runtime_ms.push_back(
            timed_ms([&] { out = run_distributional(dc, cfg, gains, plant, noise); }));
        rec.w1.push_back(wasserstein(1.0, out.e_ss, truth));
      }
      finalize(rec);
      if (progress) progress(rec);
      report.records.push_back(std::move(rec));
    }

    for (std::size_t m : plan.mc_sizes) {
      McConfig mc;
      mc.paths = m;
      mc.noise = noise;
      mc.collect_iteration_stats = false;
      mc.threads = plan.mc_threads;
      BenchmarkRecord rec;
      rec.method = Method::mc;
      rec.size = m;
      rec.noise = kind;
      rec.seed = plan.seed;
      mc.seed = mc_seed(plan.seed, m, -1);
      (void)run_ensemble(mc, cfg, gains, plant);
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        mc.seed = mc_seed(plan.seed, m, rep);
        EnsembleResult out;
        rec.runtime_ms.push_back(timed_ms([&] { out = run_ensemble(mc, cfg, gains, plant); }));
        rec.w1.push_back(wasserstein(1.0, out.e_ss, truth));
      }
      finalize(rec);
      if (progress) progress(rec);
      report.records.push_back(std::move(rec));
    }
  }

  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& r : report.records) {
    for (double t : r.runtime_ms) smallest = std::min(smallest, t);
  }
  if (report.timer_resolution_ns * 1e-6 > 0.01 * smallest) {
    std::ostringstream msg;
    msg << "timer resolution " << report.timer_resolution_ns
        << " ns is coarser than 1% of the shortest run (" << smallest << " ms)";
    report.warnings.push_back(msg.str());
  }
  return report;
}

std::vector<SpeedupReport> speedup_at_matched_accuracy(
    const std::vector<BenchmarkRecord>& records, const std::map<std::string, double>& tolerance) {
  std::vector<std::string> noises;
  for (const auto& r : records) {
    if (std::find(noises.begin(), noises.end(), r.noise) == noises.end()) noises.push_back(r.noise);
  }

  std::vector<SpeedupReport> out;
  for (const auto& noise : noises) {
    std::vector<const BenchmarkRecord*> dist, mc;
    for (const auto& r : records) {
      if (r.noise != noise) continue;
      (r.method == Method::mc ? mc : dist).push_back(&r);
    }
    SpeedupReport rep;
    rep.noise = noise;
    if (dist.empty() || mc.empty()) {
      out.push_back(rep);
      continue;
    }
    const auto* best = *std::min_element(dist.begin(), dist.end(), [](auto* l, auto* r) {
      return l->w1_mean < r->w1_mean;
    });
    const auto tol_it = tolerance.find(noise);
    const double tol = tol_it == tolerance.end() ? 0.0 : tol_it->second;
    const BenchmarkRecord* chosen = best;
    for (const auto* r : dist) {
      const double band = std::max(best->w1_std + r->w1_std, tol);
      if (r->w1_mean <= best->w1_mean + band && r->runtime_ms_mean < chosen->runtime_ms_mean) {
        chosen = r;
      }
    }
    std::sort(mc.begin(), mc.end(), [](auto* l, auto* r) { return l->size < r->size; });
    const BenchmarkRecord* match = nullptr;
    for (const auto* r : mc) {
      if (r->w1_mean <= chosen->w1_mean) {
        match = r;
        break;
      }
    }
    rep.matched = match != nullptr;
    if (!match) match = mc.back();
    rep.mc_size = match->size;
    rep.dist_size = chosen->size;
    rep.mc_runtime_ms = match->runtime_ms_mean;
    rep.dist_runtime_ms = chosen->runtime_ms_mean;
    rep.mc_w1 = match->w1_mean;
    rep.dist_w1 = chosen->w1_mean;
    rep.ratio = chosen->runtime_ms_mean > 0 ? match->runtime_ms_mean / chosen->runtime_ms_mean
                                            : std::numeric_limits<double>::infinity();
    out.push_back(rep);
  }
  return out;
}

}  // namespace sinterbench
