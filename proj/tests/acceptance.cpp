// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sinterbench/benchmark.hpp"
#include "sinterbench/calibration.hpp"
#include "sinterbench/dist_engine.hpp"
#include "sinterbench/mc_engine.hpp"

using namespace sinterbench;
using Clock = std::chrono::steady_clock;

namespace {

const ControlConfig kCfg;
const PidGains kGains;
const LumpedParams kPlant;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double sample_std(const std::vector<double>& xs) {
  const auto m = oracle::population_moments(xs);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(m.var * n / (n - 1.0));
}

const BenchmarkRecord& cell(const BenchmarkReport& r, Method m, std::size_t size,
                            const std::string& noise) {
  for (const auto& rec : r.records) {
    if (rec.method == m && rec.size == size && rec.noise == noise) return rec;
  }
  throw std::runtime_error("missing benchmark cell");
}

Verdict a1() {
  Verdict v;
  Trajectory traj;
  std::vector<double> ms;
  for (int i = 0; i < 21; ++i) {
    const auto t0 = Clock::now();
    traj = run_nominal(kCfg, kGains, kPlant);
    ms.push_back(seconds_since(t0) * 1e3);
  }
  std::sort(ms.begin(), ms.end());
  int settled = -1;
  for (auto it = traj.rbegin(); it != traj.rend() && std::abs(it->error) < 0.05; ++it) {
    settled = it->iter;
  }
  v.check(settled > 0 && settled <= 170, fmt("|e|<0.05 from iteration %.0f on", settled));
  v.check(traj.back().power >= 1.8 && traj.back().power <= 2.3,
          fmt("steady power %.4f W", traj.back().power));
  v.check(ms[ms.size() / 2] < 10.0, fmt("runtime %.3f ms", ms[ms.size() / 2]));
  return v;
}

Verdict a2() {
  Verdict v;
  const auto t0 = Clock::now();
  for (const NoiseModel& noise : {NoiseModel{GaussianNoise{}}, NoiseModel{UniformNoise{}}}) {
    McConfig mc;
    mc.paths = 100000;
    mc.noise = noise;
    mc.seed = 2024;
    mc.collect_iteration_stats = false;
    const auto e = run_ensemble(mc, kCfg, kGains, kPlant);
    const double sd = sample_std(e.e_ss.samples);
    const double skew = oracle::population_moments(e.e_ss.samples).skew;
    const bool gaussian = std::holds_alternative<GaussianNoise>(noise);
    const double lo = gaussian ? 0.40 : 0.80, hi = gaussian ? 0.60 : 1.00;
    v.check(sd >= lo && sd <= hi, noise_kind(noise) + fmt(" std %.4f", sd));
    v.check(std::abs(skew) <= 0.05, noise_kind(noise) + fmt(" skew %.4f", skew));
  }
  const double secs = seconds_since(t0);
  v.check(secs < 60.0, fmt("runtime %.1f s", secs));
  return v;
}

Verdict a3() {
  Verdict v;
  McConfig mc;
  mc.paths = 10000;
  mc.noise = GaussianNoise{};
  mc.seed = 99;
  mc.collect_iteration_stats = false;
  const auto e = run_ensemble(mc, kCfg, kGains, kPlant);
  double inside = 0;
  for (double x : e.e_ss.samples) inside += (x > -2.5 && x < 2.5) ? 1.0 : 0.0;
  const double frac = inside / static_cast<double>(e.e_ss.samples.size());
  v.check(frac >= 0.99, fmt("%.4f of samples in (-2.5, 2.5)", frac));
  return v;
}

Verdict a4(const BenchmarkReport& r) {
  Verdict v;
  for (const char* noise : {"gaussian", "uniform"}) {
    const double w256 = cell(r, Method::mc, 256, noise).w1_mean;
    const double w2048 = cell(r, Method::mc, 2048, noise).w1_mean;
    const double w4096 = cell(r, Method::mc, 4096, noise).w1_mean;
    const double w32000 = cell(r, Method::mc, 32000, noise).w1_mean;
    v.check(w256 > w4096 && w4096 > w32000,
            std::string(noise) + fmt(" W1 %.5f > %.5f > %.5f", w256, w4096, w32000));
    const double r1 = w256 / w4096, r2 = w2048 / w32000;
    v.check(r1 >= 2.5 && r1 <= 6.5 && r2 >= 2.5 && r2 <= 6.5,
            std::string(noise) + fmt(" 16x ratios %.2f, %.2f", r1, r2));
  }
  return v;
}

Verdict a5(const BenchmarkReport& r) {
  Verdict v;
  for (const auto& s : speedup_at_matched_accuracy(r.records, r.ground_truth_floor)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %.1fx (MC %zu vs N=%zu%s)", s.noise.c_str(), s.ratio,
                  s.mc_size, s.dist_size, s.matched ? "" : ", not matched");
    v.check(s.matched && s.ratio >= 5.0, buf);
  }
  DistConfig dc;
  dc.size = 32;
  dc.collect_iteration_stats = false;
  std::vector<double> ms;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = Clock::now();
    (void)run_distributional(dc, kCfg, kGains, kPlant, GaussianNoise{});
    ms.push_back(seconds_since(t0) * 1e3);
  }
  const double worst = *std::max_element(ms.begin(), ms.end());
  v.check(worst < 250.0, fmt("N=32 run %.1f ms", worst));
  return v;
}

Verdict a6(const BenchmarkReport& r) {
  Verdict v;
  for (const NoiseModel& noise : {NoiseModel{GaussianNoise{}}, NoiseModel{UniformNoise{}}}) {
    const std::string kind = noise_kind(noise);
    const double dist = cell(r, Method::distributional, 32, kind).w1_mean;
    const double mc = cell(r, Method::mc, 1152, kind).w1_mean;
    v.check(dist <= mc, kind + fmt(" W1 N=32 %.5f vs MC 1152 %.5f", dist, mc));

    McConfig mcfg;
    mcfg.paths = 100000;
    mcfg.noise = noise;
    mcfg.seed = 31;
    const auto ens = run_ensemble(mcfg, kCfg, kGains, kPlant);
    DistConfig dc;
    dc.size = 32;
    dc.record_iters = {50, 100, 200};
    const auto d = run_distributional(dc, kCfg, kGains, kPlant, noise);
    for (std::size_t i = 0; i < d.record_iters.size(); ++i) {
      const int iter = d.record_iters[i];
      const auto& s = ens.iterations[static_cast<std::size_t>(iter - 1)].error;
      const double se = s.std / std::sqrt(static_cast<double>(mcfg.paths));
      const double gap = std::abs(d.error_mixtures[i].mean() - s.mean);
      v.check(gap <= 3.0 * se, kind + fmt(" iter %.0f mean gap %.2f SE", iter, gap / se));
    }
  }
  return v;
}

// Unimodal up to sampling noise: walking outwards from the tallest bin, no
// bin rises above the lowest one seen so far by more than 3 count SDs.
bool unimodal(const std::vector<double>& counts) {
  const auto peak = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  auto walk = [&](int step) {
    double low = counts[peak];
    for (auto i = static_cast<long>(peak) + step; i >= 0 && i < static_cast<long>(counts.size());
         i += step) {
      const double c = counts[static_cast<std::size_t>(i)];
      if (c > low + 3.0 * std::sqrt(std::max(low, 1.0))) return false;
      low = std::min(low, c);
    }
    return true;
  };
  return walk(-1) && walk(1);
}

Verdict a7() {
  Verdict v;
  const double point = calibrate(59000, CalibrationParams{});
  v.check(point >= 442.29 && point <= 443.29, fmt("point %.4f", point));
  const auto r = calibrate_distribution(59000, CalibrationUncertainty::defaults(),
                                        CalibMc{100000, 7, 0});
  const auto& xs = std::get<EmpiricalDistribution>(r.distribution).samples;
  double inside = 0;
  for (double x : xs) inside += (x >= 400 && x <= 480) ? 1.0 : 0.0;
  const double frac = inside / static_cast<double>(xs.size());
  v.check(frac >= 0.99, fmt("%.4f of mass in [400, 480]", frac));
  const int bins = 40;
  std::vector<double> counts(bins, 0.0);
  for (double x : xs) {
    const int b = static_cast<int>(std::floor((x - 400.0) / 80.0 * bins));
    if (b >= 0 && b < bins) counts[static_cast<std::size_t>(b)] += 1.0;
  }
  v.check(unimodal(counts), "histogram unimodal");
  return v;
}

Verdict a8() {
  Verdict v;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> x(0.0, 2.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  auto mixture = [&](std::size_t n) {
    std::vector<Atom> atoms(n);
    for (auto& a : atoms) a = {x(rng), w(rng)};
    return DiracMixture::from_points(atoms);
  };

  double axiom_gap = 0, mean_gap = 0, weight_gap = 0;
  for (int t = 0; t < 300; ++t) {
    const auto a = mixture(1 + static_cast<std::size_t>(t % 19));
    const auto b = mixture(1 + static_cast<std::size_t>(t % 23));
    const auto c = mixture(1 + static_cast<std::size_t>(t % 7));
    axiom_gap = std::max(axiom_gap, wasserstein(1.0, a, a));
    axiom_gap = std::max(axiom_gap, std::abs(wasserstein(1.0, a, b) - wasserstein(1.0, b, a)));
    axiom_gap = std::max(axiom_gap, wasserstein(1.0, a, b) - wasserstein(1.0, a, c) -
                                        wasserstein(1.0, c, b));
    const auto m = mixture(200);
    for (std::size_t n : {1u, 4u, 32u}) {
      const auto k = compress(m, n);
      mean_gap = std::max(mean_gap, std::abs(k.mean() - m.mean()));
      weight_gap = std::max(weight_gap, std::abs(k.total_weight() - 1.0));
    }
  }
  v.check(axiom_gap <= 1e-12, fmt("metric axioms within %.1e", axiom_gap));
  v.check(mean_gap <= 1e-12, fmt("compress mean within %.1e", mean_gap));

  DistConfig dc;
  dc.size = 32;
  dc.record_iters = {1, 50, 100, 150};
  const auto d1 = run_distributional(dc, kCfg, kGains, kPlant, UniformNoise{});
  for (const auto& m : d1.error_mixtures) weight_gap = std::max(weight_gap, std::abs(m.total_weight() - 1.0));
  v.check(weight_gap <= 1e-12, fmt("weights conserved within %.1e", weight_gap));

  double q_gap = 0;
  for (std::size_t n : {1u, 2u, 7u, 32u, 128u}) {
    const auto q = quantize(GaussianNoise{0.0, 0.5}, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      q_gap = std::max(q_gap, std::abs(q.points()[i].x - 0.5 * oracle::inverse_normal(u)));
    }
  }
  v.check(q_gap <= 1e-9, fmt("quantize midpoints within %.1e", q_gap));

  bool reproducible = true;
  McConfig mc;
  mc.paths = 2000;
  mc.seed = 4;
  mc.threads = 1;
  const auto e1 = run_ensemble(mc, kCfg, kGains, kPlant);
  mc.threads = 4;
  const auto e2 = run_ensemble(mc, kCfg, kGains, kPlant);
  reproducible &= e1.e_ss.samples == e2.e_ss.samples;
  reproducible &= e1.iterations.back().error.std == e2.iterations.back().error.std;
  const auto d2 = run_distributional(dc, kCfg, kGains, kPlant, UniformNoise{});
  for (std::size_t i = 0; i < d1.e_ss.size(); ++i) {
    reproducible &= d1.e_ss.points()[i].x == d2.e_ss.points()[i].x;
  }
  const auto u = CalibrationUncertainty::defaults();
  reproducible &= std::get<EmpiricalDistribution>(calibrate_distribution(59000, u, CalibMc{3000, 5, 1}).distribution).samples ==
                  std::get<EmpiricalDistribution>(calibrate_distribution(59000, u, CalibMc{3000, 5, 3}).distribution).samples;
  reproducible &= ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 10000, 1).samples ==
                  ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 10000, 1, 2).samples;
  v.check(reproducible, "seed reproducibility of every engine");
  return v;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  int failures = 0;
  auto report = [&](const char* id, const char* title, const Verdict& v) {
    std::printf("%s %s  %s: %s\n", id, v.ok ? "PASS" : "FAIL", title, v.detail.c_str());
    std::fflush(stdout);
    failures += v.ok ? 0 : 1;
  };

  report("A1", "nominal convergence", a1());
  report("A2", "noise-to-error variance transfer", a2());
  report("A3", "error envelope", a3());

  BenchPlan plan;
  plan.repetitions = 10;
  plan.seed = 1;
  const auto bench = run_benchmark(plan, kCfg, kGains, kPlant);
  for (const auto& w : bench.warnings) std::printf("   note: %s\n", w.c_str());
  for (const auto& r : bench.records) {
    std::printf("   %-14s %6zu %-8s W1 %.5f +- %.5f  %9.3f +- %.3f ms\n",
                to_string(r.method).c_str(), r.size, r.noise.c_str(), r.w1_mean, r.w1_std,
                r.runtime_ms_mean, r.runtime_ms_std);
  }
  report("A4", "Monte Carlo convergence ladder", a4(bench));
  report("A5", "matched-accuracy speedup", a5(bench));
  report("A6", "distributional fidelity", a6(bench));
  report("A7", "calibration", a7());

  Verdict v8 = a8();
  const double total = seconds_since(start);
  v8.check(total < 300.0, fmt("acceptance suite %.1f s", total));
  report("A8", "property suites", v8);

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
