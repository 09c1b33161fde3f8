#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sinterbench/errors.hpp"
#include "sinterbench/mc_engine.hpp"

using namespace sinterbench;

namespace {

const ControlConfig kCfg;
const PidGains kGains;
const LumpedParams kPlant;

McConfig mc_config(std::size_t paths, NoiseModel noise, std::uint64_t seed = 1) {
  McConfig mc;
  mc.paths = paths;
  mc.noise = noise;
  mc.seed = seed;
  return mc;
}

double sample_std(const std::vector<double>& xs) {
  const auto m = oracle::population_moments(xs);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(m.var * n / (n - 1.0));
}

}  // namespace

TEST(RunPath, NoNoiseEqualsNominal) {
  const auto path = run_path(kCfg, kGains, kPlant, NoNoise{}, Substream(5));
  const auto nominal = run_nominal(kCfg, kGains, kPlant);
  for (std::size_t t = 0; t < nominal.size(); ++t) {
    EXPECT_EQ(path.error[t], nominal[t].error);
    EXPECT_EQ(path.power[t], nominal[t].power);
    EXPECT_EQ(path.temperature[t], nominal[t].temperature);
  }
}

TEST(RunPath, SameStreamSameTrajectory) {
  const auto a = run_path(kCfg, kGains, kPlant, GaussianNoise{}, Substream::derive(3, 4));
  const auto b = run_path(kCfg, kGains, kPlant, GaussianNoise{}, Substream::derive(3, 4));
  EXPECT_EQ(a.error, b.error);
  EXPECT_EQ(a.power, b.power);
}

TEST(Ensemble, SinglePathIsRunPath) {
  const auto mc = mc_config(1, GaussianNoise{}, 7);
  const auto e = run_ensemble(mc, kCfg, kGains, kPlant);
  const auto p = run_path(kCfg, kGains, kPlant, GaussianNoise{}, Substream::derive(7, 0));
  ASSERT_EQ(e.e_ss.samples.size(), 1u);
  EXPECT_EQ(e.e_ss.samples[0], p.error.back());
  EXPECT_EQ(e.iterations.back().error.mean, p.error.back());
}

TEST(Ensemble, GaussianEnvelope) {
  const auto e = run_ensemble(mc_config(10000, GaussianNoise{}), kCfg, kGains, kPlant);
  std::size_t inside = 0;
  for (double x : e.e_ss.samples) inside += (x > -2.5 && x < 2.5) ? 1 : 0;
  EXPECT_GE(static_cast<double>(inside) / 10000.0, 0.99);
}

TEST(Ensemble, SteadyStateSpread) {
  const auto g = run_ensemble(mc_config(100000, GaussianNoise{}), kCfg, kGains, kPlant);
  const auto u = run_ensemble(mc_config(100000, UniformNoise{}), kCfg, kGains, kPlant);
  const double sg = sample_std(g.e_ss.samples), su = sample_std(u.e_ss.samples);
  EXPECT_GE(sg, 0.4);
  EXPECT_LE(sg, 0.6);
  EXPECT_GE(su, 0.8);
  EXPECT_LE(su, 1.0);
}

TEST(Ensemble, IndependentOfWorkerCount) {
  auto mc = mc_config(3000, UniformNoise{}, 11);
  mc.record_iters = {1, 50};
  mc.threads = 1;
  const auto one = run_ensemble(mc, kCfg, kGains, kPlant);
  mc.threads = 3;
  const auto three = run_ensemble(mc, kCfg, kGains, kPlant);
  EXPECT_EQ(one.e_ss.samples, three.e_ss.samples);
  ASSERT_EQ(one.iterations.size(), three.iterations.size());
  for (std::size_t i = 0; i < one.iterations.size(); ++i) {
    EXPECT_EQ(one.iterations[i].error.mean, three.iterations[i].error.mean);
    EXPECT_EQ(one.iterations[i].error.std, three.iterations[i].error.std);
    EXPECT_EQ(one.iterations[i].power.kurtosis, three.iterations[i].power.kurtosis);
    EXPECT_EQ(one.iterations[i].error.ci_lo, three.iterations[i].error.ci_lo);
  }
}

TEST(Ensemble, SerialReferenceAgrees) {
  auto mc = mc_config(1500, GaussianNoise{}, 2);
  mc.record_iters = {10, 100};
  const auto par = run_ensemble(mc, kCfg, kGains, kPlant);
  const auto ser = run_ensemble_serial(mc, kCfg, kGains, kPlant);
  ASSERT_EQ(par.error_samples.size(), ser.error_samples.size());
  for (std::size_t r = 0; r < par.error_samples.size(); ++r) {
    EXPECT_EQ(par.error_samples[r].samples, ser.error_samples[r].samples);
    EXPECT_EQ(par.power_samples[r].samples, ser.power_samples[r].samples);
  }
  for (std::size_t i = 0; i < par.iterations.size(); ++i) {
    EXPECT_NEAR(par.iterations[i].error.mean, ser.iterations[i].error.mean, 1e-12);
    EXPECT_NEAR(par.iterations[i].error.std, ser.iterations[i].error.std, 1e-12);
  }
}

TEST(Ensemble, StreamingMomentsMatchRetainedSamples) {
  auto mc = mc_config(20000, UniformNoise{}, 3);
  mc.record_iters = {5, 60, 150};
  const auto e = run_ensemble(mc, kCfg, kGains, kPlant);
  for (std::size_t r = 0; r < e.record_iters.size(); ++r) {
    const int iter = e.record_iters[r];
    const auto& it = e.iterations[static_cast<std::size_t>(iter - 1)];
    ASSERT_EQ(it.iter, iter);
    for (int signal = 0; signal < 2; ++signal) {
      const auto& xs = (signal == 0 ? e.error_samples : e.power_samples)[r].samples;
      const auto& s = signal == 0 ? it.error : it.power;
      const auto o = oracle::population_moments(xs);
      const double n = static_cast<double>(xs.size());
      EXPECT_NEAR(s.mean, o.mean, 1e-9 * std::max(1.0, std::abs(o.mean)));
      EXPECT_NEAR(s.std, std::sqrt(o.var * n / (n - 1.0)), 1e-9 * std::sqrt(o.var));
      EXPECT_NEAR(s.skewness, o.skew, 1e-7);
      EXPECT_NEAR(s.kurtosis, o.kurt, 1e-7);
    }
  }
}

TEST(Ensemble, MemoryBudgetEnforced) {
  auto mc = mc_config(100000, GaussianNoise{});
  mc.record_iters = {10, 20, 30, 40, 50};
  mc.memory_budget_bytes = 1 << 20;
  EXPECT_THROW(run_ensemble(mc, kCfg, kGains, kPlant), ResourceError);
}

TEST(Ensemble, RecordItersValidated) {
  auto mc = mc_config(10, GaussianNoise{});
  mc.record_iters = {0};
  EXPECT_THROW(run_ensemble(mc, kCfg, kGains, kPlant), ConfigError);
}

TEST(GroundTruth, HalvesAgree) {
  const auto gt = ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 200000, 0);
  const auto half = gt.samples.size() / 2;
  const std::vector<double> a(gt.samples.begin(), gt.samples.begin() + static_cast<long>(half));
  const std::vector<double> b(gt.samples.begin() + static_cast<long>(half), gt.samples.end());
  // Two independent n-samples of N(0, s^2) sit at expected W1 distance
  // s sqrt(2/pi) sqrt(2/n) int sqrt(Phi (1 - Phi)) dz.
  double integral = 0.0;
  for (double z = -8.0; z < 8.0; z += 1e-3) {
    const double phi = 0.5 * std::erfc(-(z + 5e-4) / std::sqrt(2.0));
    integral += std::sqrt(phi * (1.0 - phi)) * 1e-3;
  }
  const double sd = std::sqrt(oracle::population_moments(gt.samples).var);
  const double expected = sd * std::sqrt(2.0 / M_PI) * std::sqrt(2.0 / static_cast<double>(half)) * integral;
  EXPECT_LT(oracle::w1_sorted_pairs(a, b), 2.5 * expected);
  const double nominal = run_nominal(kCfg, kGains, kPlant).back().error;
  EXPECT_NEAR(oracle::population_moments(gt.samples).mean, nominal, 0.01);
}

TEST(GroundTruth, NoNoiseIsNominal) {
  const auto gt = ground_truth(kCfg, kGains, kPlant, NoNoise{}, 10000, 0);
  const double nominal = run_nominal(kCfg, kGains, kPlant).back().error;
  for (double x : gt.samples) ASSERT_EQ(x, nominal);
}

TEST(GroundTruth, DisjointFromSimulationStreams) {
  auto mc = mc_config(10000, GaussianNoise{}, 0);
  const auto sim = run_ensemble(mc, kCfg, kGains, kPlant);
  const auto gt = ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 10000, 0);
  EXPECT_NE(sim.e_ss.samples, gt.samples);
  EXPECT_THROW(ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 9999, 0), std::invalid_argument);
}

TEST(Ensemble, AccuracyImprovesWithPaths) {
  const auto gt = ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 100000, 0);
  double small = 0, large = 0;
  for (std::uint64_t rep = 0; rep < 6; ++rep) {
    auto mc = mc_config(256, GaussianNoise{}, 100 + rep);
    mc.collect_iteration_stats = false;
    small += wasserstein(1.0, run_ensemble(mc, kCfg, kGains, kPlant).e_ss, gt);
    mc.paths = 8192;
    large += wasserstein(1.0, run_ensemble(mc, kCfg, kGains, kPlant).e_ss, gt);
  }
  EXPECT_GT(small, large);
}
