#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sinterbench/dist_engine.hpp"
#include "sinterbench/errors.hpp"
#include "sinterbench/mc_engine.hpp"

using namespace sinterbench;

namespace {

const ControlConfig kCfg;
const PidGains kGains;
const LumpedParams kPlant;

std::vector<int> all_iters(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

DistResult run(std::size_t n, const NoiseModel& noise, std::vector<int> record = {}) {
  DistConfig dc;
  dc.size = n;
  dc.record_iters = std::move(record);
  return run_distributional(dc, kCfg, kGains, kPlant, noise);
}

}  // namespace

TEST(Distributional, NoNoiseFollowsNominal) {
  const auto nominal = run_nominal(kCfg, kGains, kPlant);
  for (std::size_t n : {1u, 8u, 32u}) {
    const auto r = run(n, NoNoise{}, all_iters(kCfg.n_iters));
    ASSERT_EQ(r.error_mixtures.size(), nominal.size());
    for (std::size_t t = 0; t < nominal.size(); ++t) {
      ASSERT_EQ(r.error_mixtures[t].size(), 1u);
      EXPECT_EQ(r.error_mixtures[t].points()[0].x, nominal[t].error);
      EXPECT_EQ(r.power_mixtures[t].points()[0].x, nominal[t].power);
    }
  }
}

TEST(Distributional, SingleAtomFollowsMedianOffset) {
  const GaussianNoise noise{0.3, 0.5};
  const auto r = run(1, noise, all_iters(kCfg.n_iters));
  LumpedState thermal{kCfg.initial_temperature, 0};
  PidState pid;
  for (int t = 0; t < kCfg.n_iters; ++t) {
    const double error = kCfg.setpoint - measure(thermal.spot_temperature, 0.3);
    const auto step = pid_step(kGains, pid, error, kCfg.dt, kCfg.p_min, kCfg.p_max);
    pid = step.state;
    thermal = step_lumped(thermal, kPlant, step.power, kCfg.dt);
    const auto& m = r.error_mixtures[static_cast<std::size_t>(t)];
    ASSERT_EQ(m.size(), 1u);
    EXPECT_NEAR(m.points()[0].x, error, 1e-12);
  }
}

TEST(Distributional, Deterministic) {
  const auto a = run(16, UniformNoise{});
  const auto b = run(16, UniformNoise{});
  ASSERT_EQ(a.e_ss.size(), b.e_ss.size());
  for (std::size_t i = 0; i < a.e_ss.size(); ++i) {
    EXPECT_EQ(a.e_ss.points()[i].x, b.e_ss.points()[i].x);
    EXPECT_EQ(a.e_ss.points()[i].w, b.e_ss.points()[i].w);
  }
}

TEST(Distributional, WeightsConserved) {
  const auto r = run(24, GaussianNoise{}, all_iters(kCfg.n_iters));
  for (const auto& m : r.error_mixtures) EXPECT_NEAR(m.total_weight(), 1.0, 1e-12);
  for (const auto& m : r.power_mixtures) EXPECT_NEAR(m.total_weight(), 1.0, 1e-12);
}

TEST(Distributional, PairCountIsQuadraticInSize) {
  for (std::size_t n : {4u, 16u, 32u}) {
    const auto r = run(n, GaussianNoise{});
    const auto iters = static_cast<std::size_t>(kCfg.n_iters);
    EXPECT_EQ(r.pair_evaluations, n + (iters - 1) * n * n);
  }
}

TEST(Distributional, ExpansionBudget) {
  DistConfig dc;
  dc.size = 4096;
  dc.expansion_budget = 1 << 20;
  EXPECT_THROW(run_distributional(dc, kCfg, kGains, kPlant, GaussianNoise{}), ResourceError);
}

TEST(Distributional, MeanWithinMonteCarloError) {
  for (const NoiseModel& noise : {NoiseModel{GaussianNoise{}}, NoiseModel{UniformNoise{}}}) {
    McConfig mc;
    mc.paths = 100000;
    mc.noise = noise;
    mc.seed = 17;
    const auto ens = run_ensemble(mc, kCfg, kGains, kPlant);
    const auto dist = run(32, noise);
    for (std::size_t t = 0; t < ens.iterations.size(); ++t) {
      const auto& m = ens.iterations[t].error;
      const double se = m.std / std::sqrt(static_cast<double>(mc.paths));
      EXPECT_LE(std::abs(dist.iterations[t].error.mean - m.mean), 3.0 * se + 1e-12)
          << noise_kind(noise) << " iteration " << t + 1;
    }
  }
}

TEST(Distributional, AccuracyAgainstGroundTruth) {
  const auto gt = ground_truth(kCfg, kGains, kPlant, GaussianNoise{}, 200000, 0);
  const double w32 = wasserstein(1.0, run(32, GaussianNoise{}).e_ss, gt);
  const double w4 = wasserstein(1.0, run(4, GaussianNoise{}).e_ss, gt);
  EXPECT_LE(w32, 0.02);
  EXPECT_LE(w32, w4);
}

TEST(Distributional, MedianOfSymmetricRunIsNominal) {
  const auto r = run(1, UniformNoise{});
  EXPECT_EQ(r.e_ss.points()[0].x, run_nominal(kCfg, kGains, kPlant).back().error);
}
