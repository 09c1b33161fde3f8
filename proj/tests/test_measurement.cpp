#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sinterbench/errors.hpp"
#include "sinterbench/measurement.hpp"

using namespace sinterbench;

namespace {

std::vector<double> draws(const NoiseModel& model, std::size_t n, std::uint64_t seed) {
  NoiseSampler s(model, Substream::derive(seed, 0));
  std::vector<double> out(n);
  for (auto& x : out) x = s();
  return out;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(xs.size() - 1))};
}

}  // namespace

TEST(Noise, NoneIsZero) {
  Substream s(1);
  EXPECT_EQ(sample(NoNoise{}, s), 0.0);
}

TEST(Noise, UniformMoments) {
  const auto xs = draws(UniformNoise{}, 100000, 42);
  const auto [m, sd] = mean_std(xs);
  EXPECT_GE(m, -0.02);
  EXPECT_LE(m, 0.02);
  EXPECT_GE(sd, 0.85);
  EXPECT_LE(sd, 0.88);
  for (double x : xs) {
    ASSERT_GE(x, -1.5);
    ASSERT_LE(x, 1.5);
  }
}

TEST(Noise, GaussianStd) {
  const auto [m, sd] = mean_std(draws(GaussianNoise{}, 100000, 43));
  EXPECT_NEAR(m, 0.0, 0.01);
  EXPECT_GE(sd, 0.49);
  EXPECT_LE(sd, 0.51);
}

TEST(Noise, ReplayIsDeterministic) {
  EXPECT_EQ(draws(GaussianNoise{}, 1000, 9), draws(GaussianNoise{}, 1000, 9));
  EXPECT_NE(draws(GaussianNoise{}, 1000, 9), draws(GaussianNoise{}, 1000, 10));
}

TEST(Substream, DomainsAndIndicesDiffer) {
  auto a = Substream::derive(1, 0, SeedDomain::simulation);
  auto b = Substream::derive(1, 0, SeedDomain::ground_truth);
  auto c = Substream::derive(1, 1, SeedDomain::simulation);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
}

TEST(Measure, Additive) {
  EXPECT_EQ(measure(167.5, 0.0), 167.5);
  EXPECT_DOUBLE_EQ(measure(167.5, -1.2), 166.3);
  for (double shift : {-3.0, 0.5, 10.0}) {
    EXPECT_DOUBLE_EQ(measure(160.0 + shift, 0.7), measure(160.0, 0.7) + shift);
  }
}

TEST(ParseNoise, Forms) {
  EXPECT_TRUE(std::holds_alternative<NoNoise>(parse_noise("none")));
  const auto g = std::get<GaussianNoise>(parse_noise("gaussian:0,0.5"));
  EXPECT_EQ(g.sigma, 0.5);
  const auto u = std::get<UniformNoise>(parse_noise("uniform:-1.5,1.5"));
  EXPECT_EQ(u.a, -1.5);
  EXPECT_EQ(u.b, 1.5);
  EXPECT_EQ(to_string(parse_noise(to_string(UniformNoise{-1, 2}))), to_string(UniformNoise{-1, 2}));
}

TEST(ParseNoise, Rejects) {
  for (const char* bad : {"", "gauss:0,1", "gaussian:0", "gaussian:0,-1", "uniform:1,1",
                          "uniform:a,b", "gaussian:0,1,2", "gaussian:0,1x"}) {
    EXPECT_THROW(parse_noise(bad), ConfigError) << bad;
  }
}
