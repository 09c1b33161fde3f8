#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <variant>

namespace sinterbench {

struct GaussianNoise {
  double mu = 0.0;
  double sigma = 0.5;  // standard deviation, degC
};

struct UniformNoise {
  double a = -1.5;
  double b = 1.5;
};

struct NoNoise {};

/// Additive measurement uncertainty on the camera temperature.
using NoiseModel = std::variant<NoNoise, GaussianNoise, UniformNoise>;

/// Parses `none`, `gaussian:mu,sigma` or `uniform:a,b`. Throws ConfigError.
NoiseModel parse_noise(std::string_view text);
std::string to_string(const NoiseModel& model);
/// Short tag used in output files: none, gaussian or uniform.
std::string noise_kind(const NoiseModel& model);
void validate(const NoiseModel& model);

/// Seed domains keep substreams used for different purposes disjoint.
enum class SeedDomain : std::uint64_t {
  simulation = 0x51u,
  ground_truth = 0x6714u,
  calibration = 0xca11bu,
  pilot = 0x9117u,
};

/// Counter-based generator: output k of a stream is a keyed mix of k, so a
/// stream is fully determined by its key and needs no shared state.
/// Satisfies UniformRandomBitGenerator.
class Substream {
 public:
  using result_type = std::uint64_t;

  constexpr Substream() = default;
  constexpr explicit Substream(std::uint64_t key) : key_(key) {}

  /// Independent stream for one path of one run.
  static Substream derive(std::uint64_t seed, std::uint64_t index,
                          SeedDomain domain = SeedDomain::simulation);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    // splitmix64 finaliser over a Weyl sequence offset by the key.
    std::uint64_t z = key_ + 0x9e3779b97f4a7c15ull * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Stateful sampler bound to one noise model and one substream.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseModel& model, Substream stream);
  double operator()();

 private:
  NoiseModel model_;
  Substream stream_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// One draw of the measurement error. NoNoise yields 0.
double sample(const NoiseModel& model, Substream& stream);

/// Measured temperature: T_true + epsilon.
inline double measure(double true_temperature, double epsilon) {
  return true_temperature + epsilon;
}

}  // namespace sinterbench
