#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sinterbench/distribution.hpp"

namespace sinterbench {

/// Camera constants and scene parameters of the radiometric conversion.
///
/// `reflected_temp` and `optics_temp` follow the camera metadata convention
/// and are given in degC; `atmosphere_temp` is in K. `distance`, `humidity`
/// and `atmosphere_temp_c` are carried for completeness and do not enter the
/// conversion.
struct CalibrationParams {
  double R = 16556.0;
  double B = 1428.0;
  double F = 1.0;
  double J0 = 89.796;
  double J1 = 22.5916;
  double emissivity = 1.0;
  double transmittance = 1.0;         // tau
  double optics_transmittance = 1.0;  // tau_E
  double reflected_temp = 0.0;        // degC
  double atmosphere_temp = 295.0;     // K
  double optics_temp = 20.0;          // degC
  double distance = 16556.0;
  double humidity = 0.0;
  double atmosphere_temp_c = 21.85;
  /// When false, the result is the absolute radiometric temperature, i.e.
  /// without the trailing -273.15.
  bool subtract_273 = true;

  void validate() const;
};

/// Parameters that enter the conversion, in propagation order.
enum class CalibParam : std::size_t {
  B,
  R,
  F,
  J1,
  J0,
  optics_transmittance,
  optics_temp,
  transmittance,
  reflected_temp,
  emissivity,
  atmosphere_temp,
};
inline constexpr std::size_t kCalibParamCount = 11;

struct Interval {
  double lo;
  double hi;
};

/// Uniform intervals per parameter. Defaults are the camera's implied
/// significant-digit ranges around the nominal values.
struct CalibrationUncertainty {
  std::array<Interval, kCalibParamCount> intervals{};
  /// Ranges of the carried parameters (distance, humidity, atmosphere degC),
  /// kept for reporting only.
  Interval distance{16556.0 - 0.05, 16556.0 + 0.05};
  Interval humidity{0.0 - 0.05 / 100, 0.0 + 0.5 / 100};
  Interval atmosphere_temp_c{21.85 - 0.005, 21.85 + 0.005};

  static CalibrationUncertainty defaults();
  /// Degenerate intervals at the given parameters.
  static CalibrationUncertainty collapsed(const CalibrationParams& p);
  /// Intervals scaled about their midpoints.
  CalibrationUncertainty scaled(double factor) const;
  /// Midpoint parameters.
  CalibrationParams nominal() const;
  void validate() const;
};

double& param_ref(CalibrationParams& p, CalibParam which);
std::string param_name(CalibParam which);

/// Raw counts to temperature. Throws NumericError naming the failing
/// subterm when the logarithm or a denominator leaves its domain.
double calibrate(double raw, const CalibrationParams& p);

struct CalibMc {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct CalibMixture {
  std::size_t size = 64;
};

using CalibEngine = std::variant<CalibMc, CalibMixture>;

struct CalibrationResult {
  std::variant<EmpiricalDistribution, DiracMixture> distribution;
  std::size_t invalid = 0;    // parameter vectors rejected by calibrate
  std::size_t evaluated = 0;  // parameter vectors tried
};

/// Propagates independent uniform parameter uncertainty through calibrate.
/// Fails with NumericError when more than 0.1% of vectors are invalid.
CalibrationResult calibrate_distribution(double raw, const CalibrationUncertainty& u,
                                         const CalibEngine& engine,
                                         const CalibrationParams& base = {});

/// Serial reference for the Monte Carlo engine.
CalibrationResult calibrate_distribution_serial(double raw, const CalibrationUncertainty& u,
                                                const CalibMc& engine,
                                                const CalibrationParams& base = {});

}  // namespace sinterbench
