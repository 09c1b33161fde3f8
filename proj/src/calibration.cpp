#include "sinterbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sinterbench/errors.hpp"
#include "sinterbench/measurement.hpp"
#include "sinterbench/parallel.hpp"

namespace sinterbench {

namespace {

constexpr double kCelsiusOffset = 273.15;

constexpr std::array<CalibParam, kCalibParamCount> kOrder{
    CalibParam::B,
    CalibParam::R,
    CalibParam::F,
    CalibParam::J1,
    CalibParam::J0,
    CalibParam::optics_transmittance,
    CalibParam::optics_temp,
    CalibParam::transmittance,
    CalibParam::reflected_temp,
    CalibParam::emissivity,
    CalibParam::atmosphere_temp,
};

[[noreturn]] void domain_error(const std::string& what, double value) {
  std::ostringstream msg;
  msg << "calibrate: " << what << " is out of domain (" << value << ")";
  throw NumericError(msg.str());
}

double checked_ratio(double num, double den, const char* what) {
  if (den == 0.0 || std::isnan(den)) domain_error(std::string(what) + " denominator", den);
  return num / den;
}

struct Sample {
  double value;
  bool valid;
};

Sample try_calibrate(double raw, const CalibrationParams& p) {
  try {
    return {calibrate(raw, p), true};
  } catch (const NumericError&) {
    return {0.0, false};
  }
}

double draw(const Interval& iv, Substream& stream) {
  if (iv.lo == iv.hi) return iv.lo;
  return std::uniform_real_distribution<double>(iv.lo, iv.hi)(stream);
}

CalibrationParams sample_params(const CalibrationUncertainty& u, const CalibrationParams& base,
                                Substream stream) {
  CalibrationParams p = base;
  for (CalibParam which : kOrder) {
    param_ref(p, which) = draw(u.intervals[static_cast<std::size_t>(which)], stream);
  }
  return p;
}

CalibrationResult finish_mc(std::vector<Sample>&& samples) {
  CalibrationResult result;
  result.evaluated = samples.size();
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.valid) {
      values.push_back(s.value);
    } else {
      ++result.invalid;
    }
  }
  if (static_cast<double>(result.invalid) > 1e-3 * static_cast<double>(result.evaluated) ||
      values.empty()) {
    std::ostringstream msg;
    msg << "calibration: " << result.invalid << " of " << result.evaluated
        << " parameter vectors fell outside the conversion's domain";
    throw NumericError(msg.str());
  }
  result.distribution = EmpiricalDistribution{std::move(values)};
  return result;
}

CalibrationResult run_mixture(double raw, const CalibrationUncertainty& u, std::size_t n,
                              const CalibrationParams& base) {
  if (n == 0) throw ConfigError("calibration mixture size must be at least 1");
  CalibrationParams start = u.nominal();
  start.subtract_273 = base.subtract_273;
  std::vector<CalibrationParams> particles{start};
  std::vector<double> weights{1.0};
  CalibrationResult result;

  for (std::size_t step = 0; step < kOrder.size(); ++step) {
    const CalibParam which = kOrder[step];
    const Interval iv = u.intervals[static_cast<std::size_t>(which)];
    const DiracMixture atoms = iv.lo == iv.hi
                                   ? DiracMixture::dirac(iv.lo)
                                   : quantize(UniformNoise{iv.lo, iv.hi}, n);
    struct Candidate {
      CalibrationParams params;
      double weight;
      double key;
    };
    std::vector<Candidate> product;
    product.reserve(particles.size() * atoms.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
      for (const auto& a : atoms.points()) {
        CalibrationParams p = particles[i];
        param_ref(p, which) = a.x;
        ++result.evaluated;
        // Parameters not yet visited sit at their nominal values, so the key
        // is the temperature this partial assignment implies.
        const Sample s = try_calibrate(raw, p);
        if (!s.valid) {
          ++result.invalid;
          continue;
        }
        product.push_back({p, weights[i] * a.w, s.value});
      }
    }
    if (product.empty()) throw NumericError("calibration: every parameter vector was invalid");
    std::stable_sort(product.begin(), product.end(),
                     [](const Candidate& l, const Candidate& r) { return l.key < r.key; });

    if (step + 1 == kOrder.size()) {
      std::vector<Atom> out;
      out.reserve(product.size());
      for (const auto& c : product) out.push_back({c.key, c.weight});
      result.distribution = DiracMixture::from_points(std::move(out)).merged();
      break;
    }
    if (product.size() <= n) {
      particles.clear();
      weights.clear();
      for (const auto& c : product) {
        particles.push_back(c.params);
        weights.push_back(c.weight);
      }
      continue;
    }
    std::vector<double> w(product.size());
    for (std::size_t q = 0; q < product.size(); ++q) w[q] = product[q].weight;
    std::vector<std::array<double, kCalibParamCount>> sums(n);
    std::vector<double> mass(n, 0.0);
    for (auto& s : sums) s.fill(0.0);
    equal_weight_groups(w, n, [&](std::size_t g, std::size_t q, double share) {
      mass[g] += share;
      CalibrationParams& p = product[q].params;
      for (std::size_t c = 0; c < kCalibParamCount; ++c) {
        sums[g][c] += share * param_ref(p, static_cast<CalibParam>(c));
      }
    });
    particles.assign(n, start);
    weights = mass;
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t c = 0; c < kCalibParamCount; ++c) {
        param_ref(particles[g], static_cast<CalibParam>(c)) = sums[g][c] / mass[g];
      }
    }
  }
  if (static_cast<double>(result.invalid) > 1e-3 * static_cast<double>(result.evaluated)) {
    std::ostringstream msg;
    msg << "calibration: " << result.invalid << " of " << result.evaluated
        << " parameter combinations fell outside the conversion's domain";
    throw NumericError(msg.str());
  }
  return result;
}

}  // namespace

void CalibrationParams::validate() const {
  if (!(B > 0) || !(R > 0) || !(J1 > 0)) throw ConfigError("calibration: B, R, J1 must be > 0");
  for (double v : {emissivity, transmittance, optics_transmittance}) {
    if (!(v > 0 && v <= 1)) {
      throw ConfigError("calibration: emissivity and transmittances must lie in (0, 1]");
    }
  }
}

double& param_ref(CalibrationParams& p, CalibParam which) {
  switch (which) {
    case CalibParam::B: return p.B;
    case CalibParam::R: return p.R;
    case CalibParam::F: return p.F;
    case CalibParam::J1: return p.J1;
    case CalibParam::J0: return p.J0;
    case CalibParam::optics_transmittance: return p.optics_transmittance;
    case CalibParam::optics_temp: return p.optics_temp;
    case CalibParam::transmittance: return p.transmittance;
    case CalibParam::reflected_temp: return p.reflected_temp;
    case CalibParam::emissivity: return p.emissivity;
    case CalibParam::atmosphere_temp: return p.atmosphere_temp;
  }
  return p.B;
}

std::string param_name(CalibParam which) {
  switch (which) {
    case CalibParam::B: return "B";
    case CalibParam::R: return "R";
    case CalibParam::F: return "F";
    case CalibParam::J1: return "J1";
    case CalibParam::J0: return "J0";
    case CalibParam::optics_transmittance: return "tau_E";
    case CalibParam::optics_temp: return "T_E";
    case CalibParam::transmittance: return "tau";
    case CalibParam::reflected_temp: return "T_refl";
    case CalibParam::emissivity: return "epsilon";
    case CalibParam::atmosphere_temp: return "T_Atm";
  }
  return "?";
}

CalibrationUncertainty CalibrationUncertainty::defaults() {
  CalibrationUncertainty u;
  auto set = [&](CalibParam which, double centre, double lo_off, double hi_off) {
    u.intervals[static_cast<std::size_t>(which)] = {centre - lo_off, centre + hi_off};
  };
  set(CalibParam::B, 1428.0, 0.05, 0.05);
  set(CalibParam::R, 16556.0, 0.05, 0.05);
  set(CalibParam::F, 1.0, 0.05, 0.05);
  set(CalibParam::J1, 22.5916, 0.00005, 0.00005);
  set(CalibParam::J0, 89.796, 0.0005, 0.0005);
  set(CalibParam::optics_transmittance, 1.0, 0.05, 0.05);
  set(CalibParam::optics_temp, 20.0, 0.05, 0.05);
  set(CalibParam::transmittance, 1.0, 0.05, 0.05);
  set(CalibParam::reflected_temp, 0.0, 0.05, 0.05);
  set(CalibParam::emissivity, 1.0, 0.05, 0.05);
  set(CalibParam::atmosphere_temp, 295.0, 0.005, 0.005);
  return u;
}

CalibrationUncertainty CalibrationUncertainty::collapsed(const CalibrationParams& p) {
  CalibrationUncertainty u;
  CalibrationParams copy = p;
  for (CalibParam which : kOrder) {
    const double v = param_ref(copy, which);
    u.intervals[static_cast<std::size_t>(which)] = {v, v};
  }
  return u;
}

CalibrationUncertainty CalibrationUncertainty::scaled(double factor) const {
  CalibrationUncertainty u = *this;
  for (auto& iv : u.intervals) {
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double half = 0.5 * (iv.hi - iv.lo) * factor;
    iv = {mid - half, mid + half};
  }
  return u;
}

CalibrationParams CalibrationUncertainty::nominal() const {
  CalibrationParams p;
  for (CalibParam which : kOrder) {
    const auto& iv = intervals[static_cast<std::size_t>(which)];
    param_ref(p, which) = 0.5 * (iv.lo + iv.hi);
  }
  p.distance = 0.5 * (distance.lo + distance.hi);
  p.humidity = 0.5 * (humidity.lo + humidity.hi);
  p.atmosphere_temp_c = 0.5 * (atmosphere_temp_c.lo + atmosphere_temp_c.hi);
  return p;
}

void CalibrationUncertainty::validate() const {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
      throw ConfigError("calibration interval for " + param_name(static_cast<CalibParam>(i)) +
                        " must satisfy lo <= hi");
    }
  }
}

double calibrate(double raw, const CalibrationParams& p) {
  const double eps = p.emissivity;
  const double tau = p.transmittance;
  const double tau_e = p.optics_transmittance;
  const double refl_k = p.reflected_temp + kCelsiusOffset;
  const double optics_k = p.optics_temp + kCelsiusOffset;

  const double reflected =
      checked_ratio((1.0 - eps) * p.R, eps * std::exp(p.B / refl_k) - p.F, "reflected term");
  const double atmosphere = checked_ratio(
      (1.0 - tau) * p.R, eps * tau * (std::exp(p.B / p.atmosphere_temp) - p.F), "atmosphere term");
  const double optics = checked_ratio((1.0 - tau_e) * p.R,
                                      eps * tau * tau_e * (std::exp(p.B / optics_k) - p.F),
                                      "external optics term");
  const double object =
      checked_ratio(raw - p.J0, p.J1 * tau * eps * tau_e, "object signal");
  const double bracket = reflected + atmosphere + optics;
  const double signal = object - bracket;
  // A signal lost in the rounding of its two parts is treated as zero.
  const double floor = 1e-12 * std::max(std::abs(object), std::abs(bracket));
  if (!(signal > floor)) domain_error("corrected object signal", signal);
  const double log_arg = p.F + p.R / signal;
  if (!(log_arg > 0)) domain_error("logarithm argument", log_arg);
  const double log_value = std::log(log_arg);
  const double kelvin = checked_ratio(p.B, log_value, "logarithm");
  const double out = p.subtract_273 ? kelvin - kCelsiusOffset : kelvin;
  if (!std::isfinite(out)) domain_error("calibrated temperature", out);
  return out;
}

CalibrationResult calibrate_distribution(double raw, const CalibrationUncertainty& u,
                                         const CalibEngine& engine,
                                         const CalibrationParams& base) {
  u.validate();
  if (const auto* mix = std::get_if<CalibMixture>(&engine)) {
    return run_mixture(raw, u, mix->size, base);
  }
  const auto& mc = std::get<CalibMc>(engine);
  if (mc.samples == 0) throw ConfigError("calibration sample count must be at least 1");
  std::vector<Sample> samples(mc.samples);
  const auto count = static_cast<long long>(mc.samples);
#pragma omp parallel for schedule(static) num_threads(resolve_workers(mc.threads))
  for (long long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    samples[idx] = try_calibrate(
        raw, sample_params(u, base, Substream::derive(mc.seed, idx, SeedDomain::calibration)));
  }
  return finish_mc(std::move(samples));
}

CalibrationResult calibrate_distribution_serial(double raw, const CalibrationUncertainty& u,
                                                const CalibMc& engine,
                                                const CalibrationParams& base) {
  u.validate();
  std::vector<Sample> samples;
  samples.reserve(engine.samples);
  for (std::size_t i = 0; i < engine.samples; ++i) {
    samples.push_back(try_calibrate(
        raw, sample_params(u, base, Substream::derive(engine.seed, i, SeedDomain::calibration))));
  }
  return finish_mc(std::move(samples));
}

}  // namespace sinterbench
