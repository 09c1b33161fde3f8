#include "sinterbench/pid.hpp"

#include <cmath>
#include <stdexcept>

#include "sinterbench/errors.hpp"
#include "sinterbench/measurement.hpp"

namespace sinterbench {

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
    throw ConfigError("PID gains must be finite");
  }
  if (kp < 0 || ki < 0 || kd < 0) throw ConfigError("PID gains must be non-negative");
}

void ControlConfig::validate() const {
  if (n_iters < 1) throw ConfigError("control.n_iters must be at least 1");
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("control.dt must be positive");
  if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_min < p_max)) {
    throw ConfigError("control.p_min must be below control.p_max");
  }
  if (!std::isfinite(setpoint) || !std::isfinite(initial_temperature)) {
    throw ConfigError("control.setpoint and initial temperature must be finite");
  }
}

Trajectory run_nominal(const ControlConfig& cfg, const PidGains& gains,
                       const LumpedParams& plant) {
  cfg.validate();
  gains.validate();
  plant.validate();
  Trajectory out;
  out.reserve(static_cast<std::size_t>(cfg.n_iters));
  LumpedState thermal{cfg.initial_temperature, 0};
  PidState pid;
  for (int t = 1; t <= cfg.n_iters; ++t) {
    const double temperature = thermal.spot_temperature;
    const double error = cfg.setpoint - measure(temperature, 0.0);
    const auto [power, next] = pid_step(gains, pid, error, cfg.dt, cfg.p_min, cfg.p_max);
    pid = next;
    thermal = step_lumped(thermal, plant, power, cfg.dt);
    out.push_back({t, error, power, temperature});
  }
  return out;
}

Trajectory run_nominal_grid(const ControlConfig& cfg, const PidGains& gains,
                            const GridSpec& spec, const MaterialParams& material,
                            const Point3& center) {
  cfg.validate();
  gains.validate();
  spec.validate(material);
  const auto substeps = static_cast<int>(std::ceil(cfg.dt / spec.dt - 1e-9));
  ThermalState state = GridState::uniform(spec, spec.boundary_temperature);
  PidState pid;
  Trajectory out;
  out.reserve(static_cast<std::size_t>(cfg.n_iters));
  for (int t = 1; t <= cfg.n_iters; ++t) {
    const double temperature = spot_temperature(state, spec, center);
    const double error = cfg.setpoint - temperature;
    const auto [power, next] = pid_step(gains, pid, error, cfg.dt, cfg.p_min, cfg.p_max);
    pid = next;
    auto& grid = std::get<GridState>(state);
    for (int s = 0; s < substeps; ++s) grid = step_grid(grid, spec, material, power, center);
    out.push_back({t, error, power, temperature});
  }
  return out;
}

double steady_state_error(const Trajectory& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  return trajectory.back().error;
}

PidGains tune_nominal(const ControlConfig& cfg, const LumpedParams& plant,
                      std::span<const PidGains> grid) {
  if (grid.empty()) throw std::invalid_argument("tune_nominal: empty gain grid");
  const PidGains* best = nullptr;
  double best_err = 0.0;
  for (const auto& candidate : grid) {
    const double err = std::abs(steady_state_error(run_nominal(cfg, candidate, plant)));
    if (!std::isfinite(err)) continue;
    if (best == nullptr || err < best_err || (err == best_err && candidate < *best)) {
      best = &candidate;
      best_err = err;
    }
  }
  if (best == nullptr) throw NumericError("tune_nominal: no gain set produced a finite error");
  return *best;
}

}  // namespace sinterbench
