#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sinterbench/thermal.hpp"

namespace sinterbench {

struct PidGains {
  double kp = 0.1;
  double ki = 0.05;
  double kd = 5e-5;

  void validate() const;
  auto operator<=>(const PidGains&) const = default;
};

struct PidState {
  double integral = 0.0;  // degC s
  double prev_error = 0.0;
  bool initialized = false;
};

struct ControlConfig {
  double setpoint = 167.5;  // degC
  int n_iters = 200;
  double dt = 1.0;  // s per control iteration
  double p_min = 0.0;
  double p_max = 5.0;
  double initial_temperature = 165.0;

  void validate() const;
};

struct PidOutput {
  double power;
  PidState state;
};

/// Discrete PID with output clamping. The derivative is zero on the first
/// call, and the integral used for this output excludes the current error.
/// While the output is clamped, error that would push it further into
/// saturation is not integrated.
inline PidOutput pid_step(const PidGains& gains, const PidState& st, double error, double dt,
                          double p_min, double p_max) {
  const double derivative = st.initialized ? (error - st.prev_error) / dt : 0.0;
  const double raw = gains.kp * error + gains.ki * st.integral + gains.kd * derivative;
  const double power = raw < p_min ? p_min : (raw > p_max ? p_max : raw);
  const bool winding = (raw > p_max && error > 0.0) || (raw < p_min && error < 0.0);
  PidState next{winding ? st.integral : st.integral + error * dt, error, true};
  return {power, next};
}

struct TrajectoryRow {
  int iter;            // 1-based
  double error;        // setpoint - measured
  double power;        // W applied after this measurement
  double temperature;  // true spot temperature that was measured
};

using Trajectory = std::vector<TrajectoryRow>;

/// Noise-free closed loop on the lumped plant.
Trajectory run_nominal(const ControlConfig& cfg, const PidGains& gains,
                       const LumpedParams& plant);

/// Noise-free closed loop on the explicit grid plant. The beam is parked at
/// `center`; each control period is covered by ceil(cfg.dt / spec.dt) grid
/// steps.
Trajectory run_nominal_grid(const ControlConfig& cfg, const PidGains& gains,
                            const GridSpec& spec, const MaterialParams& material,
                            const Point3& center);

/// Error at the final control iteration.
double steady_state_error(const Trajectory& trajectory);

/// Grid element with the smallest |steady-state error|; ties go to the
/// lexicographically smallest (kp, ki, kd).
PidGains tune_nominal(const ControlConfig& cfg, const LumpedParams& plant,
                      std::span<const PidGains> grid);

}  // namespace sinterbench
