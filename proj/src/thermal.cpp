#include "sinterbench/thermal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sinterbench/errors.hpp"

namespace sinterbench {

namespace {

bool all_finite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Shared by the serial and parallel steps so both produce identical bits.
inline double updated_cell(const GridState& state, const GridSpec& spec,
                           const MaterialParams& material, double power, const Point3& center,
                           std::size_t i, std::size_t j, std::size_t k) {
  const double t = state.at(spec, i, j, k);
  const double lap_x =
      (state.at(spec, i + 1, j, k) - 2.0 * t + state.at(spec, i - 1, j, k)) / (spec.dx * spec.dx);
  const double lap_y =
      (state.at(spec, i, j + 1, k) - 2.0 * t + state.at(spec, i, j - 1, k)) / (spec.dy * spec.dy);
  const double lap_z =
      (state.at(spec, i, j, k + 1) - 2.0 * t + state.at(spec, i, j, k - 1)) / (spec.dz * spec.dz);
  const double q = power > 0.0 ? heat_source(material, power, cell_center(spec, i, j, k), center)
                               : 0.0;
  const double rho_c = material.density * material.specific_heat;
  return t + spec.dt / rho_c * (material.conductivity * (lap_x + lap_y + lap_z) + q);
}

bool is_boundary(const GridSpec& spec, std::size_t i, std::size_t j, std::size_t k) {
  return i == 0 || j == 0 || k == 0 || i + 1 == spec.nx || j + 1 == spec.ny || k + 1 == spec.nz;
}

void check_step_inputs(const GridState& state, const GridSpec& spec,
                       const MaterialParams& material, double power, const Point3& center) {
  spec.validate(material);
  if (state.temps.size() != spec.cell_count()) {
    throw std::invalid_argument("grid state size does not match grid spec");
  }
  if (!all_finite({power, center[0], center[1], center[2]}) || power < 0.0) {
    throw std::invalid_argument("laser power must be finite and non-negative");
  }
}

}  // namespace

void MaterialParams::validate() const {
  if (!all_finite({density, specific_heat, conductivity, absorptivity, beam_radius,
                   penetration_depth})) {
    throw ConfigError("material parameters must be finite");
  }
  if (density <= 0 || specific_heat <= 0 || conductivity <= 0 || absorptivity <= 0 ||
      beam_radius <= 0 || penetration_depth <= 0) {
    throw ConfigError("material parameters must be strictly positive");
  }
  if (absorptivity > 1.0) throw ConfigError("absorptivity must not exceed 1");
}

double GridSpec::max_stable_dt(const MaterialParams& material) const {
  const double diffusivity_inv = material.density * material.specific_heat /
                                 (2.0 * material.conductivity);
  return diffusivity_inv / (1.0 / (dx * dx) + 1.0 / (dy * dy) + 1.0 / (dz * dz));
}

void GridSpec::validate(const MaterialParams& material) const {
  material.validate();
  if (nx < 3 || ny < 3 || nz < 3) throw ConfigError("grid needs at least 3 cells per axis");
  if (!(dx > 0 && dy > 0 && dz > 0 && dt > 0)) {
    throw ConfigError("grid cell sizes and dt must be positive");
  }
  const double limit = max_stable_dt(material);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "grid dt " << dt << " s violates the explicit stability bound; admissible dt <= "
        << limit << " s";
    throw ConfigError(msg.str());
  }
}

GridState GridState::uniform(const GridSpec& spec, double temperature) {
  return GridState{std::vector<double>(spec.cell_count(), temperature), 0};
}

void LumpedParams::validate() const {
  if (!all_finite({heat_capacity, loss_coeff, ambient, absorptivity})) {
    throw ConfigError("lumped plant parameters must be finite");
  }
  if (heat_capacity <= 0 || loss_coeff <= 0) {
    throw ConfigError("lumped heat capacity and loss coefficient must be positive");
  }
  if (absorptivity <= 0 || absorptivity > 1) throw ConfigError("absorptivity must be in (0, 1]");
}

Point3 cell_center(const GridSpec& spec, std::size_t i, std::size_t j, std::size_t k) {
  return {(static_cast<double>(i) + 0.5) * spec.dx, (static_cast<double>(j) + 0.5) * spec.dy,
          (static_cast<double>(k) + 0.5) * spec.dz};
}

double heat_source(const MaterialParams& material, double power, const Point3& point,
                   const Point3& center) {
  if (!all_finite({power, point[0], point[1], point[2], center[0], center[1], center[2]})) {
    throw std::invalid_argument("heat_source: non-finite input");
  }
  if (power < 0.0) throw std::invalid_argument("heat_source: negative laser power");
  const double w2 = material.beam_radius * material.beam_radius;
  const double d2 = material.penetration_depth * material.penetration_depth;
  const double dx = point[0] - center[0];
  const double dy = point[1] - center[1];
  const double dz = point[2] - center[2];
  const double peak = 2.0 * material.absorptivity * power /
                      (std::numbers::pi * w2 * material.penetration_depth);
  return peak * std::exp(-2.0 * ((dx * dx + dy * dy) / w2 + dz * dz / d2));
}

GridState step_grid_serial(const GridState& state, const GridSpec& spec,
                           const MaterialParams& material, double power, const Point3& center) {
  check_step_inputs(state, spec, material, power, center);
  GridState next = state;
  for (std::size_t k = 0; k < spec.nz; ++k) {
    for (std::size_t j = 0; j < spec.ny; ++j) {
      for (std::size_t i = 0; i < spec.nx; ++i) {
        next.at(spec, i, j, k) = is_boundary(spec, i, j, k)
                                     ? spec.boundary_temperature
                                     : updated_cell(state, spec, material, power, center, i, j, k);
      }
    }
  }
  next.steps = state.steps + 1;
  return next;
}

GridState step_grid(const GridState& state, const GridSpec& spec, const MaterialParams& material,
                    double power, const Point3& center) {
  check_step_inputs(state, spec, material, power, center);
  GridState next = state;
  const auto nz = static_cast<long long>(spec.nz);
#pragma omp parallel for schedule(static)
  for (long long kk = 0; kk < nz; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    for (std::size_t j = 0; j < spec.ny; ++j) {
      for (std::size_t i = 0; i < spec.nx; ++i) {
        next.at(spec, i, j, k) = is_boundary(spec, i, j, k)
                                     ? spec.boundary_temperature
                                     : updated_cell(state, spec, material, power, center, i, j, k);
      }
    }
  }
  next.steps = state.steps + 1;
  return next;
}

LumpedState step_lumped(const LumpedState& state, const LumpedParams& params, double power,
                        double dt) {
  if (!(dt > 0)) throw std::invalid_argument("step_lumped: dt must be positive");
  const double t = state.spot_temperature;
  const double next =
      t + dt / params.heat_capacity *
              (params.absorptivity * power - params.loss_coeff * (t - params.ambient));
  if (!std::isfinite(next)) throw NumericError("step_lumped: non-finite spot temperature");
  if (next < params.ambient - 50.0) {
    throw NumericError("step_lumped: spot temperature fell more than 50 degC below ambient");
  }
  return LumpedState{next, state.steps + 1};
}

double spot_temperature(const LumpedState& state) { return state.spot_temperature; }

double spot_temperature(const ThermalState& state, const GridSpec& spec, const Point3& center) {
  if (const auto* lumped = std::get_if<LumpedState>(&state)) return lumped->spot_temperature;
  const auto& grid = std::get<GridState>(state);
  const std::array<double, 3> size{spec.dx, spec.dy, spec.dz};
  const std::array<std::size_t, 3> count{spec.nx, spec.ny, spec.nz};
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double cell = std::floor(center[a] / size[a]);
    if (!std::isfinite(cell) || cell < 0 || cell >= static_cast<double>(count[a])) {
      throw std::invalid_argument("spot_temperature: beam center lies outside the grid");
    }
    idx[a] = static_cast<std::size_t>(cell);
  }
  return grid.at(spec, idx[0], idx[1], idx[2]);
}

}  // namespace sinterbench
