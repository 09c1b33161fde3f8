#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

namespace sinterbench {

using Point3 = std::array<double, 3>;

/// Powder material and beam constants. Defaults are typical for PA12 nylon.
struct MaterialParams {
  double density = 950.0;            // kg/m^3
  double specific_heat = 1200.0;     // J/(kg K)
  double conductivity = 0.12;        // W/(m K)
  double absorptivity = 0.95;        // (0, 1]
  double beam_radius = 200e-6;       // m
  double penetration_depth = 100e-6; // m

  void validate() const;
};

/// Regular grid for the explicit heat-conduction scheme. Every face cell is
/// held at `boundary_temperature`.
struct GridSpec {
  std::size_t nx = 20, ny = 20, nz = 10;
  double dx = 50e-6, dy = 50e-6, dz = 50e-6;
  double dt = 1e-3;
  double boundary_temperature = 165.0;

  std::size_t cell_count() const { return nx * ny * nz; }
  /// Largest dt for which the explicit scheme is stable with `material`.
  double max_stable_dt(const MaterialParams& material) const;
  void validate(const MaterialParams& material) const;
};

struct GridState {
  std::vector<double> temps;  // x fastest, then y, then z
  long long steps = 0;

  static GridState uniform(const GridSpec& spec, double temperature);
  double& at(const GridSpec& spec, std::size_t i, std::size_t j, std::size_t k) {
    return temps[(k * spec.ny + j) * spec.nx + i];
  }
  double at(const GridSpec& spec, std::size_t i, std::size_t j, std::size_t k) const {
    return temps[(k * spec.ny + j) * spec.nx + i];
  }
};

/// Single-node energy balance of the laser spot. Ambient is the preheated
/// powder bed, so the spot rests at `ambient` with the laser off.
struct LumpedParams {
  double heat_capacity = 15.0;  // J/degC
  double loss_coeff = 0.8;      // W/degC
  double ambient = 165.0;       // degC
  double absorptivity = 1.0;

  void validate() const;
  /// Laser power that holds the spot at `temperature`.
  double equilibrium_power(double temperature) const {
    return loss_coeff * (temperature - ambient) / absorptivity;
  }
};

struct LumpedState {
  double spot_temperature = 165.0;  // degC
  long long steps = 0;
};

using ThermalState = std::variant<GridState, LumpedState>;

/// Gaussian volumetric heat source of a beam of power `power` centred at
/// `center`, evaluated at `point` (W/m^3).
double heat_source(const MaterialParams& material, double power, const Point3& point,
                   const Point3& center);

/// One explicit finite-difference step of rho c dT/dt = div(k grad T) + Q.
/// Interior cells are updated in parallel; the result is bit-identical to
/// step_grid_serial.
GridState step_grid(const GridState& state, const GridSpec& spec,
                    const MaterialParams& material, double power, const Point3& center);

/// Serial reference for step_grid.
GridState step_grid_serial(const GridState& state, const GridSpec& spec,
                           const MaterialParams& material, double power,
                           const Point3& center);

/// T' = T + dt/C (A P - h (T - T_amb)).
LumpedState step_lumped(const LumpedState& state, const LumpedParams& params, double power,
                        double dt);

/// Temperature fed to the camera model. For a grid, the cell containing
/// `center`; throws std::invalid_argument when the center lies outside.
double spot_temperature(const ThermalState& state, const GridSpec& spec, const Point3& center);
double spot_temperature(const LumpedState& state);

/// Centre of cell (i, j, k) in metres.
Point3 cell_center(const GridSpec& spec, std::size_t i, std::size_t j, std::size_t k);

}  // namespace sinterbench
