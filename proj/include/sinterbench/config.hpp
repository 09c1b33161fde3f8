#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sinterbench/benchmark.hpp"
#include "sinterbench/calibration.hpp"
#include "sinterbench/measurement.hpp"
#include "sinterbench/pid.hpp"
#include "sinterbench/thermal.hpp"

namespace sinterbench {

enum class ThermalMode { lumped, grid };
enum class EngineKind { mc, distributional };

struct RunConfig {
  ThermalMode thermal_mode = ThermalMode::lumped;
  LumpedParams lumped;
  MaterialParams material;
  GridSpec grid;
  PidGains gains;
  ControlConfig control;
  NoiseModel noise = GaussianNoise{};
  EngineKind engine = EngineKind::mc;
  std::size_t paths = 10000;
  std::size_t rep_size = 32;
  CalibrationParams calibration;
  CalibrationUncertainty calibration_uncertainty = CalibrationUncertainty::defaults();
  BenchPlan bench;
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  void validate() const;
};

/// Overlays the fields present in `j` onto `base`. Unknown or mistyped
/// fields raise ConfigError naming the field path, e.g. `control.n_iters`.
RunConfig parse_config(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
BenchPlan parse_plan(const nlohmann::json& j, BenchPlan base = {}, const std::string& path = "bench");

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const BenchPlan& plan);

/// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);
std::string config_hash(const RunConfig& cfg);

/// Reflected temperature of 20 degC in place of the 0 degC camera default.
void apply_sane_calibration_defaults(RunConfig& cfg);

}  // namespace sinterbench
