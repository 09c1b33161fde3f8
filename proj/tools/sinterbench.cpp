#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sinterbench/benchmark.hpp"
#include "sinterbench/calibration.hpp"
#include "sinterbench/config.hpp"
#include "sinterbench/dist_engine.hpp"
#include "sinterbench/errors.hpp"
#include "sinterbench/io.hpp"
#include "sinterbench/mc_engine.hpp"
#include "sinterbench/parallel.hpp"
#include "sinterbench/pid.hpp"

namespace fs = std::filesystem;
using namespace sinterbench;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kResource = 4 };

// Flags shared by every subcommand. Unset optionals leave the config value.
struct Common {
  std::string config_path;
  std::optional<std::string> noise;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration");
  cmd->add_option("--noise", c.noise, "none | gaussian:mu,sigma | uniform:a,b");
  cmd->add_option("--seed", c.seed, "Root seed");
  cmd->add_option("--iters", c.iters, "Control iterations");
  cmd->add_option("--out", c.out, "Output directory");
}

struct Loaded {
  RunConfig cfg;
  bool noise_given = false;
};

Loaded load(const Common& c) {
  Loaded l;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot open config file " + c.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(c.config_path + ": invalid JSON: " + e.what());
    }
    l.cfg = parse_config(j);
    l.noise_given = j.is_object() && j.contains("noise");
  }
  if (c.noise) {
    l.cfg.noise = parse_noise(*c.noise);
    l.noise_given = true;
  }
  if (c.seed) l.cfg.seed = *c.seed;
  if (c.iters) l.cfg.control.n_iters = *c.iters;
  if (c.out) l.cfg.out_dir = *c.out;
  return l;
}

std::vector<int> parse_iters(const std::string& text, int n_iters) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--record: expected comma-separated iterations, got '" + item + "'");
    }
  }
  for (int v : out) {
    if (v < 1 || v > n_iters) throw ConfigError("--record: iterations must lie in [1, n_iters]");
  }
  return out;
}

std::vector<double> parse_axis(const std::string& name, const std::string& values) {
  std::vector<double> out;
  std::stringstream ss(values);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--grid: bad value '" + item + "' for " + name);
    }
  }
  if (out.empty()) throw ConfigError("--grid: no values for " + name);
  return out;
}

// "kp=a,b;ki=c;kd=d"; axes left out keep the configured gain.
std::vector<PidGains> parse_gain_grid(const std::string& text, const PidGains& base) {
  std::vector<double> kp{base.kp}, ki{base.ki}, kd{base.kd};
  std::stringstream ss(text);
  std::string part;
  bool any = false;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("--grid: expected name=values, got '" + part + "'");
    const std::string name = part.substr(0, eq);
    auto values = parse_axis(name, part.substr(eq + 1));
    if (name == "kp") {
      kp = std::move(values);
    } else if (name == "ki") {
      ki = std::move(values);
    } else if (name == "kd") {
      kd = std::move(values);
    } else {
      throw ConfigError("--grid: unknown gain '" + name + "'");
    }
    any = true;
  }
  if (!any) throw ConfigError("--grid: empty gain grid");
  std::vector<PidGains> grid;
  for (double p : kp) {
    for (double i : ki) {
      for (double d : kd) grid.push_back({p, i, d});
    }
  }
  return grid;
}

void print_stats(const char* label, const SummaryStats& s) {
  std::printf("%s mean=%.6g std=%.6g skew=%.4g kurt=%.4g mode=%.6g ci95=[%.6g, %.6g]\n", label,
              s.mean, s.std, s.skewness, s.kurtosis, s.mode, s.ci_lo, s.ci_hi);
}

int cmd_sim(const Common& common) {
  auto [cfg, noise_given] = load(common);
  if (!noise_given) cfg.noise = NoNoise{};
  cfg.validate();
  const std::string hash = config_hash(cfg);
  Trajectory rows;
  if (cfg.thermal_mode == ThermalMode::grid) {
    if (!std::holds_alternative<NoNoise>(cfg.noise)) {
      throw ConfigError("noise: the grid plant supports noise-free runs only");
    }
    const Point3 center = cell_center(cfg.grid, cfg.grid.nx / 2, cfg.grid.ny / 2, 1);
    rows = run_nominal_grid(cfg.control, cfg.gains, cfg.grid, cfg.material, center);
  } else if (std::holds_alternative<NoNoise>(cfg.noise)) {
    rows = run_nominal(cfg.control, cfg.gains, cfg.lumped);
  } else {
    const auto path = run_path(cfg.control, cfg.gains, cfg.lumped, cfg.noise,
                               Substream::derive(cfg.seed, 0, SeedDomain::simulation));
    for (std::size_t t = 0; t < path.error.size(); ++t) {
      rows.push_back({static_cast<int>(t) + 1, path.error[t], path.power[t], path.temperature[t]});
    }
  }
  const fs::path file = fs::path(cfg.out_dir) / "trajectory.csv";
  write_trajectory_csv(file, rows, hash);
  std::printf("final error %.6g degC, power %.6g W -> %s\n", rows.back().error, rows.back().power,
              file.string().c_str());
  return kOk;
}

int cmd_mc(const Common& common, std::optional<std::size_t> paths, const std::string& record) {
  auto [cfg, noise_given] = load(common);
  (void)noise_given;
  cfg.engine = EngineKind::mc;
  if (paths) cfg.paths = *paths;
  cfg.validate();
  const std::string hash = config_hash(cfg);
  McConfig mc;
  mc.paths = cfg.paths;
  mc.noise = cfg.noise;
  mc.seed = cfg.seed;
  mc.record_iters = parse_iters(record, cfg.control.n_iters);
  const auto result = run_ensemble(mc, cfg.control, cfg.gains, cfg.lumped);
  const fs::path dir = cfg.out_dir;
  write_stats_csv(dir / "stats.csv", result.iterations, hash);
  write_samples_csv(dir / "samples.csv", result.record_iters, result.error_samples, hash);
  write_samples_csv(dir / "power_samples.csv", result.record_iters, result.power_samples, hash);
  print_stats("e_ss", stats(result.e_ss));
  std::printf("wrote %s\n", (dir / "stats.csv").string().c_str());
  return kOk;
}

int cmd_dist(const Common& common, std::optional<std::size_t> rep, const std::string& record) {
  auto [cfg, noise_given] = load(common);
  (void)noise_given;
  cfg.engine = EngineKind::distributional;
  if (rep) cfg.rep_size = *rep;
  cfg.validate();
  const std::string hash = config_hash(cfg);
  DistConfig dc;
  dc.size = cfg.rep_size;
  dc.record_iters = parse_iters(record, cfg.control.n_iters);
  const auto result = run_distributional(dc, cfg.control, cfg.gains, cfg.lumped, cfg.noise);
  const fs::path dir = cfg.out_dir;
  write_stats_csv(dir / "stats.csv", result.iterations, hash);
  write_mixtures_json(dir / "mixtures.json", result.record_iters, result.error_mixtures,
                      result.power_mixtures, hash);
  const auto s = stats(result.e_ss);
  print_stats("e_ss", s);
  std::printf("e_ss median %.6g\n", weighted_percentile(result.e_ss.points(), 0.5));
  std::printf("wrote %s\n", (dir / "mixtures.json").string().c_str());
  return kOk;
}

struct CalibFlags {
  double raw = 0;
  bool point = false;
  std::optional<std::size_t> mc;
  std::optional<std::size_t> mixture;
  bool sane = false;
  bool absolute = false;
};

int cmd_calib(const Common& common, const CalibFlags& f) {
  auto [cfg, noise_given] = load(common);
  (void)noise_given;
  if (f.sane) apply_sane_calibration_defaults(cfg);
  if (f.absolute) cfg.calibration.subtract_273 = false;
  cfg.validate();
  cfg.calibration.validate();
  const std::string hash = config_hash(cfg);
  const fs::path dir = cfg.out_dir;
  std::fprintf(stderr,
               "note: distance, humidity and atmosphere degC are carried but do not enter the "
               "conversion\n");

  const double nominal = calibrate(f.raw, cfg.calibration);
  nlohmann::json meta{{"config_hash", hash}, {"raw", f.raw}, {"nominal", nominal}};
  if (f.point || (!f.mc && !f.mixture)) {
    std::printf("calibrated temperature %.6f\n", nominal);
    write_json(dir / "calibration.json", meta);
    return kOk;
  }
  const CalibEngine engine = f.mc ? CalibEngine{CalibMc{*f.mc, cfg.seed, 0}}
                                  : CalibEngine{CalibMixture{*f.mixture}};
  const auto result =
      calibrate_distribution(f.raw, cfg.calibration_uncertainty, engine, cfg.calibration);
  meta["invalid"] = result.invalid;
  meta["evaluated"] = result.evaluated;
  SummaryStats s;
  double in_band = 0;
  if (const auto* emp = std::get_if<EmpiricalDistribution>(&result.distribution)) {
    s = stats(*emp);
    for (double v : emp->samples) in_band += (v >= 400 && v <= 480) ? 1.0 : 0.0;
    in_band /= static_cast<double>(emp->samples.size());
    write_samples_csv(dir / "calibration_samples.csv", std::vector<int>{0},
                      std::vector<EmpiricalDistribution>{*emp}, hash);
  } else {
    const auto& mix = std::get<DiracMixture>(result.distribution);
    s = stats(mix);
    for (const auto& a : mix.points()) in_band += (a.x >= 400 && a.x <= 480) ? a.w : 0.0;
    meta["mixture"] = mixture_json(mix);
  }
  meta["mass_400_480"] = in_band;
  meta["mean"] = s.mean;
  meta["std"] = s.std;
  write_json(dir / "calibration.json", meta);
  print_stats("calibrated", s);
  std::printf("mass in [400, 480]: %.4f  invalid vectors: %zu of %zu\n", in_band, result.invalid,
              result.evaluated);
  return kOk;
}

struct BenchFlags {
  std::string plan;
  std::optional<int> repetitions;
  bool quick = false;
  std::optional<int> mc_threads;
};

int cmd_bench(const Common& common, const BenchFlags& f) {
  auto [cfg, noise_given] = load(common);
  if (f.quick) cfg.bench = BenchPlan::quick();
  if (!f.plan.empty()) {
    std::ifstream in(f.plan);
    if (!in) throw ConfigError("cannot open plan file " + f.plan);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(f.plan + ": invalid JSON: " + e.what());
    }
    cfg.bench = parse_plan(j, cfg.bench, "plan");
  }
  if (noise_given) cfg.bench.noises = {cfg.noise};
  if (f.repetitions) cfg.bench.repetitions = *f.repetitions;
  if (f.mc_threads) cfg.bench.mc_threads = *f.mc_threads;
  if (common.seed) cfg.bench.seed = *common.seed;
  cfg.validate();
  cfg.bench.validate();
  const std::string hash = config_hash(cfg);
  const auto report = run_benchmark(cfg.bench, cfg.control, cfg.gains, cfg.lumped,
                                    [](const BenchmarkRecord& r) {
                                      std::printf("%-14s %6zu %-8s W1 %.5f +- %.5f  %9.3f +- %.3f ms\n",
                                                  to_string(r.method).c_str(), r.size,
                                                  r.noise.c_str(), r.w1_mean, r.w1_std,
                                                  r.runtime_ms_mean, r.runtime_ms_std);
                                      std::fflush(stdout);
                                    });
  const fs::path dir = cfg.out_dir;
  write_bench_csv(dir / "bench_results.csv", report.records, hash);
  const auto speedups = speedup_at_matched_accuracy(report.records, report.ground_truth_floor);
  nlohmann::json sp = nlohmann::json::array();
  for (const auto& s : speedups) {
    sp.push_back({{"noise", s.noise},
                  {"mc_size", s.mc_size},
                  {"dist_size", s.dist_size},
                  {"mc_runtime_ms", s.mc_runtime_ms},
                  {"dist_runtime_ms", s.dist_runtime_ms},
                  {"mc_w1", s.mc_w1},
                  {"dist_w1", s.dist_w1},
                  {"ratio", s.ratio},
                  {"matched", s.matched}});
    std::printf("speedup %-8s %.1fx (MC %zu vs N=%zu)%s\n", s.noise.c_str(), s.ratio, s.mc_size,
                s.dist_size, s.matched ? "" : " [not matched]");
  }
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  write_json(dir / "bench_metadata.json",
             {{"config_hash", hash},
              {"hardware", {{"hardware_concurrency", std::thread::hardware_concurrency()},
                            {"mc_threads", cfg.bench.mc_threads},
                            {"worker_count", worker_count()}}},
              {"timer", "steady_clock"},
              {"timer_resolution_ns", report.timer_resolution_ns},
              {"parallel_cells", false},
              {"ground_truth_floor", report.ground_truth_floor},
              {"plan", to_json(cfg.bench)},
              {"speedup", sp},
              {"warnings", report.warnings}});
  return kOk;
}

int cmd_tune(const Common& common, const std::string& grid_text) {
  auto [cfg, noise_given] = load(common);
  (void)noise_given;
  cfg.validate();
  const auto grid = parse_gain_grid(grid_text, cfg.gains);
  const PidGains best = tune_nominal(cfg.control, cfg.lumped, grid);
  const double e_ss = steady_state_error(run_nominal(cfg.control, best, cfg.lumped));
  cfg.gains = best;
  const fs::path file = fs::path(cfg.out_dir) / "best_gains.json";
  write_json(file, {{"config_hash", config_hash(cfg)},
                    {"kp", best.kp},
                    {"ki", best.ki},
                    {"kd", best.kd},
                    {"steady_state_error", e_ss},
                    {"candidates", grid.size()}});
  std::printf("best kp=%g ki=%g kd=%g  e_ss=%.6g\n", best.kp, best.ki, best.kd, e_ss);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop laser power control under measurement uncertainty"};
  app.require_subcommand(1);

  Common common;
  auto* sim = app.add_subcommand("sim", "Single closed-loop run");
  add_common(sim, common);

  std::optional<std::size_t> paths, rep;
  std::string record;
  auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble");
  add_common(mc, common);
  mc->add_option("--paths", paths, "Number of paths");
  mc->add_option("--record", record, "Comma-separated iterations whose samples are kept");

  auto* dist = app.add_subcommand("dist", "Single-pass distributional run");
  add_common(dist, common);
  dist->add_option("--rep", rep, "Representation size N");
  dist->add_option("--record", record, "Comma-separated iterations whose mixtures are kept");

  CalibFlags cf;
  auto* calib = app.add_subcommand("calib", "Radiometric calibration");
  add_common(calib, common);
  calib->add_option("--raw", cf.raw, "Raw camera counts")->required();
  auto* point = calib->add_flag("--point", cf.point, "Deterministic conversion at nominal values");
  auto* mc_opt = calib->add_option("--mc", cf.mc, "Monte Carlo propagation with M samples");
  auto* mix_opt = calib->add_option("--mixture", cf.mixture, "Mixture propagation of size N");
  point->excludes(mc_opt)->excludes(mix_opt);
  mc_opt->excludes(mix_opt);
  calib->add_flag("--sane-defaults", cf.sane, "Reflected temperature of 20 degC");
  calib->add_flag("--absolute", cf.absolute, "Omit the trailing -273.15");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Accuracy versus runtime benchmark");
  add_common(bench, common);
  bench->add_option("--plan", bf.plan, "JSON benchmark plan");
  bench->add_option("--repetitions", bf.repetitions, "Repetitions per cell");
  bench->add_flag("--quick", bf.quick, "Reduced ladders and ground truth");
  bench->add_option("--mc-threads", bf.mc_threads, "Workers per timed Monte Carlo run");

  std::string grid_text;
  auto* tune = app.add_subcommand("tune", "Grid search for the gains with least steady error");
  add_common(tune, common);
  tune->add_option("--grid", grid_text, "kp=a,b;ki=c;kd=d")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*sim) return cmd_sim(common);
    if (*mc) return cmd_mc(common, paths, record);
    if (*dist) return cmd_dist(common, rep, record);
    if (*calib) return cmd_calib(common, cf);
    if (*bench) return cmd_bench(common, bf);
    if (*tune) return cmd_tune(common, grid_text);
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return kResource;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
