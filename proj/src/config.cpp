#include "sinterbench/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "sinterbench/errors.hpp"

namespace sinterbench {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects any it was not asked about.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }
  ~Fields() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown field");
    }
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(child(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  template <class Int>
  void integer(const char* key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned() || v->get<long long>() >= 0) {
          out = v->get<Int>();
          return;
        }
        throw ConfigError(child(key) + ": expected a non-negative integer");
      } else {
        out = v->get<Int>();
      }
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(child(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void noise(const char* key, NoiseModel& out) {
    std::string text;
    if (!find(key)) return;
    string(key, text);
    try {
      out = parse_noise(text);
    } catch (const ConfigError& e) {
      throw ConfigError(child(key) + ": " + e.what());
    }
  }
  void sizes(const char* key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(child(key) + ": expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number_integer() || e.get<long long>() < 0) {
          throw ConfigError(child(key) + "[" + std::to_string(i) + "]: expected a non-negative integer");
        }
        out.push_back(e.get<std::size_t>());
      }
    }
  }
  void interval(const char* key, Interval& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(child(key) + ": expected [lo, hi]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }
  const json* object(const char* key) { return find(key); }
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_lumped(const json& j, const std::string& path, LumpedParams& p) {
  Fields f(j, path);
  f.number("heat_capacity", p.heat_capacity);
  f.number("loss_coeff", p.loss_coeff);
  f.number("ambient", p.ambient);
  f.number("absorptivity", p.absorptivity);
}

void parse_material(const json& j, const std::string& path, MaterialParams& m) {
  Fields f(j, path);
  f.number("density", m.density);
  f.number("specific_heat", m.specific_heat);
  f.number("conductivity", m.conductivity);
  f.number("absorptivity", m.absorptivity);
  f.number("beam_radius", m.beam_radius);
  f.number("penetration_depth", m.penetration_depth);
}

void parse_grid(const json& j, const std::string& path, GridSpec& g) {
  Fields f(j, path);
  f.integer("nx", g.nx);
  f.integer("ny", g.ny);
  f.integer("nz", g.nz);
  f.number("dx", g.dx);
  f.number("dy", g.dy);
  f.number("dz", g.dz);
  f.number("dt", g.dt);
  f.number("boundary_temperature", g.boundary_temperature);
}

void parse_calibration(const json& j, const std::string& path, RunConfig& cfg) {
  Fields f(j, path);
  if (const json* p = f.object("params")) {
    Fields pf(*p, f.child("params"));
    auto& c = cfg.calibration;
    pf.number("R", c.R);
    pf.number("B", c.B);
    pf.number("F", c.F);
    pf.number("J0", c.J0);
    pf.number("J1", c.J1);
    pf.number("emissivity", c.emissivity);
    pf.number("transmittance", c.transmittance);
    pf.number("optics_transmittance", c.optics_transmittance);
    pf.number("reflected_temp", c.reflected_temp);
    pf.number("atmosphere_temp", c.atmosphere_temp);
    pf.number("optics_temp", c.optics_temp);
    pf.number("distance", c.distance);
    pf.number("humidity", c.humidity);
    pf.number("atmosphere_temp_c", c.atmosphere_temp_c);
    pf.boolean("subtract_273", c.subtract_273);
  }
  if (const json* iv = f.object("intervals")) {
    Fields inf(*iv, f.child("intervals"));
    auto& u = cfg.calibration_uncertainty;
    for (std::size_t i = 0; i < kCalibParamCount; ++i) {
      const std::string name = param_name(static_cast<CalibParam>(i));
      inf.interval(name.c_str(), u.intervals[i]);
    }
    inf.interval("d", u.distance);
    inf.interval("H", u.humidity);
    inf.interval("T_AtmC", u.atmosphere_temp_c);
  }
}

json params_json(const CalibrationParams& c) {
  return {{"R", c.R},
          {"B", c.B},
          {"F", c.F},
          {"J0", c.J0},
          {"J1", c.J1},
          {"emissivity", c.emissivity},
          {"transmittance", c.transmittance},
          {"optics_transmittance", c.optics_transmittance},
          {"reflected_temp", c.reflected_temp},
          {"atmosphere_temp", c.atmosphere_temp},
          {"optics_temp", c.optics_temp},
          {"distance", c.distance},
          {"humidity", c.humidity},
          {"atmosphere_temp_c", c.atmosphere_temp_c},
          {"subtract_273", c.subtract_273}};
}

}  // namespace

BenchPlan parse_plan(const json& j, BenchPlan plan, const std::string& path) {
  Fields f(j, path);
  if (const json* v = f.object("noises")) {
    if (!v->is_array()) throw ConfigError(f.child("noises") + ": expected an array of strings");
    plan.noises.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string where = f.child("noises") + "[" + std::to_string(i) + "]";
      if (!(*v)[i].is_string()) throw ConfigError(where + ": expected a string");
      try {
        plan.noises.push_back(parse_noise((*v)[i].get<std::string>()));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }
  f.sizes("mc_sizes", plan.mc_sizes);
  f.sizes("dist_sizes", plan.dist_sizes);
  f.integer("repetitions", plan.repetitions);
  f.integer("ground_truth_size", plan.ground_truth_size);
  f.integer("seed", plan.seed);
  f.integer("mc_threads", plan.mc_threads);
  f.integer("ground_truth_threads", plan.ground_truth_threads);
  return plan;
}

RunConfig parse_config(const json& j, RunConfig cfg) {
  Fields f(j, "");
  f.integer("seed", cfg.seed);
  f.string("out", cfg.out_dir);
  f.noise("noise", cfg.noise);
  if (const json* t = f.object("thermal")) {
    Fields tf(*t, "thermal");
    std::string mode = cfg.thermal_mode == ThermalMode::grid ? "grid" : "lumped";
    tf.string("mode", mode);
    if (mode == "lumped") {
      cfg.thermal_mode = ThermalMode::lumped;
    } else if (mode == "grid") {
      cfg.thermal_mode = ThermalMode::grid;
    } else {
      throw ConfigError("thermal.mode: expected \"lumped\" or \"grid\"");
    }
    if (const json* v = tf.object("lumped")) parse_lumped(*v, "thermal.lumped", cfg.lumped);
    if (const json* v = tf.object("material")) parse_material(*v, "thermal.material", cfg.material);
    if (const json* v = tf.object("grid")) parse_grid(*v, "thermal.grid", cfg.grid);
  }
  if (const json* c = f.object("control")) {
    Fields cf(*c, "control");
    cf.number("kp", cfg.gains.kp);
    cf.number("ki", cfg.gains.ki);
    cf.number("kd", cfg.gains.kd);
    cf.number("setpoint", cfg.control.setpoint);
    cf.integer("n_iters", cfg.control.n_iters);
    cf.number("dt", cfg.control.dt);
    cf.number("p_min", cfg.control.p_min);
    cf.number("p_max", cfg.control.p_max);
    cf.number("initial_temperature", cfg.control.initial_temperature);
  }
  if (const json* e = f.object("engine")) {
    Fields ef(*e, "engine");
    std::string kind = cfg.engine == EngineKind::mc ? "mc" : "distributional";
    ef.string("kind", kind);
    if (kind == "mc") {
      cfg.engine = EngineKind::mc;
    } else if (kind == "distributional") {
      cfg.engine = EngineKind::distributional;
    } else {
      throw ConfigError("engine.kind: expected \"mc\" or \"distributional\"");
    }
    ef.integer("paths", cfg.paths);
    ef.integer("size", cfg.rep_size);
  }
  if (const json* c = f.object("calibration")) parse_calibration(*c, "calibration", cfg);
  if (const json* b = f.object("bench")) cfg.bench = parse_plan(*b, cfg.bench, "bench");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(j, std::move(base));
}

void RunConfig::validate() const {
  auto scoped = [](const std::string& where, auto&& check) {
    try {
      check();
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  scoped("thermal.lumped", [&] { lumped.validate(); });
  if (thermal_mode == ThermalMode::grid) {
    scoped("thermal.material", [&] { material.validate(); });
    scoped("thermal.grid", [&] { grid.validate(material); });
  }
  gains.validate();
  control.validate();
  scoped("noise", [&] { sinterbench::validate(noise); });
  if (paths == 0) throw ConfigError("engine.paths: must be at least 1");
  if (rep_size == 0) throw ConfigError("engine.size: must be at least 1");
  scoped("calibration.intervals", [&] { calibration_uncertainty.validate(); });
}

json to_json(const BenchPlan& plan) {
  json noises = json::array();
  for (const auto& n : plan.noises) noises.push_back(to_string(n));
  return {{"noises", noises},
          {"mc_sizes", plan.mc_sizes},
          {"dist_sizes", plan.dist_sizes},
          {"repetitions", plan.repetitions},
          {"ground_truth_size", plan.ground_truth_size},
          {"seed", plan.seed},
          {"mc_threads", plan.mc_threads},
          {"ground_truth_threads", plan.ground_truth_threads}};
}

json to_json(const RunConfig& cfg) {
  json intervals;
  for (std::size_t i = 0; i < kCalibParamCount; ++i) {
    const auto& iv = cfg.calibration_uncertainty.intervals[i];
    intervals[param_name(static_cast<CalibParam>(i))] = {iv.lo, iv.hi};
  }
  const auto& u = cfg.calibration_uncertainty;
  intervals["d"] = {u.distance.lo, u.distance.hi};
  intervals["H"] = {u.humidity.lo, u.humidity.hi};
  intervals["T_AtmC"] = {u.atmosphere_temp_c.lo, u.atmosphere_temp_c.hi};
  const auto& m = cfg.material;
  const auto& g = cfg.grid;
  const auto& l = cfg.lumped;
  const auto& c = cfg.control;
  return {
      {"seed", cfg.seed},
      {"out", cfg.out_dir},
      {"noise", to_string(cfg.noise)},
      {"thermal",
       {{"mode", cfg.thermal_mode == ThermalMode::grid ? "grid" : "lumped"},
        {"lumped",
         {{"heat_capacity", l.heat_capacity},
          {"loss_coeff", l.loss_coeff},
          {"ambient", l.ambient},
          {"absorptivity", l.absorptivity}}},
        {"material",
         {{"density", m.density},
          {"specific_heat", m.specific_heat},
          {"conductivity", m.conductivity},
          {"absorptivity", m.absorptivity},
          {"beam_radius", m.beam_radius},
          {"penetration_depth", m.penetration_depth}}},
        {"grid",
         {{"nx", g.nx},
          {"ny", g.ny},
          {"nz", g.nz},
          {"dx", g.dx},
          {"dy", g.dy},
          {"dz", g.dz},
          {"dt", g.dt},
          {"boundary_temperature", g.boundary_temperature}}}}},
      {"control",
       {{"kp", cfg.gains.kp},
        {"ki", cfg.gains.ki},
        {"kd", cfg.gains.kd},
        {"setpoint", c.setpoint},
        {"n_iters", c.n_iters},
        {"dt", c.dt},
        {"p_min", c.p_min},
        {"p_max", c.p_max},
        {"initial_temperature", c.initial_temperature}}},
      {"engine",
       {{"kind", cfg.engine == EngineKind::mc ? "mc" : "distributional"},
        {"paths", cfg.paths},
        {"size", cfg.rep_size}}},
      {"calibration", {{"params", params_json(cfg.calibration)}, {"intervals", intervals}}},
      {"bench", to_json(cfg.bench)},
  };
}

std::string config_hash(const json& canonical) {
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("out");  // where results land does not change them
  return config_hash(j);
}

void apply_sane_calibration_defaults(RunConfig& cfg) {
  constexpr double kRoom = 20.0;
  cfg.calibration.reflected_temp = kRoom;
  auto& iv = cfg.calibration_uncertainty.intervals[static_cast<std::size_t>(CalibParam::reflected_temp)];
  const double half = 0.5 * (iv.hi - iv.lo);
  iv = {kRoom - half, kRoom + half};
}

}  // namespace sinterbench
