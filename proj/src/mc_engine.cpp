#include "sinterbench/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sinterbench/errors.hpp"
#include "sinterbench/parallel.hpp"

namespace sinterbench {

namespace {

constexpr std::size_t kChunk = 512;
constexpr int kSignals = 2;  // error, power
constexpr int kPowers = 4;   // shifted power sums 1..4

struct Plan {
  std::vector<int> record_iters;
  std::vector<int> record_slot;  // per 0-based iteration, -1 if not recorded
  std::vector<double> shift;     // [iter][signal], nominal trajectory values
  std::size_t quantile_paths = 0;
};

Plan make_plan(const McConfig& mc, const ControlConfig& cfg, const PidGains& gains,
               const LumpedParams& plant) {
  cfg.validate();
  gains.validate();
  plant.validate();
  validate(mc.noise);
  if (mc.paths == 0) throw ConfigError("mc.paths must be at least 1");
  Plan plan;
  plan.record_iters = mc.record_iters;
  plan.record_iters.push_back(cfg.n_iters);
  std::sort(plan.record_iters.begin(), plan.record_iters.end());
  plan.record_iters.erase(std::unique(plan.record_iters.begin(), plan.record_iters.end()),
                          plan.record_iters.end());
  if (plan.record_iters.front() < 1) {
    throw ConfigError("mc.record_iters entries must lie in [1, n_iters]");
  }
  if (plan.record_iters.back() > cfg.n_iters) {
    throw ConfigError("mc.record_iters entries must lie in [1, n_iters]");
  }
  const auto n_iters = static_cast<std::size_t>(cfg.n_iters);
  plan.record_slot.assign(n_iters, -1);
  for (std::size_t r = 0; r < plan.record_iters.size(); ++r) {
    plan.record_slot[static_cast<std::size_t>(plan.record_iters[r] - 1)] = static_cast<int>(r);
  }
  plan.quantile_paths = mc.collect_iteration_stats ? std::min(mc.quantile_paths, mc.paths) : 0;

  const double retained = static_cast<double>(plan.record_iters.size()) * kSignals *
                              static_cast<double>(mc.paths) +
                          static_cast<double>(plan.quantile_paths) * kSignals *
                              static_cast<double>(n_iters);
  if (retained * sizeof(double) > static_cast<double>(mc.memory_budget_bytes)) {
    throw ResourceError("retaining " + std::to_string(plan.record_iters.size()) +
                        " iterations of " + std::to_string(mc.paths) +
                        " paths exceeds the memory budget of " +
                        std::to_string(mc.memory_budget_bytes) + " bytes");
  }

  plan.shift.resize(n_iters * kSignals);
  const auto nominal = run_nominal(cfg, gains, plant);
  for (std::size_t t = 0; t < n_iters; ++t) {
    plan.shift[t * kSignals] = nominal[t].error;
    plan.shift[t * kSignals + 1] = nominal[t].power;
  }
  return plan;
}

struct Outputs {
  std::vector<std::vector<double>> error_samples;  // [record][path]
  std::vector<std::vector<double>> power_samples;
  std::vector<double> quantile_error;  // [iter][quantile path]
  std::vector<double> quantile_power;
};

Outputs make_outputs(const Plan& plan, const McConfig& mc, std::size_t n_iters) {
  Outputs out;
  out.error_samples.assign(plan.record_iters.size(), std::vector<double>(mc.paths));
  out.power_samples.assign(plan.record_iters.size(), std::vector<double>(mc.paths));
  out.quantile_error.resize(plan.quantile_paths * n_iters);
  out.quantile_power.resize(plan.quantile_paths * n_iters);
  return out;
}

inline void accumulate(double* slot, double d) {
  const double d2 = d * d;
  slot[0] += d;
  slot[1] += d2;
  slot[2] += d2 * d;
  slot[3] += d2 * d2;
}

inline void retain(const Plan& plan, Outputs& out, std::size_t t, std::size_t path, double error,
                   double power) {
  if (const int slot = plan.record_slot[t]; slot >= 0) {
    out.error_samples[static_cast<std::size_t>(slot)][path] = error;
    out.power_samples[static_cast<std::size_t>(slot)][path] = power;
  }
  if (path < plan.quantile_paths) {
    out.quantile_error[t * plan.quantile_paths + path] = error;
    out.quantile_power[t * plan.quantile_paths + path] = power;
  }
}

// Iteration-major rollout of paths [begin, end). `sums` may be null.
void simulate_chunk(const McConfig& mc, const ControlConfig& cfg, const PidGains& gains,
                    const LumpedParams& plant, const Plan& plan, std::size_t begin,
                    std::size_t end, double* sums, Outputs& out) {
  const std::size_t count = end - begin;
  std::vector<NoiseSampler> samplers;
  samplers.reserve(count);
  for (std::size_t p = begin; p < end; ++p) {
    samplers.emplace_back(mc.noise, Substream::derive(mc.seed, p, mc.domain));
  }
  std::vector<LumpedState> thermal(count, LumpedState{cfg.initial_temperature, 0});
  std::vector<PidState> pid(count);
  const auto n_iters = static_cast<std::size_t>(cfg.n_iters);
  for (std::size_t t = 0; t < n_iters; ++t) {
    double* slot = sums != nullptr ? sums + t * kSignals * kPowers : nullptr;
    const double shift_e = plan.shift[t * kSignals];
    const double shift_p = plan.shift[t * kSignals + 1];
    for (std::size_t q = 0; q < count; ++q) {
      const double eps = samplers[q]();
      const double error = cfg.setpoint - measure(thermal[q].spot_temperature, eps);
      const auto step = pid_step(gains, pid[q], error, cfg.dt, cfg.p_min, cfg.p_max);
      pid[q] = step.state;
      thermal[q] = step_lumped(thermal[q], plant, step.power, cfg.dt);
      if (slot != nullptr) {
        accumulate(slot, error - shift_e);
        accumulate(slot + kPowers, step.power - shift_p);
      }
      retain(plan, out, t, begin + q, error, step.power);
    }
  }
}

SummaryStats streaming_stats(const double* s, double n, double shift) {
  SummaryStats st;
  const double mu = s[0] / n;
  const double r2 = s[1] / n, r3 = s[2] / n, r4 = s[3] / n;
  const double m2 = std::max(0.0, r2 - mu * mu);
  const double m3 = r3 - 3 * mu * r2 + 2 * mu * mu * mu;
  const double m4 = r4 - 4 * mu * r3 + 6 * mu * mu * r2 - 3 * mu * mu * mu * mu;
  st.mean = shift + mu;
  st.shape_defined = m2 > 0 && n > 1;
  if (st.shape_defined) {
    st.std = std::sqrt(m2 * n / (n - 1));
    st.skewness = m3 / std::pow(m2, 1.5);
    st.kurtosis = m4 / (m2 * m2);
  }
  return st;
}

void fill_shape(SummaryStats& target, const SummaryStats& from_samples) {
  target.mode = from_samples.mode;
  target.ci_lo = from_samples.ci_lo;
  target.ci_hi = from_samples.ci_hi;
}

EnsembleResult assemble(const McConfig& mc, const ControlConfig& cfg, const Plan& plan,
                        Outputs&& out, const std::vector<double>& sums) {
  EnsembleResult result;
  result.record_iters = plan.record_iters;
  const auto n_iters = static_cast<std::size_t>(cfg.n_iters);
  if (mc.collect_iteration_stats) {
    const double n = static_cast<double>(mc.paths);
    result.iterations.resize(n_iters);
    for (std::size_t t = 0; t < n_iters; ++t) {
      auto& it = result.iterations[t];
      it.iter = static_cast<int>(t + 1);
      const double* s = sums.data() + t * kSignals * kPowers;
      it.error = streaming_stats(s, n, plan.shift[t * kSignals]);
      it.power = streaming_stats(s + kPowers, n, plan.shift[t * kSignals + 1]);
      if (const int slot = plan.record_slot[t]; slot >= 0) {
        const auto r = static_cast<std::size_t>(slot);
        fill_shape(it.error, stats(EmpiricalDistribution{out.error_samples[r]}));
        fill_shape(it.power, stats(EmpiricalDistribution{out.power_samples[r]}));
      } else {
        const auto first = static_cast<std::ptrdiff_t>(t * plan.quantile_paths);
        const auto last = first + static_cast<std::ptrdiff_t>(plan.quantile_paths);
        fill_shape(it.error, stats(EmpiricalDistribution{std::vector<double>(
                                 out.quantile_error.begin() + first,
                                 out.quantile_error.begin() + last)}));
        fill_shape(it.power, stats(EmpiricalDistribution{std::vector<double>(
                                 out.quantile_power.begin() + first,
                                 out.quantile_power.begin() + last)}));
      }
    }
  }
  result.e_ss = EmpiricalDistribution{out.error_samples.back()};
  for (std::size_t r = 0; r < plan.record_iters.size(); ++r) {
    result.error_samples.push_back(EmpiricalDistribution{std::move(out.error_samples[r])});
    result.power_samples.push_back(EmpiricalDistribution{std::move(out.power_samples[r])});
  }
  return result;
}

}  // namespace

PathTrajectory run_path(const ControlConfig& cfg, const PidGains& gains,
                        const LumpedParams& plant, const NoiseModel& noise, Substream stream) {
  cfg.validate();
  NoiseSampler sampler(noise, stream);
  LumpedState thermal{cfg.initial_temperature, 0};
  PidState pid;
  PathTrajectory out;
  out.error.reserve(static_cast<std::size_t>(cfg.n_iters));
  out.power.reserve(static_cast<std::size_t>(cfg.n_iters));
  out.temperature.reserve(static_cast<std::size_t>(cfg.n_iters));
  for (int t = 0; t < cfg.n_iters; ++t) {
    out.temperature.push_back(thermal.spot_temperature);
    const double eps = sampler();
    const double error = cfg.setpoint - measure(thermal.spot_temperature, eps);
    const auto step = pid_step(gains, pid, error, cfg.dt, cfg.p_min, cfg.p_max);
    pid = step.state;
    thermal = step_lumped(thermal, plant, step.power, cfg.dt);
    out.error.push_back(error);
    out.power.push_back(step.power);
  }
  return out;
}

EnsembleResult run_ensemble(const McConfig& mc, const ControlConfig& cfg, const PidGains& gains,
                            const LumpedParams& plant) {
  const Plan plan = make_plan(mc, cfg, gains, plant);
  const auto n_iters = static_cast<std::size_t>(cfg.n_iters);
  Outputs out = make_outputs(plan, mc, n_iters);
  const std::size_t chunks = (mc.paths + kChunk - 1) / kChunk;
  const std::size_t stride = n_iters * kSignals * kPowers;
  std::vector<double> partial(mc.collect_iteration_stats ? chunks * stride : 0, 0.0);
  const int workers = resolve_workers(mc.threads);

  // Exceptions may not cross an OpenMP region; keep the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
    try {
      const auto chunk = static_cast<std::size_t>(c);
      const std::size_t begin = chunk * kChunk;
      const std::size_t end = std::min(mc.paths, begin + kChunk);
      double* sums = partial.empty() ? nullptr : partial.data() + chunk * stride;
      simulate_chunk(mc, cfg, gains, plant, plan, begin, end, sums, out);
    } catch (...) {
#pragma omp critical(sinterbench_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> sums(partial.empty() ? 0 : stride, 0.0);
  for (std::size_t c = 0; c < chunks && !partial.empty(); ++c) {
    for (std::size_t k = 0; k < stride; ++k) sums[k] += partial[c * stride + k];
  }
  return assemble(mc, cfg, plan, std::move(out), sums);
}

EnsembleResult run_ensemble_serial(const McConfig& mc, const ControlConfig& cfg,
                                   const PidGains& gains, const LumpedParams& plant) {
  const Plan plan = make_plan(mc, cfg, gains, plant);
  const auto n_iters = static_cast<std::size_t>(cfg.n_iters);
  Outputs out = make_outputs(plan, mc, n_iters);
  std::vector<double> sums(mc.collect_iteration_stats ? n_iters * kSignals * kPowers : 0, 0.0);
  for (std::size_t p = 0; p < mc.paths; ++p) {
    const auto path =
        run_path(cfg, gains, plant, mc.noise, Substream::derive(mc.seed, p, mc.domain));
    for (std::size_t t = 0; t < n_iters; ++t) {
      if (!sums.empty()) {
        double* slot = sums.data() + t * kSignals * kPowers;
        accumulate(slot, path.error[t] - plan.shift[t * kSignals]);
        accumulate(slot + kPowers, path.power[t] - plan.shift[t * kSignals + 1]);
      }
      retain(plan, out, t, p, path.error[t], path.power[t]);
    }
  }
  return assemble(mc, cfg, plan, std::move(out), sums);
}

EmpiricalDistribution ground_truth(const ControlConfig& cfg, const PidGains& gains,
                                   const LumpedParams& plant, const NoiseModel& noise,
                                   std::size_t m_gt, std::uint64_t seed, int threads) {
  if (m_gt < 10000) throw std::invalid_argument("ground_truth: m_gt must be at least 10^4");
  McConfig mc;
  mc.paths = m_gt;
  mc.noise = noise;
  mc.seed = seed;
  mc.domain = SeedDomain::ground_truth;
  mc.collect_iteration_stats = false;
  mc.threads = threads;
  return run_ensemble(mc, cfg, gains, plant).e_ss;
}

}  // namespace sinterbench
