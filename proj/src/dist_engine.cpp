#include "sinterbench/dist_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "sinterbench/errors.hpp"

namespace sinterbench {

namespace {

struct Particles {
  std::vector<double> temperature, integral, prev_error, weight;

  std::size_t size() const { return weight.size(); }
  void resize(std::size_t n) {
    temperature.resize(n);
    integral.resize(n);
    prev_error.resize(n);
    weight.resize(n);
  }
};

// Successor states of every particle x noise atom pair.
struct Pairs {
  std::vector<double> error, power, temperature, integral, weight, key;

  void resize(std::size_t n) {
    error.resize(n);
    power.resize(n);
    temperature.resize(n);
    integral.resize(n);
    weight.resize(n);
    key.resize(n);
  }
};

struct Keyed {
  double key;
  std::uint32_t index;
};

DiracMixture marginal(const std::vector<double>& values, const std::vector<double>& weights,
                      std::vector<Atom>& scratch) {
  scratch.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) scratch[i] = {values[i], weights[i]};
  std::sort(scratch.begin(), scratch.end(), [](const Atom& l, const Atom& r) {
    return l.x < r.x || (l.x == r.x && l.w < r.w);
  });
  return DiracMixture::from_sorted(scratch).merged();
}

bool key_less(const Keyed& l, const Keyed& r) {
  return l.key < r.key || (l.key == r.key && l.index < r.index);
}

// Sorts (key, index) entries. Each particle contributes a block of `run`
// consecutive entries that is usually already monotone in the key, in which
// case the blocks are oriented and merged pairwise instead of sorted.
void sort_keyed(std::vector<Keyed>& v, std::vector<Keyed>& tmp, std::size_t run) {
  const std::size_t n = v.size();
  for (std::size_t lo = 0; lo < n; lo += run) {
    const auto first = v.begin() + static_cast<long>(lo);
    const auto last = v.begin() + static_cast<long>(std::min(lo + run, n));
    if (std::is_sorted(first, last, key_less)) continue;
    const bool falling = std::adjacent_find(first, last, [](const Keyed& a, const Keyed& b) {
                           return !(b.key < a.key);
                         }) == last;
    if (!falling) {
      std::sort(v.begin(), v.end(), key_less);
      return;
    }
    std::reverse(first, last);
  }
  tmp.resize(n);
  for (std::size_t width = run; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::merge(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(mid),
                 v.begin() + static_cast<long>(mid), v.begin() + static_cast<long>(hi),
                 tmp.begin() + static_cast<long>(lo), key_less);
    }
    v.swap(tmp);
  }
}

std::vector<int> normalized_record_iters(std::vector<int> iters, int n_iters) {
  iters.push_back(n_iters);
  std::sort(iters.begin(), iters.end());
  iters.erase(std::unique(iters.begin(), iters.end()), iters.end());
  if (iters.front() < 1 || iters.back() > n_iters) {
    throw ConfigError("dist.record_iters entries must lie in [1, n_iters]");
  }
  return iters;
}

}  // namespace

DistResult run_distributional(const DistConfig& dc, const ControlConfig& cfg,
                              const PidGains& gains, const LumpedParams& plant,
                              const NoiseModel& noise) {
  cfg.validate();
  gains.validate();
  plant.validate();
  if (dc.size == 0) throw ConfigError("representation size must be at least 1");
  const DiracMixture atoms = quantize(noise, dc.size);
  const std::size_t n = dc.size;
  const std::size_t k = atoms.size();
  if (n * k > dc.expansion_budget) {
    std::ostringstream msg;
    msg << "representation size " << n << " forms " << n * k
        << " pairs per iteration, above the expansion budget of " << dc.expansion_budget;
    throw ResourceError(msg.str());
  }

  DistResult result;
  result.record_iters = normalized_record_iters(dc.record_iters, cfg.n_iters);
  std::vector<bool> recorded(static_cast<std::size_t>(cfg.n_iters) + 1, false);
  for (int it : result.record_iters) recorded[static_cast<std::size_t>(it)] = true;

  Particles particles;
  particles.resize(1);
  particles.temperature[0] = cfg.initial_temperature;
  particles.integral[0] = 0.0;
  particles.prev_error[0] = 0.0;
  particles.weight[0] = 1.0;
  bool initialized = false;

  Pairs pairs;
  pairs.resize(n * k);
  std::vector<Keyed> order, order_tmp;
  order.reserve(n * k);
  std::vector<double> sorted_weight;
  sorted_weight.reserve(n * k);
  std::vector<Atom> scratch;
  Particles next;
  next.resize(n);

  const auto noise_atoms = atoms.points();
  for (int iter = 1; iter <= cfg.n_iters; ++iter) {
    const std::size_t count = particles.size() * k;
    pairs.resize(count);
    for (std::size_t i = 0; i < particles.size(); ++i) {
      const PidState pid{particles.integral[i], particles.prev_error[i], initialized};
      const LumpedState thermal{particles.temperature[i], 0};
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t q = i * k + j;
        const double error = cfg.setpoint - measure(thermal.spot_temperature, noise_atoms[j].x);
        const auto step = pid_step(gains, pid, error, cfg.dt, cfg.p_min, cfg.p_max);
        const double successor = step_lumped(thermal, plant, step.power, cfg.dt).spot_temperature;
        const double predicted = cfg.setpoint - successor;
        pairs.error[q] = error;
        pairs.power[q] = step.power;
        pairs.temperature[q] = successor;
        pairs.integral[q] = step.state.integral;
        pairs.weight[q] = particles.weight[i] * noise_atoms[j].w;
        pairs.key[q] = gains.kp * predicted + gains.ki * step.state.integral +
                       gains.kd * (predicted - error) / cfg.dt;
      }
    }
    initialized = true;
    result.pair_evaluations += count;

    const bool record = recorded[static_cast<std::size_t>(iter)];
    if (record || dc.collect_iteration_stats) {
      DiracMixture err = marginal(pairs.error, pairs.weight, scratch);
      DiracMixture pow = marginal(pairs.power, pairs.weight, scratch);
      if (dc.collect_iteration_stats) {
        result.iterations.push_back({iter, stats(err), stats(pow)});
      }
      if (record) {
        result.error_mixtures.push_back(std::move(err));
        result.power_mixtures.push_back(std::move(pow));
      }
    }

    if (iter == cfg.n_iters) break;

    if (count <= n) {
      particles.resize(count);
      for (std::size_t q = 0; q < count; ++q) {
        particles.temperature[q] = pairs.temperature[q];
        particles.integral[q] = pairs.integral[q];
        particles.prev_error[q] = pairs.error[q];
        particles.weight[q] = pairs.weight[q];
      }
      continue;
    }

    order.resize(count);
    for (std::size_t q = 0; q < count; ++q) {
      order[q] = {pairs.key[q], static_cast<std::uint32_t>(q)};
    }
    std::fill(next.temperature.begin(), next.temperature.end(), 0.0);
    std::fill(next.integral.begin(), next.integral.end(), 0.0);
    std::fill(next.prev_error.begin(), next.prev_error.end(), 0.0);
    std::fill(next.weight.begin(), next.weight.end(), 0.0);
    auto absorb = [&](std::size_t g, std::size_t s, double share) {
      const std::size_t q = order[s].index;
      next.weight[g] += share;
      next.temperature[g] += share * pairs.temperature[q];
      next.integral[g] += share * pairs.integral[q];
      next.prev_error[g] += share * pairs.error[q];
    };

    sort_keyed(order, order_tmp, k);
    sorted_weight.resize(count);
    for (std::size_t q = 0; q < count; ++q) sorted_weight[q] = pairs.weight[order[q].index];
    equal_weight_groups(sorted_weight, n, absorb);
    for (std::size_t g = 0; g < n; ++g) {
      const double w = next.weight[g];
      next.temperature[g] /= w;
      next.integral[g] /= w;
      next.prev_error[g] /= w;
    }
    std::swap(particles, next);
    next.resize(n);
  }

  result.e_ss = result.error_mixtures.back();
  return result;
}

DiracMixture lift_through(const std::function<double(double)>& f, const DiracMixture& m) {
  std::vector<Atom> out;
  out.reserve(m.size());
  for (const auto& a : m.points()) {
    const double y = f(a.x);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "lift_through: non-finite image of support point " << a.x;
      throw NumericError(msg.str());
    }
    out.push_back({y, a.w});
  }
  return DiracMixture::from_points(std::move(out)).merged();
}

}  // namespace sinterbench
