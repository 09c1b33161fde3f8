#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sinterbench/measurement.hpp"

namespace sinterbench {

/// Unweighted sample set.
struct EmpiricalDistribution {
  std::vector<double> samples;
};

struct Atom {
  double x;
  double w;
};

/// Finitely many weighted point masses, sorted by location, weights summing
/// to one.
class DiracMixture {
 public:
  DiracMixture() = default;

  /// Sorts by location and renormalises. Throws std::invalid_argument on an
  /// empty input, a non-positive weight or a non-finite location.
  static DiracMixture from_points(std::vector<Atom> points);
  static DiracMixture dirac(double x) { return from_sorted({{x, 1.0}}); }
  /// Equal weights 1/n on each sample.
  static DiracMixture from_samples(std::span<const double> samples);
  /// Trusts the caller: points already sorted, weights positive.
  static DiracMixture from_sorted(std::vector<Atom> points);

  std::span<const Atom> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double mean() const;
  double total_weight() const;

  /// Coalesces atoms that share a location.
  DiracMixture merged() const;

 private:
  std::vector<Atom> points_;
};

struct SummaryStats {
  double mean = 0;
  double std = 0;  // n-1 for sample sets, probability-weighted for mixtures
  double skewness = 0;
  double kurtosis = 0;  // non-excess; 3 for a Gaussian
  double mode = 0;
  double ci_lo = 0;  // 2.5th percentile
  double ci_hi = 0;  // 97.5th percentile
  /// False when fewer than two distinct values exist; std, skewness and
  /// kurtosis are then reported as 0.
  bool shape_defined = false;
};

/// Equiprobable midpoint quantiles x_i = F^-1((i - 0.5) / n).
DiracMixture quantize(const NoiseModel& model, std::size_t n);

/// Splits sorted points into n consecutive groups of equal weight and
/// replaces each group by its weighted centroid.
DiracMixture compress(const DiracMixture& m, std::size_t n);

/// Independent combination {f(xa, xb), wa wb} compressed to n points.
DiracMixture combine(const DiracMixture& a, const DiracMixture& b,
                     const std::function<double(double, double)>& f, std::size_t n);

SummaryStats stats(const EmpiricalDistribution& d);
SummaryStats stats(const DiracMixture& m);

/// Exact 1-D p-Wasserstein distance via the quantile functions.
double wasserstein(double p, const DiracMixture& a, const DiracMixture& b);
double wasserstein(double p, const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double wasserstein(double p, const EmpiricalDistribution& a, const DiracMixture& b);
double wasserstein(double p, const DiracMixture& a, const EmpiricalDistribution& b);

/// Weighted percentile with linear interpolation between atom midpoints
/// (the Hazen rule for equal weights). q in [0, 1].
double weighted_percentile(std::span<const Atom> sorted, double q);

/// Standard normal quantile.
double normal_quantile(double u);

/// Walks items in order and distributes their weight over `groups`
/// consecutive buckets of equal total weight, splitting an item across a
/// bucket edge when needed. Calls visit(group, item, share) for every
/// non-zero share. Every bucket receives weight when groups <= items.
template <class Visit>
void equal_weight_groups(std::span<const double> weights, std::size_t groups, Visit&& visit) {
  double total = 0;
  for (double w : weights) total += w;
  const double target = total / static_cast<double>(groups);
  const double slack = total * 1e-13;
  std::size_t g = 0;
  double room = target;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double left = weights[i];
    while (left > 0) {
      if (g + 1 == groups) {
        visit(g, i, left);
        break;
      }
      if (left <= room + slack) {
        visit(g, i, left);
        room -= left;
        if (room <= slack) {
          ++g;
          room = target;
        }
        break;
      }
      visit(g, i, room);
      left -= room;
      ++g;
      room = target;
    }
  }
}

}  // namespace sinterbench
