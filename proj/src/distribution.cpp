#include "sinterbench/distribution.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sinterbench/errors.hpp"

namespace sinterbench {

namespace {

struct Moments {
  double mean = 0, m2 = 0, m3 = 0, m4 = 0;
};

Moments central_moments(std::span<const Atom> atoms) {
  Moments m;
  for (const auto& a : atoms) m.mean += a.w * a.x;
  for (const auto& a : atoms) {
    const double d = a.x - m.mean;
    const double d2 = d * d;
    m.m2 += a.w * d2;
    m.m3 += a.w * d2 * d;
    m.m4 += a.w * d2 * d2;
  }
  return m;
}

bool has_two_distinct(std::span<const Atom> atoms) {
  return !atoms.empty() && atoms.front().x != atoms.back().x;
}

// Freedman-Diaconis histogram; the lowest of equally populated bins wins.
double histogram_mode(std::span<const Atom> atoms, std::size_t count) {
  const double lo = atoms.front().x;
  const double range = atoms.back().x - lo;
  if (range <= 0) return lo;
  const double iqr = weighted_percentile(atoms, 0.75) - weighted_percentile(atoms, 0.25);
  const double n = static_cast<double>(count);
  double width = 2.0 * iqr / std::cbrt(n);
  if (!(width > 0)) width = range / std::ceil(std::log2(n) + 1.0);
  const double bins_d = std::min(std::ceil(range / width), 1e6);
  const auto bins = static_cast<std::size_t>(std::max(1.0, bins_d));
  width = std::max(width, range / static_cast<double>(bins));
  std::vector<double> mass(bins, 0.0);
  for (const auto& a : atoms) {
    auto b = static_cast<std::size_t>((a.x - lo) / width);
    mass[std::min(b, bins - 1)] += a.w;
  }
  const auto best = std::max_element(mass.begin(), mass.end()) - mass.begin();
  return lo + (static_cast<double>(best) + 0.5) * width;
}

SummaryStats summarize(std::span<const Atom> atoms, std::size_t count, double variance_scale) {
  if (atoms.empty()) throw std::invalid_argument("stats: empty distribution");
  SummaryStats s;
  const Moments m = central_moments(atoms);
  s.mean = m.mean;
  s.shape_defined = has_two_distinct(atoms) && m.m2 > 0;
  if (s.shape_defined) {
    s.std = std::sqrt(m.m2 * variance_scale);
    s.skewness = m.m3 / std::pow(m.m2, 1.5);
    s.kurtosis = m.m4 / (m.m2 * m.m2);
  }
  s.mode = histogram_mode(atoms, count);
  s.ci_lo = weighted_percentile(atoms, 0.025);
  s.ci_hi = weighted_percentile(atoms, 0.975);
  return s;
}

std::vector<Atom> sorted_equal_weight(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  std::vector<Atom> atoms;
  atoms.reserve(samples.size());
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite sample");
    atoms.push_back({x, w});
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  return atoms;
}

double wasserstein_sorted(double p, std::span<const Atom> a, std::span<const Atom> b) {
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: order p must be >= 1");
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein: empty input");
  // Both quantile functions are step functions on [0, 1]; integrate over the
  // merged breakpoints. Cumulative weights are normalised so both end at 1.
  double total_a = 0, total_b = 0;
  for (const auto& x : a) total_a += x.w;
  for (const auto& x : b) total_b += x.w;
  std::size_t i = 0, j = 0;
  double ca = a[0].w / total_a, cb = b[0].w / total_b;
  double u = 0, acc = 0;
  while (true) {
    const bool last_a = i + 1 == a.size();
    const bool last_b = j + 1 == b.size();
    const double edge_a = last_a ? 1.0 : ca;
    const double edge_b = last_b ? 1.0 : cb;
    const double next = std::min(edge_a, edge_b);
    if (next > u) {
      const double d = std::abs(a[i].x - b[j].x);
      acc += (next - u) * (p == 1.0 ? d : std::pow(d, p));
      u = next;
    }
    if (last_a && last_b) break;
    if (!last_a && edge_a <= next) ca += a[++i].w / total_a;
    if (!last_b && edge_b <= next) cb += b[++j].w / total_b;
  }
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

}  // namespace

DiracMixture DiracMixture::from_sorted(std::vector<Atom> points) {
  DiracMixture m;
  m.points_ = std::move(points);
  return m;
}

DiracMixture DiracMixture::from_points(std::vector<Atom> points) {
  if (points.empty()) throw std::invalid_argument("DiracMixture: no points");
  double total = 0;
  for (const auto& a : points) {
    if (!std::isfinite(a.x)) throw std::invalid_argument("DiracMixture: non-finite location");
    if (!(a.w > 0) || !std::isfinite(a.w)) {
      throw std::invalid_argument("DiracMixture: weights must be positive");
    }
    total += a.w;
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const Atom& l, const Atom& r) { return l.x < r.x; });
  for (auto& a : points) a.w /= total;
  return from_sorted(std::move(points));
}

DiracMixture DiracMixture::from_samples(std::span<const double> samples) {
  return from_sorted(sorted_equal_weight(samples));
}

double DiracMixture::mean() const {
  double acc = 0;
  for (const auto& a : points_) acc += a.w * a.x;
  return acc;
}

double DiracMixture::total_weight() const {
  double acc = 0;
  for (const auto& a : points_) acc += a.w;
  return acc;
}

DiracMixture DiracMixture::merged() const {
  std::vector<Atom> out;
  out.reserve(points_.size());
  for (const auto& a : points_) {
    if (!out.empty() && out.back().x == a.x) {
      out.back().w += a.w;
    } else {
      out.push_back(a);
    }
  }
  return from_sorted(std::move(out));
}

double normal_quantile(double u) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), u);
}

DiracMixture quantize(const NoiseModel& model, std::size_t n) {
  if (n == 0) throw std::invalid_argument("quantize: point count must be at least 1");
  validate(model);
  if (std::holds_alternative<NoNoise>(model)) return DiracMixture::dirac(0.0);
  std::vector<Atom> atoms;
  atoms.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double u = (static_cast<double>(i) - 0.5) / static_cast<double>(n);
    double x = 0;
    if (const auto* g = std::get_if<GaussianNoise>(&model)) {
      x = g->mu + g->sigma * normal_quantile(u);
    } else {
      const auto& uni = std::get<UniformNoise>(model);
      x = uni.a + (uni.b - uni.a) * u;
    }
    atoms.push_back({x, w});
  }
  return DiracMixture::from_sorted(std::move(atoms));
}

DiracMixture compress(const DiracMixture& m, std::size_t n) {
  if (n == 0) throw std::invalid_argument("compress: point count must be at least 1");
  if (m.size() <= n) return m;
  const auto pts = m.points();
  std::vector<double> weights(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) weights[i] = pts[i].w;
  std::vector<double> mass(n, 0.0), moment(n, 0.0);
  equal_weight_groups(weights, n, [&](std::size_t g, std::size_t i, double share) {
    mass[g] += share;
    moment[g] += share * pts[i].x;
  });
  std::vector<Atom> out(n);
  for (std::size_t g = 0; g < n; ++g) out[g] = {moment[g] / mass[g], mass[g]};
  return DiracMixture::from_sorted(std::move(out));
}

DiracMixture combine(const DiracMixture& a, const DiracMixture& b,
                     const std::function<double(double, double)>& f, std::size_t n) {
  std::vector<Atom> product;
  product.reserve(a.size() * b.size());
  for (const auto& pa : a.points()) {
    for (const auto& pb : b.points()) {
      const double x = f(pa.x, pb.x);
      if (!std::isfinite(x)) {
        std::ostringstream msg;
        msg << "combine: non-finite result for pair (" << pa.x << ", " << pb.x << ")";
        throw NumericError(msg.str());
      }
      product.push_back({x, pa.w * pb.w});
    }
  }
  return compress(DiracMixture::from_points(std::move(product)), n);
}

double weighted_percentile(std::span<const Atom> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty distribution");
  double before = 0;
  double prev_pos = 0, prev_x = sorted.front().x;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double pos = before + 0.5 * sorted[i].w;
    if (q <= pos) {
      if (i == 0) return sorted[0].x;
      const double t = (q - prev_pos) / (pos - prev_pos);
      return prev_x + t * (sorted[i].x - prev_x);
    }
    before += sorted[i].w;
    prev_pos = pos;
    prev_x = sorted[i].x;
  }
  return sorted.back().x;
}

SummaryStats stats(const EmpiricalDistribution& d) {
  const auto atoms = sorted_equal_weight(d.samples);
  const double n = static_cast<double>(atoms.size());
  return summarize(atoms, atoms.size(), n > 1 ? n / (n - 1.0) : 1.0);
}

SummaryStats stats(const DiracMixture& m) {
  if (m.empty()) throw std::invalid_argument("stats: empty mixture");
  return summarize(m.points(), m.size(), 1.0);
}

double wasserstein(double p, const DiracMixture& a, const DiracMixture& b) {
  return wasserstein_sorted(p, a.points(), b.points());
}

double wasserstein(double p, const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  return wasserstein_sorted(p, sorted_equal_weight(a.samples), sorted_equal_weight(b.samples));
}

double wasserstein(double p, const EmpiricalDistribution& a, const DiracMixture& b) {
  return wasserstein_sorted(p, sorted_equal_weight(a.samples), b.points());
}

double wasserstein(double p, const DiracMixture& a, const EmpiricalDistribution& b) {
  return wasserstein(p, b, a);
}

}  // namespace sinterbench
