#include "remlab/pointproc.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "remlab/error.hpp"
#include "remlab/theory.hpp"

namespace remlab {

Normalization Normalization::for_m(double m) {
  if (!(m >= kMinNormalizationM)) {
    throw UsageError("normalization needs m >= " + std::to_string(kMinNormalizationM) + " (got " + std::to_string(m) +
                     ")");
  }
  const double b = 1.0 / std::sqrt(m);
  const double radicand = 2.0 * m * std::numbers::ln2 + 2.0 * std::log(b) - std::numbers::ln2;
  if (!(radicand > 0.0)) throw UsageError("normalization radicand is not positive");
  return {m, std::sqrt(radicand), b};
}

std::vector<double> normalize(std::span<const double> raw, const Normalization& norm) {
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(), [&](double h) { return norm.apply(h); });
  return out;
}

BorelWindow::BorelWindow(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw UsageError("window needs at least one interval");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw UsageError("window intervals must be bounded");
    if (!(iv.lo < iv.hi)) throw UsageError("window interval needs lo < hi");
    if (i > 0 && intervals_[i - 1].hi > iv.lo) throw UsageError("window intervals must be sorted and disjoint");
  }
}

bool BorelWindow::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(), [x](const Interval& iv) { return iv.lo <= x && x < iv.hi; });
}

double BorelWindow::total_length() const {
  double s = 0.0;
  for (const auto& iv : intervals_) s += iv.hi - iv.lo;
  return s;
}

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::size_t count_in_window(std::span<const double> values, const BorelWindow& window) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return window.contains(v); }));
}

namespace {

double falling_factorial(std::int64_t z, int order) {
  double v = 1.0;
  for (int i = 0; i < order; ++i) v *= static_cast<double>(z - i);
  return v;
}

}  // namespace

MomentReport factorial_moment(const CountVector& counts, int order) {
  if (order < 1) throw UsageError("factorial moment order must be >= 1");
  const std::size_t r = counts.replicas();
  if (r < 2) throw UsageError("factorial moment needs at least 2 replicas");
  // Welford, in replica order.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (auto z : counts.counts) {
    if (z < 0) throw UsageError("counts must be non-negative");
    const double x = falling_factorial(z, order);
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  const double var = m2 / static_cast<double>(r - 1);
  return {order, mean, std::sqrt(var / static_cast<double>(r)), std::nullopt, std::nullopt};
}

RatioReport moment_ratio(const CountVector& counts) {
  const std::size_t r = counts.replicas();
  if (r < 2) throw UsageError("moment ratio needs at least 2 replicas");
  double sa = 0, sb = 0;
  for (auto z : counts.counts) {
    sa += falling_factorial(z, 2);
    sb += static_cast<double>(z);
  }
  const double n = static_cast<double>(r);
  const double ma = sa / n, mb = sb / n;
  double vaa = 0, vbb = 0, vab = 0;
  for (auto z : counts.counts) {
    const double da = falling_factorial(z, 2) - ma;
    const double db = static_cast<double>(z) - mb;
    vaa += da * da;
    vbb += db * db;
    vab += da * db;
  }
  vaa /= n - 1;
  vbb /= n - 1;
  vab /= n - 1;
  RatioReport rep;
  rep.m1 = mb;
  rep.m2 = ma;
  if (mb <= 0.0) {
    rep.ratio = std::nan("");
    rep.std_error = std::nan("");
    return rep;
  }
  rep.ratio = ma / (mb * mb);
  // Gradient of a / b^2 is (1/b^2, -2a/b^3).
  const double ga = 1.0 / (mb * mb);
  const double gb = -2.0 * ma / (mb * mb * mb);
  const double var = (ga * ga * vaa + gb * gb * vbb + 2.0 * ga * gb * vab) / n;
  rep.std_error = std::sqrt(std::max(var, 0.0));
  return rep;
}

GofReport poisson_gof(const CountVector& counts, double lambda, double alpha) {
  if (!(lambda > 0.0)) throw UsageError("poisson_gof needs lambda > 0");
  const std::size_t r = counts.replicas();
  if (r < kGofMinReplicas) {
    throw UsageError("poisson_gof needs at least " + std::to_string(kGofMinReplicas) + " replicas");
  }
  const double n = static_cast<double>(r);
  const boost::math::poisson_distribution<double> law(lambda);
  std::int64_t max_count = 0;
  for (auto z : counts.counts) max_count = std::max(max_count, z);

  // Raw cells 0..top-1 plus a tail cell [top, inf).
  std::int64_t top = std::max<std::int64_t>(max_count + 1, 1);
  while (top > 1 && n * boost::math::cdf(boost::math::complement(law, static_cast<double>(top - 1))) < 1e-3) --top;
  std::vector<double> exp_raw, obs_raw;
  for (std::int64_t k = 0; k < top; ++k) exp_raw.push_back(n * boost::math::pdf(law, static_cast<double>(k)));
  exp_raw.push_back(n * boost::math::cdf(boost::math::complement(law, static_cast<double>(top - 1))));
  obs_raw.assign(exp_raw.size(), 0.0);
  for (auto z : counts.counts) obs_raw[static_cast<std::size_t>(std::min<std::int64_t>(z, top))] += 1.0;

  GofReport rep;
  rep.alpha = alpha;
  double e_acc = 0, o_acc = 0;
  for (std::size_t i = 0; i < exp_raw.size(); ++i) {
    e_acc += exp_raw[i];
    o_acc += obs_raw[i];
    if (e_acc >= 5.0) {
      rep.expected.push_back(e_acc);
      rep.observed.push_back(o_acc);
      e_acc = o_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (rep.expected.empty()) {
      rep.expected.push_back(e_acc);
      rep.observed.push_back(o_acc);
    } else {
      rep.expected.back() += e_acc;
      rep.observed.back() += o_acc;
    }
  }
  for (std::size_t i = 0; i < rep.expected.size(); ++i) {
    const double d = rep.observed[i] - rep.expected[i];
    rep.statistic += d * d / rep.expected[i];
  }
  rep.dof = static_cast<int>(rep.expected.size()) - 1;
  if (rep.dof >= 1) {
    const boost::math::chi_squared_distribution<double> chi(rep.dof);
    rep.p_value = boost::math::cdf(boost::math::complement(chi, rep.statistic));
  } else {
    rep.p_value = 1.0;
  }
  rep.passed = rep.p_value >= alpha;
  return rep;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

SpacingReport spacing_test(std::span<const double> points, const BorelWindow& window) {
  if (points.size() < kSpacingMinPoints) {
    throw UsageError("spacing_test needs at least " + std::to_string(kSpacingMinPoints) + " points");
  }
  std::vector<double> u;
  u.reserve(points.size());
  for (double t : points) {
    if (!window.contains(t)) throw UsageError("spacing_test point lies outside the window");
    u.push_back(intensity_cdf_in_window(t, window));
  }
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  }
  SpacingReport rep;
  rep.points = u.size();
  rep.ks_distance = d;
  // 1% critical value of the limiting Kolmogorov law.
  rep.threshold = 1.6276 / std::sqrt(n);
  rep.p_value = kolmogorov_survival(std::sqrt(n) * d);
  rep.passed = d <= rep.threshold;
  return rep;
}

}  // namespace remlab
