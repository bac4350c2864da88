#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace remlab {

inline constexpr double kMinNormalizationM = 2.0;

// Extreme-value centring and scaling of a cloud of mean size 2^m:
// b = 1/sqrt(m), a = sqrt(2 m log2 + 2 log b - log2).
struct Normalization {
  double m = 0.0;
  double a_n = 0.0;
  double b_n = 0.0;

  static Normalization for_m(double m);
  double apply(double h) const { return (h - a_n) / b_n; }
  double raw(double x) const { return a_n + b_n * x; }
};

// (H - a) / b elementwise.
std::vector<double> normalize(std::span<const double> raw, const Normalization& norm);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Finite union of bounded, sorted, disjoint half-open intervals [lo, hi).
class BorelWindow {
 public:
  explicit BorelWindow(std::vector<Interval> intervals);
  static BorelWindow single(double lo, double hi) { return BorelWindow({{lo, hi}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool contains(double x) const;
  double total_length() const;

 private:
  std::vector<Interval> intervals_;
};

// Same contract as BorelWindow but allowed to be empty; used for windows
// produced by intersection.
std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b);

std::size_t count_in_window(std::span<const double> values, const BorelWindow& window);

// Per-replica counts Z_r of points in a window.
struct CountVector {
  std::vector<std::int64_t> counts;
  std::size_t replicas() const { return counts.size(); }
};

struct MomentReport {
  int order = 1;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> reference_semianalytic;
  std::optional<double> reference_asymptotic;
};

// Mean of the falling factorial Z (Z-1) ... (Z-l+1) across replicas, with
// sample standard deviation / sqrt(R).
MomentReport factorial_moment(const CountVector& counts, int order);

// m2 / m1^2 with a delta-method standard error that accounts for the
// correlation of the two estimates.
struct RatioReport {
  double m1 = 0.0;
  double m2 = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
};
RatioReport moment_ratio(const CountVector& counts);

struct GofReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  double alpha = 0.01;
  bool passed = true;
  std::vector<double> observed;  // per pooled bin
  std::vector<double> expected;
};

inline constexpr std::size_t kGofMinReplicas = 1000;

// Chi-square test of the count histogram against Poisson(lambda). Adjacent
// cells are pooled until every expected count is >= 5; lambda is not fitted,
// so dof = bins - 1.
GofReport poisson_gof(const CountVector& counts, double lambda, double alpha = 0.01);

struct SpacingReport {
  double ks_distance = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  std::size_t points = 0;
  bool passed = true;
};

inline constexpr std::size_t kSpacingMinPoints = 200;

// Maps pooled in-window points through the CDF of the limiting intensity
// restricted to the window and runs a KS test against uniformity at the 1%
// asymptotic threshold.
SpacingReport spacing_test(std::span<const double> points, const BorelWindow& window);

// Asymptotic Kolmogorov survival function P(sqrt(n) D > x).
double kolmogorov_survival(double x);

}  // namespace remlab
