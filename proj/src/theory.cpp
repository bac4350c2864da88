#include "remlab/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "remlab/combinatorics.hpp"
#include "remlab/error.hpp"
#include "remlab/quadrature.hpp"

namespace remlab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this determinant a bivariate density is too narrow for tensor quadrature.
constexpr double kConditionalDet = 1e-4;

double mu_interval(double lo, double hi) {
  const double c = kIntensityRate;
  return (std::exp(-c * lo) - std::exp(-c * hi)) / (c * std::sqrt(std::numbers::pi));
}

// log(sum exp(v)) accumulated with a running maximum and Neumaier summation.
class LogSumExp {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v > max_) {
      const double scale = max_ == kNegInf ? 0.0 : std::exp(max_ - v);
      sum_ *= scale;
      comp_ *= scale;
      max_ = v;
    }
    const double x = std::exp(v - max_);
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const LogSumExp& other) {
    if (other.max_ == kNegInf) return;
    // Re-add the other accumulator as a single term.
    add(other.max_ + std::log(other.sum_ + other.comp_));
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_ + comp_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Axis {
  std::vector<double> h;      // raw energies a + b x at the nodes
  std::vector<double> log_w;  // log quadrature weights
};

Axis make_axis(const std::vector<Interval>& intervals, const Normalization& norm, int nodes) {
  const auto& rule = gauss_legendre(nodes);
  Axis ax;
  for (const auto& iv : intervals) {
    const double half = 0.5 * (iv.hi - iv.lo);
    const double mid = 0.5 * (iv.hi + iv.lo);
    for (int i = 0; i < nodes; ++i) {
      ax.h.push_back(norm.raw(mid + half * rule.nodes[i]));
      ax.log_w.push_back(std::log(rule.weights[i] * half));
    }
  }
  return ax;
}

// Nondegenerate core: every coordinate has its own window.
double log_prob_core(const Eigen::MatrixXd& b, const Normalization& norm,
                     const std::vector<std::vector<Interval>>& windows, int nodes) {
  const int d = static_cast<int>(b.rows());
  const double det = b.determinant();
  if (!(det >= 1e-12)) {
    throw NumericalError("covariance determinant " + std::to_string(det) + " below 1e-12");
  }
  const Eigen::MatrixXd q = b.inverse();
  std::vector<Axis> axes;
  for (int i = 0; i < d; ++i) axes.push_back(make_axis(windows[i], norm, nodes));
  LogSumExp acc;
  if (d == 2 && det < kConditionalDet) {
    // Nearly degenerate pair: integrate the first coordinate against the
    // conditional law of the second, which is a narrow normal.
    const double rho = b(0, 1);
    const double s = std::sqrt(det);
    const auto& a0 = axes[0];
    for (std::size_t i = 0; i < a0.h.size(); ++i) {
      const double x = a0.h[i];
      double cond = 0.0;
      for (const auto& iv : windows[1]) {
        const double lo = (norm.raw(iv.lo) - rho * x) / (s * std::numbers::sqrt2);
        const double hi = (norm.raw(iv.hi) - rho * x) / (s * std::numbers::sqrt2);
        cond += lo >= 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi)) : 0.5 * (std::erfc(-hi) - std::erfc(-lo));
      }
      if (cond > 0.0) acc.add(a0.log_w[i] - 0.5 * x * x + std::log(cond));
    }
    return acc.value() + std::log(norm.b_n) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  if (d == 1) {
    const auto& a0 = axes[0];
    for (std::size_t i = 0; i < a0.h.size(); ++i) acc.add(a0.log_w[i] - 0.5 * q(0, 0) * a0.h[i] * a0.h[i]);
  } else if (d == 2) {
    const auto& a0 = axes[0];
    const auto& a1 = axes[1];
    for (std::size_t i = 0; i < a0.h.size(); ++i) {
      const double x = a0.h[i];
      for (std::size_t j = 0; j < a1.h.size(); ++j) {
        const double y = a1.h[j];
        const double quad = q(0, 0) * x * x + 2.0 * q(0, 1) * x * y + q(1, 1) * y * y;
        acc.add(a0.log_w[i] + a1.log_w[j] - 0.5 * quad);
      }
    }
  } else if (d == 3) {
    const auto& a0 = axes[0];
    const auto& a1 = axes[1];
    const auto& a2 = axes[2];
    for (std::size_t i = 0; i < a0.h.size(); ++i) {
      const double x = a0.h[i];
      for (std::size_t j = 0; j < a1.h.size(); ++j) {
        const double y = a1.h[j];
        const double xy = q(0, 0) * x * x + 2.0 * q(0, 1) * x * y + q(1, 1) * y * y;
        const double lw = a0.log_w[i] + a1.log_w[j];
        for (std::size_t k = 0; k < a2.h.size(); ++k) {
          const double z = a2.h[k];
          const double quad = xy + 2.0 * (q(0, 2) * x + q(1, 2) * y) * z + q(2, 2) * z * z;
          acc.add(lw + a2.log_w[k] - 0.5 * quad);
        }
      }
    }
  } else {
    throw UsageError("joint window probabilities support 1 <= l <= 3");
  }
  return acc.value() + d * std::log(norm.b_n) - 0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
}

void check_cov_shape(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols() || b.rows() < 1 || b.rows() > 3) {
    throw UsageError("covariance must be square with 1 <= l <= 3");
  }
}

}  // namespace

double intensity_mu(const BorelWindow& window) {
  double s = 0.0;
  for (const auto& iv : window.intervals()) s += mu_interval(iv.lo, iv.hi);
  return s;
}

double intensity_cdf_in_window(double t, const BorelWindow& window) {
  double below = 0.0;
  for (const auto& iv : window.intervals()) {
    if (t <= iv.lo) break;
    below += mu_interval(iv.lo, std::min(t, iv.hi));
  }
  return std::clamp(below / intensity_mu(window), 0.0, 1.0);
}

Eigen::MatrixXd cov_matrix(const ModelSpec& spec, const std::vector<double>& upper_overlaps, int ell) {
  if (static_cast<int>(upper_overlaps.size()) != ell * (ell - 1) / 2) {
    throw UsageError("cov_matrix needs l(l-1)/2 overlaps");
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(ell, ell);
  std::size_t idx = 0;
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      b(i, j) = b(j, i) = spec.nu(upper_overlaps[idx++]);
    }
  }
  return b;
}

double gaussian_joint_window_prob(const Eigen::MatrixXd& b, const Normalization& norm, const BorelWindow& window,
                                  int nodes) {
  check_cov_shape(b);
  std::vector<std::vector<Interval>> windows(static_cast<std::size_t>(b.rows()), window.intervals());
  return std::exp(log_prob_core(b, norm, windows, nodes));
}

double log_joint_window_prob(const Eigen::MatrixXd& b, const Normalization& norm, const BorelWindow& window,
                             int nodes) {
  check_cov_shape(b);
  const int ell = static_cast<int>(b.rows());
  constexpr double kUnit = 1.0 - 1e-14;
  // Group coordinates tied by |b_ij| = 1; sign[j] = +-1 relative to the group head.
  std::vector<int> head(ell, -1), sign(ell, 1);
  for (int i = 0; i < ell; ++i) {
    if (head[i] != -1) continue;
    head[i] = i;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      for (int l = 0; l < ell; ++l) {
        if (head[l] == -1 && std::fabs(b(k, l)) >= kUnit) {
          head[l] = i;
          sign[l] = sign[k] * (b(k, l) > 0 ? 1 : -1);
          stack.push_back(l);
        }
      }
    }
  }
  std::vector<int> heads;
  std::vector<std::vector<Interval>> windows;
  for (int i = 0; i < ell; ++i) {
    if (head[i] != i) continue;
    std::vector<Interval> w = window.intervals();
    for (int j = 0; j < ell; ++j) {
      if (head[j] != i || j == i) continue;
      if (std::fabs(b(i, j) - sign[j]) > 1e-12) throw NumericalError("inconsistent perfectly correlated block");
      if (sign[j] < 0) {
        // H(s^j) = -H(s^i): x_j = -2a/b - x_i must also lie in A.
        const double shift = -2.0 * norm.a_n / norm.b_n;
        std::vector<Interval> reflected;
        for (auto it = window.intervals().rbegin(); it != window.intervals().rend(); ++it) {
          reflected.push_back({shift - it->hi, shift - it->lo});
        }
        w = intersect(w, reflected);
      }
    }
    if (w.empty()) return kNegInf;
    heads.push_back(i);
    windows.push_back(std::move(w));
  }
  Eigen::MatrixXd reduced(heads.size(), heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i) {
    for (std::size_t j = 0; j < heads.size(); ++j) reduced(i, j) = b(heads[i], heads[j]);
  }
  return log_prob_core(reduced, norm, windows, nodes);
}

double window_prob_erfc(const Normalization& norm, const BorelWindow& window) {
  double s = 0.0;
  for (const auto& iv : window.intervals()) {
    const double lo = norm.raw(iv.lo) / std::numbers::sqrt2;
    const double hi = norm.raw(iv.hi) / std::numbers::sqrt2;
    s += 0.5 * (lo >= 0.0 ? std::erfc(lo) - std::erfc(hi) : std::erf(hi) - std::erf(lo));
  }
  return s;
}

namespace {

void require_gaussian(const ModelSpec& spec) {
  if (spec.coupling() != CouplingKind::gaussian) {
    throw UsageError("semi-analytic moments are available for Gaussian models only");
  }
}

}  // namespace

double semianalytic_moment(const ModelSpec& spec, int n, double m, const BorelWindow& window, int ell, int nodes) {
  require_gaussian(spec);
  if (n < 1 || n > kSemianalyticMaxN) throw UsageError("semianalytic_moment needs 1 <= n <= 4000");
  if (!(m >= 0.0 && m <= n)) throw UsageError("semianalytic_moment needs 0 <= m <= n");
  const Normalization norm = Normalization::for_m(m);
  const double log_p1 = log_joint_window_prob(Eigen::MatrixXd::Identity(1, 1), norm, window, nodes);
  if (ell == 1) return std::exp(m * std::numbers::ln2 + log_p1);
  if (ell != 2) throw UsageError("semianalytic_moment supports l in {1,2}");

  std::map<double, double> cache;  // nu -> log P2
  LogSumExp acc;
  for (int k = 1; k <= n; ++k) {
    const double r = static_cast<double>(n - 2 * k) / n;
    const double nu = spec.nu(r);
    auto it = cache.find(nu);
    if (it == cache.end()) {
      Eigen::MatrixXd b(2, 2);
      b << 1.0, nu, nu, 1.0;
      it = cache.emplace(nu, log_joint_window_prob(b, norm, window, nodes)).first;
    }
    // p_N^2 * 2^n * C(n, k) ordered pairs at Hamming distance k.
    acc.add((2.0 * m - n) * std::numbers::ln2 + log_binomial(n, k) + it->second);
  }
  return std::exp(acc.value());
}

double semianalytic_ratio(const ModelSpec& spec, int n, double m, const BorelWindow& window, int nodes) {
  const double m1 = semianalytic_moment(spec, n, m, window, 1, nodes);
  const double m2 = semianalytic_moment(spec, n, m, window, 2, nodes);
  return m2 / (m1 * m1);
}

double semianalytic_third_moment(const ModelSpec& spec, int n, double m, const BorelWindow& window, int nodes) {
  require_gaussian(spec);
  if (n < 2 || n > kThirdMomentMaxN) throw UsageError("semianalytic_third_moment needs 2 <= n <= 60");
  if (!(m >= 0.0 && m <= n)) throw UsageError("semianalytic_third_moment needs 0 <= m <= n");
  const Normalization norm = Normalization::for_m(m);
  const double log_weight = (3.0 * m - 2.0 * n) * std::numbers::ln2;  // p_N^3 2^n

  // The window probability is symmetric under relabelling the three
  // configurations, so it depends on the sorted off-diagonal entries only.
  std::map<std::array<double, 3>, std::size_t> key_index;
  std::vector<std::array<double, 3>> keys;
  struct Term {
    double log_count;
    std::size_t key;
  };
  std::vector<Term> terms;
  for (int d12 = 1; d12 <= n; ++d12) {
    const int agree = n - d12;
    const double r12 = static_cast<double>(n - 2 * d12) / n;
    for (int n111 = 0; n111 <= agree; ++n111) {
      const int n11m = agree - n111;
      for (int n1m1 = 0; n1m1 <= d12; ++n1m1) {
        const int n1mm = d12 - n1m1;
        if (n11m + n1mm == 0) continue;  // s3 == s1
        if (n11m + n1m1 == 0) continue;  // s3 == s2
        const double r23 = static_cast<double>(n111 - n11m - n1m1 + n1mm) / n;
        const double r31 = static_cast<double>(n111 - n11m + n1m1 - n1mm) / n;
        std::array<double, 3> key{spec.nu(r12), spec.nu(r23), spec.nu(r31)};
        std::sort(key.begin(), key.end());
        auto [it, fresh] = key_index.emplace(key, keys.size());
        if (fresh) keys.push_back(key);
        terms.push_back({log_binomial(n, d12) + log_binomial(agree, n111) + log_binomial(d12, n1m1), it->second});
      }
    }
  }
  std::vector<double> log_prob(keys.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& k = keys[i];
    Eigen::Matrix3d b;
    b << 1.0, k[0], k[1], k[0], 1.0, k[2], k[1], k[2], 1.0;
    log_prob[i] = log_joint_window_prob(b, norm, window, nodes);
  }
  LogSumExp acc;
  for (const auto& t : terms) acc.add(log_weight + t.log_count + log_prob[t.key]);
  return std::exp(acc.value());
}

std::string_view to_string(ModelTag t) {
  switch (t) {
    case ModelTag::npp:
      return "npp";
    case ModelTag::sk:
      return "sk";
    case ModelTag::pspin_high:
      return "pspin_high";
  }
  return "?";
}

std::string_view to_string(Scaling s) { return s == Scaling::sqrt_n ? "sqrt" : "linear"; }

Scaling parse_scaling(std::string_view s) {
  if (s == "sqrt") return Scaling::sqrt_n;
  if (s == "linear") return Scaling::linear;
  throw UsageError("unknown scaling '" + std::string(s) + "' (sqrt|linear)");
}

std::optional<ModelTag> model_tag(const ModelSpec& spec) {
  const auto p = spec.single_p();
  if (!p) return std::nullopt;
  if (*p == 1) return ModelTag::npp;
  if (*p == 2) return ModelTag::sk;
  return ModelTag::pspin_high;
}

double scaled_m(Scaling s, double epsilon, int n) {
  return s == Scaling::sqrt_n ? epsilon * std::sqrt(static_cast<double>(n)) : epsilon * n;
}

LimitPrediction limit_constant(ModelTag model, Scaling scaling, double epsilon, int order, double c4) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw UsageError("epsilon must be finite and >= 0");
  if (order < 1 || order > 3) throw UsageError("limit_constant supports orders 1..3");
  if (!(c4 < 1.0 / 12.0)) throw UsageError("c4 must be < 1/12");
  LimitPrediction pred{model, scaling, epsilon, order, c4, 1.0};
  const double l2 = std::numbers::ln2 * std::numbers::ln2;
  switch (model) {
    case ModelTag::npp: {
      if (scaling == Scaling::linear && epsilon > 0.0) {
        throw UsageError("number partitioning limits assume limsup M/sqrt(N) < infinity; use sqrt scaling");
      }
      if (order == 3) throw UsageError("only boundedness of the third moment is known for number partitioning");
      const double e2 = epsilon * epsilon * l2;
      pred.value = order == 1 ? std::exp(-4.0 * c4 * e2) : std::exp(2.0 * e2 * (1.0 - 12.0 * c4));
      return pred;
    }
    case ModelTag::sk: {
      if (scaling == Scaling::sqrt_n) return pred;  // M = o(N): Poisson limit
      if (!(epsilon < kSkEpsilonMax)) {
        throw UsageError("SK limits assume limsup M/N = epsilon < 1/(8 log 2) = 0.180337");
      }
      if (order == 3) throw UsageError("only boundedness of the third moment is known for SK");
      const double e2 = epsilon * epsilon * l2;
      pred.value = order == 1 ? std::exp(-4.0 * c4 * e2)
                              : std::exp(-24.0 * c4 * e2) / std::sqrt(1.0 - 4.0 * epsilon * std::numbers::ln2);
      return pred;
    }
    case ModelTag::pspin_high: {
      if (c4 != 0.0) throw UsageError("non-Gaussian limits are available for p in {1,2} only");
      if (scaling == Scaling::linear && !(epsilon < kSkEpsilonMax)) {
        throw UsageError("p >= 3 limits assume limsup M/N < 1/(8 log 2) = 0.180337");
      }
      return pred;
    }
  }
  return pred;
}

}  // namespace remlab
