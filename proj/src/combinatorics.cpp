#include "remlab/combinatorics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "remlab/error.hpp"

namespace remlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// t log t with 0 log 0 = 0.
double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

int grid_index_or_throw(int n, double r) {
  auto k = OverlapGrid(n).index_of(r);
  if (!k) throw UsageError("overlap " + std::to_string(r) + " is not on the grid for n=" + std::to_string(n));
  return *k;
}

// Exact integer n_delta values, or nullopt-like flag when not realizable.
bool integral_ndelta(int n, const TripleOverlap& t, std::array<long, 4>& out) {
  const auto nd = solve_ndelta(n, t);
  for (int i = 0; i < 4; ++i) {
    const long v = std::lround(nd[i]);
    if (std::fabs(nd[i] - v) > 1e-6 || v < 0) return false;
    out[i] = v;
  }
  return true;
}

}  // namespace

bool admissible(const TripleOverlap& t, double slack) {
  return 1.0 + t.r12 + slack >= std::fabs(t.r23 + t.r31) && 1.0 - t.r12 + slack >= std::fabs(t.r23 - t.r31);
}

double rate_j(double x) {
  if (!(x >= -1.0 && x <= 1.0)) return kInf;
  return 0.5 * (xlogx(1.0 - x) + xlogx(1.0 + x));
}

double rate_j2(const TripleOverlap& t) {
  if (!admissible(t, 1e-12)) return kInf;
  const double x = t.r12, y = t.r23, z = t.r31;
  return 0.25 * (xlogx(1 + x + y + z) + xlogx(1 + x - y - z) + xlogx(1 - x + y - z) + xlogx(1 - x - y + z));
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -kInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

BigInt count_v2_exact(int n, double r) {
  if (n <= 0) throw UsageError("n must be positive");
  if (r < -1e-12) throw UsageError("count_v2_exact counts |R| = r; r must be non-negative");
  const int k = grid_index_or_throw(n, r);
  const BigInt cube = BigInt(1) << n;
  if (2 * k == n) return cube * binomial(n, k);
  return cube * 2 * binomial(n, k);
}

double log_count_v2(int n, double r) {
  if (r < -1e-12) throw UsageError("log_count_v2 counts |R| = r; r must be non-negative");
  const int k = grid_index_or_throw(n, r);
  const double base = n * std::numbers::ln2 + log_binomial(n, k);
  return 2 * k == n ? base : base + std::numbers::ln2;
}

std::array<double, 4> solve_ndelta(int n, const TripleOverlap& t) {
  const double q = n / 4.0;
  return {q * (1 + t.r12 + t.r23 + t.r31), q * (1 + t.r12 - t.r23 - t.r31), q * (1 - t.r12 - t.r23 + t.r31),
          q * (1 - t.r12 + t.r23 - t.r31)};
}

BigInt count_w3_exact(int n, const TripleOverlap& t) {
  if (n <= 0) throw UsageError("n must be positive");
  grid_index_or_throw(n, t.r12);
  grid_index_or_throw(n, t.r23);
  grid_index_or_throw(n, t.r31);
  std::array<long, 4> nd{};
  if (!integral_ndelta(n, t, nd)) return 0;
  // s2 agrees with s1 on nd[0] + nd[1] columns; s3 is then fixed by which of
  // those (and of the disagreeing columns) it agrees with s1 on.
  const int agree12 = static_cast<int>(nd[0] + nd[1]);
  const int disagree12 = static_cast<int>(nd[2] + nd[3]);
  return (BigInt(1) << n) * binomial(n, agree12) * binomial(agree12, static_cast<int>(nd[0])) *
         binomial(disagree12, static_cast<int>(nd[2]));
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::concentrated:
      return "concentrated";
    case Regime::polylog:
      return "polylog";
    case Regime::empty:
      return "empty";
  }
  return "?";
}

namespace {

double empty_margin(int n, double c2, EmptyThreshold empty) {
  return c2 * (empty == EmptyThreshold::literal_log2 ? std::numbers::ln2 : std::log(static_cast<double>(n)));
}

}  // namespace

RegimeLabel classify_pair_regime(int n, double m, double r, double c1, double c2, EmptyThreshold empty) {
  if (n < 2) throw UsageError("classify_pair_regime requires n >= 2");
  const double nj = n * rate_j(r);
  const double base = m * std::numbers::ln2;
  const double logn = std::log(static_cast<double>(n));
  Regime label = Regime::polylog;
  if (nj <= base - c1 * logn) {
    label = Regime::concentrated;
  } else if (nj > base + empty_margin(n, c2, empty)) {
    label = Regime::empty;
  }
  return {label, c1, c2};
}

RegimeLabel classify_triple_regime(int n, double m, const TripleOverlap& t, double c1_triple, double c2_triple,
                                   EmptyThreshold empty, double c1_pair) {
  if (n < 2) throw UsageError("classify_triple_regime requires n >= 2");
  const double nj2 = n * rate_j2(t);
  if (!std::isfinite(nj2)) return {Regime::empty, c1_triple, c2_triple};
  const double logn = std::log(static_cast<double>(n));
  const double base = m * std::numbers::ln2 + n * rate_j(t.r12);
  const bool pair_ok = n * rate_j(t.r12) <= m * std::numbers::ln2 - c1_pair * logn;
  Regime label = Regime::polylog;
  if (pair_ok && nj2 <= base - c1_triple * logn) {
    label = Regime::concentrated;
  } else if (nj2 > base + empty_margin(n, c2_triple, empty)) {
    label = Regime::empty;
  }
  return {label, c1_triple, c2_triple};
}

PairCensus brute_force_pair_census(int n) {
  if (n <= 0 || n > kBruteForceMaxN) {
    throw UsageError("brute-force census supports 1 <= n <= " + std::to_string(kBruteForceMaxN));
  }
  const std::uint32_t total = std::uint32_t{1} << n;
  std::vector<std::uint64_t> by_distance(static_cast<std::size_t>(n) + 1, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(by_distance.size(), 0);
#pragma omp for schedule(static)
    for (long long a = 0; a < static_cast<long long>(total); ++a) {
      for (std::uint32_t b = 0; b < total; ++b) ++local[std::popcount(static_cast<std::uint32_t>(a) ^ b)];
    }
#pragma omp critical
    for (std::size_t d = 0; d < local.size(); ++d) by_distance[d] += local[d];
  }
  PairCensus census;
  for (int d = 0; d <= n; ++d) {
    // |R| = 1 - 2 min(d, n-d) / n.
    census[std::min(d, n - d)] += by_distance[d];
  }
  return census;
}

TripleCensus brute_force_triple_census(int n) {
  if (n <= 0 || n > kBruteForceMaxN) {
    throw UsageError("brute-force census supports 1 <= n <= " + std::to_string(kBruteForceMaxN));
  }
  // Translation invariance: s1 = 0, then every (s2, s3) stands for 2^n triples.
  const std::uint32_t total = std::uint32_t{1} << n;
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  std::vector<std::uint64_t> cells(side * side * side, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(cells.size(), 0);
#pragma omp for schedule(static)
    for (long long a = 0; a < static_cast<long long>(total); ++a) {
      const auto sa = static_cast<std::uint32_t>(a);
      const std::size_t d12 = static_cast<std::size_t>(std::popcount(sa));
      for (std::uint32_t b = 0; b < total; ++b) {
        const auto d23 = static_cast<std::size_t>(std::popcount(sa ^ b));
        const auto d31 = static_cast<std::size_t>(std::popcount(b));
        ++local[(d12 * side + d23) * side + d31];
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += local[i];
  }
  TripleCensus census;
  const BigInt scale = BigInt(1) << n;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] == 0) continue;
    const int d31 = static_cast<int>(i % side);
    const int d23 = static_cast<int>((i / side) % side);
    const int d12 = static_cast<int>(i / (side * side));
    census[{d12, d23, d31}] = BigInt(cells[i]) * scale;
  }
  return census;
}

std::map<int, std::uint64_t> cloud_pair_census(const Cloud& cloud) {
  std::map<int, std::uint64_t> census;
  const auto& xs = cloud.members;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) census[hamming(xs[i], xs[j])] += 2;
  }
  return census;
}

}  // namespace remlab
