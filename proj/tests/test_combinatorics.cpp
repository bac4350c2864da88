#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "remlab/combinatorics.hpp"
#include "remlab/error.hpp"

using namespace remlab;

TEST(RateJ, Examples) {
  EXPECT_EQ(rate_j(0.0), 0.0);
  EXPECT_NEAR(rate_j(1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(rate_j(-1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(rate_j(0.5), 0.130812, 5e-7);
  EXPECT_TRUE(std::isinf(rate_j(1.0 + 1e-9)));
  // Series x^2/2 + x^4/12 + x^6/30 + x^8/56 + ...
  double series = 0.0;
  for (int k = 1; k < 60; ++k) series += std::pow(0.5, 2 * k) / (2.0 * k * (2 * k - 1));
  EXPECT_NEAR(rate_j(0.5), series, 1e-14);
}

TEST(RateJ, EvenConvexAboveQuadratic) {
  for (int i = -200; i <= 200; ++i) {
    const double x = i / 200.0;
    EXPECT_EQ(rate_j(x), rate_j(-x));
    EXPECT_GE(rate_j(x), x * x / 2 - 1e-15);
    EXPECT_NEAR(rate_j(x), static_cast<double>(oracle::rate_j(x)), 1e-14);
    if (i > -200 && i < 200) {
      const double h = 1.0 / 200.0;
      EXPECT_GE(rate_j(x - h) + rate_j(x + h) - 2 * rate_j(x), -1e-15);
    }
  }
}

TEST(RateJ2, Examples) {
  EXPECT_EQ(rate_j2({0, 0, 0}), 0.0);
  EXPECT_NEAR(rate_j2({0.5, 0, 0}), rate_j(0.5), 1e-15);
  EXPECT_TRUE(std::isinf(rate_j2({1.0, 0.0, 0.5})));

  using Dec = boost::multiprecision::cpp_dec_float_50;
  const Dec x("0.5"), y("0.5"), z("0.5");
  auto term = [](const Dec& u) { return u == 0 ? Dec(0) : u * log(u) / 4; };
  const Dec ref = term(1 + x + y + z) + term(1 + x - y - z) + term(1 - x + y - z) + term(1 - x - y + z);
  EXPECT_NEAR(rate_j2({0.5, 0.5, 0.5}), ref.convert_to<double>(), 1e-15);
}

TEST(RateJ2, PermutationSymmetricAndReduces) {
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      for (int k = -10; k <= 10; ++k) {
        const double x = i / 10.0, y = j / 10.0, z = k / 10.0;
        const double v = rate_j2({x, y, z});
        for (const TripleOverlap& p : {TripleOverlap{y, x, z}, TripleOverlap{z, y, x}, TripleOverlap{x, z, y},
                                       TripleOverlap{y, z, x}, TripleOverlap{z, x, y}}) {
          const double w = rate_j2(p);
          if (std::isinf(v)) {
            EXPECT_TRUE(std::isinf(w));
          } else {
            EXPECT_NEAR(v, w, 1e-14);
          }
        }
      }
    }
    EXPECT_NEAR(rate_j2({i / 10.0, 0, 0}), rate_j(i / 10.0), 1e-15);
  }
}

TEST(CountV2, Examples) {
  EXPECT_EQ(count_v2_exact(4, 0.5), 128);
  EXPECT_EQ(count_v2_exact(4, 1.0), 32);
  EXPECT_EQ(count_v2_exact(2, 0.0), 8);
  EXPECT_THROW(count_v2_exact(4, 0.3), UsageError);
}

TEST(CountV2, MatchesBruteForceAndSumsTo4n) {
  for (int n = 1; n <= 8; ++n) {
    const auto ref = oracle::pairs_by_abs_dot(n);
    BigInt total = 0;
    for (int k = 0; 2 * k <= n; ++k) {
      const BigInt c = count_v2_exact(n, 1.0 - 2.0 * k / n);
      total += c;
      const auto it = ref.find(n - 2 * k);
      EXPECT_EQ(c, it == ref.end() ? BigInt(0) : it->second) << "n=" << n << " k=" << k;
    }
    EXPECT_EQ(total, BigInt(1) << (2 * n));
  }
  for (int n = 9; n <= 10; ++n) {
    BigInt total = 0;
    for (int k = 0; 2 * k <= n; ++k) total += count_v2_exact(n, 1.0 - 2.0 * k / n);
    EXPECT_EQ(total, BigInt(1) << (2 * n));
  }
}

TEST(CountV2, LogCountAgrees) {
  for (int n : {10, 100, 800}) {
    for (int k = 0; 2 * k <= n; k += std::max(1, n / 20)) {
      const double r = 1.0 - 2.0 * k / n;
      const double exact = std::log(count_v2_exact(n, r).convert_to<long double>());
      EXPECT_NEAR(log_count_v2(n, r), static_cast<double>(exact), 1e-9 * std::max(1.0, exact));
    }
  }
}

TEST(CountV2, LowerTailBound) {
  // |U_{N,2}| / 4^N >= 1 - 2 exp(-n R^2 / 8) once n R^2 >= 64.
  for (int n : {64, 128, 256}) {
    for (int k = 0; 2 * k <= n; ++k) {
      const double r = 1.0 - 2.0 * k / n;
      if (n * r * r < 64) continue;
      BigInt u = 0;
      for (int j = k; 2 * j <= n; ++j) u += count_v2_exact(n, 1.0 - 2.0 * j / n);
      const double frac = static_cast<double>(u.convert_to<long double>() / std::pow(4.0L, n));
      EXPECT_GE(frac, 1.0 - 2.0 * std::exp(-n * r * r / 8.0)) << n << " " << r;
    }
  }
}

TEST(CountV2, StirlingConstant) {
  const double r = 0.5;
  std::vector<double> c;
  for (int n : {200, 400, 800}) {
    c.push_back(std::exp(log_count_v2(n, r) - 2.0 * n * std::numbers::ln2 + 0.5 * std::log(double(n)) + n * rate_j(r)));
  }
  EXPECT_NEAR(c[1] / c[0], 1.0, 0.15);
  EXPECT_NEAR(c[2] / c[1], 1.0, 0.15);
}

TEST(SolveNdelta, Examples) {
  const auto a = solve_ndelta(4, {0, 0, 0});
  EXPECT_EQ(a, (std::array<double, 4>{1, 1, 1, 1}));
  EXPECT_EQ(solve_ndelta(4, {1, 1, 1}), (std::array<double, 4>{4, 0, 0, 0}));
  // Direct substitution into the four formulas.
  EXPECT_EQ(solve_ndelta(8, {0.5, 0.5, 0}), (std::array<double, 4>{4, 2, 0, 2}));
}

TEST(SolveNdelta, SumAndSignMatchAdmissibility) {
  const int n = 12;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) {
        const TripleOverlap t{1 - 2.0 * i / n, 1 - 2.0 * j / n, 1 - 2.0 * k / n};
        const auto d = solve_ndelta(n, t);
        EXPECT_NEAR(d[0] + d[1] + d[2] + d[3], n, 1e-12);
        const bool nonneg = d[0] >= -1e-12 && d[1] >= -1e-12 && d[2] >= -1e-12 && d[3] >= -1e-12;
        EXPECT_EQ(nonneg, admissible(t));
      }
    }
  }
}

TEST(CountW3, Examples) {
  EXPECT_EQ(count_w3_exact(4, {0, 0, 0}), 384);
  EXPECT_EQ(count_w3_exact(4, {1, 1, 1}), 16);
  EXPECT_EQ(count_w3_exact(4, {1, 0, 0.5}), 0);
  // n_delta = (1, 1, 0, 1): 8 * 3!.
  EXPECT_EQ(count_w3_exact(3, {1.0 / 3, 1.0 / 3, -1.0 / 3}), 48);
  // n_delta has a half-integer entry.
  EXPECT_EQ(count_w3_exact(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}), 0);
}

TEST(CountW3, MatchesNaiveTripleLoop) {
  for (int n = 1; n <= 6; ++n) {
    const auto ref = oracle::triples_by_dot(n);
    BigInt total = 0;
    for (int a = -n; a <= n; a += 2) {
      for (int b = -n; b <= n; b += 2) {
        for (int c = -n; c <= n; c += 2) {
          const BigInt v = count_w3_exact(n, {double(a) / n, double(b) / n, double(c) / n});
          total += v;
          const auto it = ref.find({a, b, c});
          EXPECT_EQ(v, it == ref.end() ? BigInt(0) : it->second) << n << ": " << a << " " << b << " " << c;
        }
      }
    }
    EXPECT_EQ(total, BigInt(1) << (3 * n));
  }
}

TEST(CountW3, SumsTo8n) {
  for (int n = 7; n <= 10; ++n) {
    BigInt total = 0;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        for (int c = 0; c <= n; ++c) total += count_w3_exact(n, {1 - 2.0 * a / n, 1 - 2.0 * b / n, 1 - 2.0 * c / n});
      }
    }
    EXPECT_EQ(total, BigInt(1) << (3 * n));
  }
}

TEST(PairCensus, Examples) {
  const PairCensus c2 = brute_force_pair_census(2);
  EXPECT_EQ(c2.at(0), 8);  // |R| = 1
  EXPECT_EQ(c2.at(1), 8);  // |R| = 0
  const PairCensus c1 = brute_force_pair_census(1);
  ASSERT_EQ(c1.size(), 1u);
  EXPECT_EQ(c1.at(0), 4);
  for (const auto& [k, v] : brute_force_pair_census(4)) EXPECT_EQ(v, count_v2_exact(4, 1.0 - 2.0 * k / 4));
  EXPECT_THROW(brute_force_pair_census(15), UsageError);
}

TEST(TripleCensus, MatchesNaiveTripleLoop) {
  for (int n = 1; n <= 6; ++n) {
    const auto ref = oracle::triples_by_dot(n);
    const auto got = brute_force_triple_census(n);
    std::size_t cells = 0;
    for (const auto& [key, v] : ref) {
      const std::array<int, 3> d{(n - key[0]) / 2, (n - key[1]) / 2, (n - key[2]) / 2};
      ASSERT_TRUE(got.count(d));
      EXPECT_EQ(got.at(d), v);
      ++cells;
    }
    EXPECT_EQ(got.size(), cells);
  }
}

TEST(CloudPairCensus, Examples) {
  const SpinConfig a = SpinConfig::from_spins(std::vector<int>{1, -1, 1, 1, -1});
  const Cloud c = make_cloud(5, 1, {a, a.complement()});
  const auto census = cloud_pair_census(c);
  ASSERT_EQ(census.size(), 1u);
  EXPECT_EQ(census.at(5), 2u);  // Hamming distance n, R = -1

  Rng rng(123);
  const Cloud big = sample_cloud(20, 8, rng, CloudMode::exact);
  std::uint64_t mass = 0;
  for (const auto& [d, v] : cloud_pair_census(big)) mass += v;
  EXPECT_EQ(mass, big.size() * (big.size() - 1));
  EXPECT_NEAR(double(mass) / (256.0 * 255.0), 1.0, 0.3);
}

TEST(CloudPairCensus, MeanMatchesExactCounts) {
  const int n = 20, seeds = 200;
  const double m = 8;
  std::vector<double> sum(n + 1, 0.0), sum2(n + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    Rng rng = make_rng(5, "census", s);
    const auto census = cloud_pair_census(sample_cloud(n, m, rng, CloudMode::exact));
    for (int d = 0; d <= n; ++d) {
      const auto it = census.find(d);
      const double v = it == census.end() ? 0.0 : double(it->second);
      sum[d] += v;
      sum2[d] += v * v;
    }
  }
  const double p = std::ldexp(1.0, int(m) - n);
  int checked = 0;
  for (int d = 1; d <= n; ++d) {
    const double expect = p * p * std::ldexp(1.0, n) * oracle::choose(n, d).convert_to<double>();
    if (expect < 50) continue;
    const double mean = sum[d] / seeds;
    const double se = std::sqrt((sum2[d] / seeds - mean * mean) / (seeds - 1));
    EXPECT_NEAR(mean, expect, 3 * se + 1e-9) << "d=" << d;
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(PairRegime, Examples) {
  const double ln2 = std::numbers::ln2;
  // Direct evaluation: N J(0.02) = 2.0001 exceeds M log 2 - c1 log N = 1.405.
  EXPECT_NEAR(10000 * rate_j(0.02), 2.0001, 1e-3);
  EXPECT_NEAR(10 * ln2 - 0.6 * std::log(10000.0), 1.405, 1e-3);
  EXPECT_EQ(classify_pair_regime(10000, 10, 0.02).label, Regime::polylog);
  EXPECT_EQ(classify_pair_regime(10000, 10, 0.01).label, Regime::concentrated);

  EXPECT_EQ(classify_pair_regime(100, 10, 0.0).label, Regime::concentrated);
  EXPECT_EQ(classify_pair_regime(2, 1, 0.0).label, Regime::concentrated);
  // J(0) = 0 is not enough when m log 2 < c1 log n.
  EXPECT_EQ(classify_pair_regime(10000, 1, 0.0).label, Regime::polylog);

  EXPECT_NEAR(100 * rate_j(0.9), 49.46, 0.01);
  EXPECT_EQ(classify_pair_regime(100, 10, 0.9).label, Regime::empty);
  const RegimeLabel l = classify_pair_regime(100, 10, 0.9, 0.7, 1.8);
  EXPECT_EQ(l.c1, 0.7);
  EXPECT_EQ(l.c2, 1.8);
}

TEST(PairRegime, EmptyThresholdVariants) {
  // n J(r) between m log2 + c2 log 2 and m log2 + c2 log n.
  const int n = 100;
  const double m = 10;
  const double lo = m * std::numbers::ln2 + 1.6 * std::numbers::ln2;
  const double hi = m * std::numbers::ln2 + 1.6 * std::log(double(n));
  bool found = false;
  for (int k = 0; 2 * k <= n; ++k) {
    const double r = 1.0 - 2.0 * k / n;
    const double nj = n * rate_j(r);
    if (nj > lo && nj <= hi) {
      EXPECT_EQ(classify_pair_regime(n, m, r).label, Regime::empty);
      EXPECT_EQ(classify_pair_regime(n, m, r, 0.6, 1.6, EmptyThreshold::log_n).label, Regime::polylog);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(TripleRegime, Examples) {
  EXPECT_EQ(classify_triple_regime(100, 10, {0, 0, 0}).label, Regime::concentrated);
  EXPECT_EQ(classify_triple_regime(100, 10, {1.0, 0.0, 0.5}).label, Regime::empty);

  const TripleOverlap t{0.1, 0.1, 0.1};
  const double lhs = 100 * rate_j2(t);
  const double base = 10 * std::numbers::ln2 + 100 * rate_j(0.1);
  const double logn = std::log(100.0);
  Regime expect = Regime::polylog;
  if (100 * rate_j(0.1) <= 10 * std::numbers::ln2 - 0.6 * logn && lhs <= base - 1.1 * logn) {
    expect = Regime::concentrated;
  } else if (lhs > base + 1.6 * std::numbers::ln2) {
    expect = Regime::empty;
  }
  EXPECT_EQ(classify_triple_regime(100, 10, t).label, expect);
}
