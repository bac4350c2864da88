#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string_view>

#include "remlab/core.hpp"

namespace remlab {

using BigInt = boost::multiprecision::cpp_int;

// Pairwise overlaps (R12, R23, R31) of three configurations.
struct TripleOverlap {
  double r12 = 0.0;
  double r23 = 0.0;
  double r31 = 0.0;
};

// Realizability: 1 + r12 >= |r23 + r31| and 1 - r12 >= |r23 - r31|.
bool admissible(const TripleOverlap& t, double slack = 1e-12);

// J(x) = (1-x)/2 log(1-x) + (1+x)/2 log(1+x) on [-1,1], +inf outside; 0 log 0 = 0.
double rate_j(double x);

// Three-overlap analogue of rate_j; +inf off the admissible set.
double rate_j2(const TripleOverlap& t);

// log C(n, k) via lgamma.
double log_binomial(int n, int k);
BigInt binomial(int n, int k);

// Ordered pairs (s1, s2) in S_N^2 with |R(s1,s2)| == r, exactly.
// Unsigned overlap, matching the max-|R| sets V_{N,2}. r must lie on the grid.
BigInt count_v2_exact(int n, double r);

// log of count_v2_exact, usable beyond big-integer range.
double log_count_v2(int n, double r);

// Column-type counts (n_{+++}, n_{++-}, n_{+-+}, n_{+--}) of the 3 x N matrix
// with rows s1, s2, s3 after gauging s1 to all +1. They sum to n.
std::array<double, 4> solve_ndelta(int n, const TripleOverlap& t);

// Ordered triples with signed overlaps exactly (R12, R23, R31).
// Zero when some n_delta is negative or non-integral.
BigInt count_w3_exact(int n, const TripleOverlap& t);

enum class Regime { concentrated, polylog, empty };
std::string_view to_string(Regime r);

// The upper threshold of the "empty" case is written with log 2 where the
// neighbouring case uses log N; both readings are available.
enum class EmptyThreshold { literal_log2, log_n };

struct RegimeLabel {
  Regime label = Regime::concentrated;
  double c1 = 0.0;
  double c2 = 0.0;
};

inline constexpr double kDefaultC1 = 0.6;
inline constexpr double kDefaultC2 = 1.6;
inline constexpr double kDefaultC1Triple = 1.1;
inline constexpr double kDefaultC2Triple = 1.6;

// Pair census regime: compares n J(r) with m log2 -/+ c log n.
RegimeLabel classify_pair_regime(int n, double m, double r, double c1 = kDefaultC1, double c2 = kDefaultC2,
                                 EmptyThreshold empty = EmptyThreshold::literal_log2);

// Triple census regime: compares n J2(t) with m log2 + n J(r12) -/+ c log n.
// The concentrated label also requires the pair condition on r12.
RegimeLabel classify_triple_regime(int n, double m, const TripleOverlap& t, double c1_triple = kDefaultC1Triple,
                                   double c2_triple = kDefaultC2Triple,
                                   EmptyThreshold empty = EmptyThreshold::literal_log2, double c1_pair = kDefaultC1);

// Keyed by grid index k (overlap 1 - 2k/n).
using PairCensus = std::map<int, BigInt>;

inline constexpr int kBruteForceMaxN = 14;

// Exhaustive count of ordered pairs of S_N by |R| (key: k with |R| = 1 - 2k/n,
// k <= n/2). Total mass 4^n.
PairCensus brute_force_pair_census(int n);

// Keyed by Hamming distances (d12, d23, d31); signed overlap 1 - 2d/n.
using TripleCensus = std::map<std::array<int, 3>, BigInt>;

// Exhaustive count of ordered triples of S_N by signed overlaps, identical
// configurations included. Total mass 8^n.
TripleCensus brute_force_triple_census(int n);

// Ordered pairs of distinct cloud members by signed overlap (key: grid index k).
// Total mass |X|(|X|-1).
std::map<int, std::uint64_t> cloud_pair_census(const Cloud& cloud);

}  // namespace remlab
