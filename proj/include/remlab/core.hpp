#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "remlab/rng.hpp"

namespace remlab {

// A point of the hypercube {-1,+1}^N, bit-packed: bit i set <=> spin i is +1.
// Bits past index N-1 are always zero.
class SpinConfig {
 public:
  // All spins -1.
  explicit SpinConfig(int n);

  static SpinConfig from_spins(std::span<const int> spins);
  static SpinConfig from_words(int n, std::vector<std::uint64_t> words);
  static SpinConfig uniform(int n, Rng& rng);

  int size() const { return n_; }
  int spin(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U ? 1 : -1; }
  void set_spin(int i, int s);
  SpinConfig complement() const;

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  // Fixed total order: dimension first, then words from the most significant.
  friend std::strong_ordering operator<=>(const SpinConfig& a, const SpinConfig& b);

 private:
  SpinConfig(int n, std::vector<std::uint64_t> words) : n_(n), words_(std::move(words)) {}
  void clear_tail();

  int n_;
  std::vector<std::uint64_t> words_;
};

struct SpinConfigHash {
  std::size_t operator()(const SpinConfig& s) const;
};

// Number of disagreeing spins.
int hamming(const SpinConfig& a, const SpinConfig& b);

// R = 1 - 2 d_H / N, formed from the integer distance so it lands exactly on
// the overlap grid.
double overlap(const SpinConfig& a, const SpinConfig& b);

// The N+1 admissible overlaps 1 - 2k/N, k = 0..N (strictly decreasing).
class OverlapGrid {
 public:
  explicit OverlapGrid(int n);

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) + 1; }
  double value(int k) const { return 1.0 - 2.0 * k / n_; }
  std::vector<double> values() const;
  // Index k with value(k) == r up to 1e-9, or nullopt if r is off the grid.
  std::optional<int> index_of(double r) const;

 private:
  int n_;
};

enum class CloudMode { exact, large_n, automatic };

// Random subset X of the hypercube: each configuration kept independently with
// probability p_N = 2^m / 2^n. Members are distinct and sorted.
struct Cloud {
  int n = 0;
  double m = 0.0;
  std::vector<SpinConfig> members;

  std::size_t size() const { return members.size(); }
  double inclusion_probability() const;
};

// Largest n for exhaustive Bernoulli sampling over all 2^n configurations.
inline constexpr int kExactCloudMaxN = 24;

// exact: one Bernoulli(p_N) trial per configuration (n <= 24).
// large_n: |X| ~ Poisson(2^m), then that many distinct uniform configurations.
// automatic: exact for n <= 24, large_n above.
// A cloud with fewer than two members is resampled once, then rejected.
Cloud sample_cloud(int n, double m, Rng& rng, CloudMode mode = CloudMode::automatic);

// Cloud from explicit members (sorted and deduplicated check enforced).
Cloud make_cloud(int n, double m, std::vector<SpinConfig> members);

// Almost-sure bound on the largest |overlap| inside a cloud,
// min(1, 4 sqrt(m log2 / n + log n / n)).
double delta_n(int n, double m);

}  // namespace remlab
