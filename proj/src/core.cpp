#include "remlab/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <unordered_set>

#include "remlab/error.hpp"

namespace remlab {
namespace {

std::size_t word_count(int n) { return static_cast<std::size_t>((n + 63) / 64); }

void require_same_dim(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() != b.size()) {
    throw UsageError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

SpinConfig::SpinConfig(int n) : n_(n), words_(word_count(n), 0) {
  if (n <= 0) throw UsageError("spin configuration dimension must be positive");
}

SpinConfig SpinConfig::from_spins(std::span<const int> spins) {
  SpinConfig s(static_cast<int>(spins.size()));
  for (std::size_t i = 0; i < spins.size(); ++i) s.set_spin(static_cast<int>(i), spins[i]);
  return s;
}

SpinConfig SpinConfig::from_words(int n, std::vector<std::uint64_t> words) {
  if (n <= 0) throw UsageError("spin configuration dimension must be positive");
  if (words.size() != word_count(n)) throw UsageError("word count does not match dimension");
  SpinConfig s(n, std::move(words));
  s.clear_tail();
  return s;
}

SpinConfig SpinConfig::uniform(int n, Rng& rng) {
  SpinConfig s(n);
  for (auto& w : s.words_) w = rng();
  s.clear_tail();
  return s;
}

void SpinConfig::set_spin(int i, int s) {
  if (i < 0 || i >= n_) throw UsageError("spin index out of range");
  if (s != 1 && s != -1) throw UsageError("spin value must be +1 or -1");
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (s == 1) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

SpinConfig SpinConfig::complement() const {
  SpinConfig c(*this);
  for (auto& w : c.words_) w = ~w;
  c.clear_tail();
  return c;
}

void SpinConfig::clear_tail() {
  const int rem = n_ & 63;
  if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

std::strong_ordering operator<=>(const SpinConfig& a, const SpinConfig& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  for (std::size_t i = a.words_.size(); i-- > 0;) {
    if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t SpinConfigHash::operator()(const SpinConfig& s) const {
  std::uint64_t h = static_cast<std::uint64_t>(s.size());
  for (auto w : s.words()) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

int hamming(const SpinConfig& a, const SpinConfig& b) {
  require_same_dim(a, b);
  const auto wa = a.words();
  const auto wb = b.words();
  int d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) d += std::popcount(wa[i] ^ wb[i]);
  return d;
}

double overlap(const SpinConfig& a, const SpinConfig& b) {
  const int d = hamming(a, b);
  return 1.0 - 2.0 * d / a.size();
}

OverlapGrid::OverlapGrid(int n) : n_(n) {
  if (n <= 0) throw UsageError("overlap grid dimension must be positive");
}

std::vector<double> OverlapGrid::values() const {
  std::vector<double> v(size());
  for (int k = 0; k <= n_; ++k) v[k] = value(k);
  return v;
}

std::optional<int> OverlapGrid::index_of(double r) const {
  if (!std::isfinite(r)) return std::nullopt;
  const double kf = n_ * (1.0 - r) / 2.0;
  const long k = std::lround(kf);
  if (k < 0 || k > n_) return std::nullopt;
  if (std::fabs(value(static_cast<int>(k)) - r) > 1e-9) return std::nullopt;
  return static_cast<int>(k);
}

double Cloud::inclusion_probability() const { return std::exp2(m - n); }

namespace {

void check_cloud_args(int n, double m) {
  if (n <= 0) throw UsageError("cloud dimension n must be positive");
  if (!(m >= 0.0) || m > n) throw UsageError("cloud exponent m must satisfy 0 <= m <= n");
}

Cloud sample_exact(int n, double m, Rng& rng) {
  if (n > kExactCloudMaxN) {
    throw UsageError("exact cloud sampling supports n <= " + std::to_string(kExactCloudMaxN));
  }
  const double p = std::exp2(m - n);
  Cloud cloud{n, m, {}};
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < total; ++x) {
    if (uniform01(rng) < p) cloud.members.push_back(SpinConfig::from_words(n, {x}));
  }
  // Enumeration order is already increasing in the canonical order.
  return cloud;
}

Cloud sample_large_n(int n, double m, Rng& rng) {
  if (m > 26.0) throw UsageError("large_n cloud sampling supports m <= 26");
  std::poisson_distribution<long long> size_dist(std::exp2(m));
  const long long k = size_dist(rng);
  if (n < 63 && static_cast<double>(k) > std::exp2(n)) {
    throw NumericalError("requested cloud larger than the hypercube");
  }
  std::unordered_set<SpinConfig, SpinConfigHash> seen;
  seen.reserve(static_cast<std::size_t>(k) * 2);
  Cloud cloud{n, m, {}};
  cloud.members.reserve(static_cast<std::size_t>(k));
  while (static_cast<long long>(cloud.members.size()) < k) {
    SpinConfig s = SpinConfig::uniform(n, rng);
    if (seen.insert(s).second) cloud.members.push_back(std::move(s));
  }
  std::sort(cloud.members.begin(), cloud.members.end());
  return cloud;
}

}  // namespace

Cloud sample_cloud(int n, double m, Rng& rng, CloudMode mode) {
  check_cloud_args(n, m);
  if (mode == CloudMode::automatic) mode = n <= kExactCloudMaxN ? CloudMode::exact : CloudMode::large_n;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Cloud c = mode == CloudMode::exact ? sample_exact(n, m, rng) : sample_large_n(n, m, rng);
    if (c.size() >= 2) return c;
  }
  throw NumericalError("random cloud has fewer than 2 members after resampling (n=" + std::to_string(n) +
                       ", m=" + std::to_string(m) + ")");
}

Cloud make_cloud(int n, double m, std::vector<SpinConfig> members) {
  for (const auto& s : members) {
    if (s.size() != n) throw UsageError("cloud member has wrong dimension");
  }
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw UsageError("cloud members must be distinct");
  }
  return Cloud{n, m, std::move(members)};
}

double delta_n(int n, double m) {
  if (n < 2) throw UsageError("delta_n requires n >= 2");
  const double raw = 4.0 * std::sqrt(m * std::numbers::ln2 / n + std::log(static_cast<double>(n)) / n);
  return std::min(1.0, raw);
}

}  // namespace remlab
