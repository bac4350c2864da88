#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace remlab {

// All sampling goes through this engine; its output sequence is fixed by the
// standard, so a seed pins every stream bit for bit.
using Rng = std::mt19937_64;

// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Seed for an independent sub-stream, e.g. derive_seed(seed, "replica", r).
// Depends only on its arguments, never on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return Rng(derive_seed(seed, tag, index));
}

// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform on the open interval (0,1); safe to feed to quantile functions.
inline double uniform_open01(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

// Standard normal quantile, Wichura's AS241 (relative accuracy ~1e-16).
double normal_quantile(double p);

// One uniform per draw, through normal_quantile.
inline double standard_normal(Rng& rng) { return normal_quantile(uniform_open01(rng)); }

}  // namespace remlab
