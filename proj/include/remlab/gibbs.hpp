#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "remlab/core.hpp"
#include "remlab/models.hpp"

namespace remlab {

// sqrt(2 log 2): the low-temperature threshold for beta.
inline constexpr double kBetaCritical = 1.1774100225154747;

struct GibbsWeights {
  std::vector<double> weights;  // non-increasing, sums to 1
  double beta = 0.0;
  double m_pd = 0.0;  // sqrt(2 log 2) / beta

  // sum_a w_a^k
  double power_sum(int k) const;
};

// w proportional to exp(-beta H'), computed after a max shift.
GibbsWeights gibbs_weights(std::span<const double> values, double beta);

// E sum_a w_a^k under PD(m): prod_{j=1}^{k-1} (j - m) / (k-1)!.
double pd_moment(double m, int k);

struct PdSimulation {
  double m = 0.0;
  std::size_t atoms = 0;
  std::size_t trials = 0;
  double s2 = 0.0, s2_se = 0.0;  // E sum w^2
  double s3 = 0.0, s3_se = 0.0;  // E sum w^3
  // Mean of m/(1-m) x_min^{1-m} / sum x: expected mass lost to truncation
  // relative to the retained sum.
  double truncation_bound = 0.0;
};

inline constexpr std::size_t kPdAtoms = 10000;

// Normalized atoms x_k = Gamma_k^{-1/m} of a Poisson process with intensity
// m x^{-m-1} dx, truncated to the `atoms` largest.
PdSimulation simulate_pd(double m, std::size_t atoms, std::size_t trials, std::uint64_t seed);

inline constexpr double kPdBandHalfWidth = 0.08;

struct PdCompareReport {
  double beta = 0.0;
  double m_pd = 0.0;
  std::size_t replicas = 0;
  std::size_t cloud_size = 0;
  double s2 = 0.0, s2_se = 0.0;
  double s3 = 0.0, s3_se = 0.0;
  double pd_s2 = 0.0;
  double pd_s3 = 0.0;
  // PD(m_pd) simulated with as many atoms as the cloud has points.
  PdSimulation finite_size;
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool passed = false;
};

// Gibbs weights of the normalized energies on one cloud across disorder
// replicas, compared with PD(sqrt(2 log 2)/beta). The band is
// pd_moment(m_pd, 2) +- kPdBandHalfWidth.
PdCompareReport pd_compare(const ModelSpec& spec, const Cloud& cloud, double beta, std::size_t replicas,
                           std::uint64_t seed, std::size_t pd_trials = 20000);

}  // namespace remlab
