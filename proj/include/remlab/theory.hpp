#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "remlab/models.hpp"
#include "remlab/pointproc.hpp"

namespace remlab {

// sqrt(2 log 2): decay rate of the limiting intensity.
inline constexpr double kIntensityRate = 1.1774100225154747;

// mu(A) for mu(dt) = pi^{-1/2} exp(-t sqrt(2 log 2)) dt, exact antiderivative.
double intensity_mu(const BorelWindow& window);

// mu(A intersect (-inf, t)) / mu(A).
double intensity_cdf_in_window(double t, const BorelWindow& window);

inline constexpr int kDefaultQuadratureNodes = 40;

// Unit-diagonal covariance of (H(s^1), ..., H(s^l)), entries nu(R_ij).
// Overlaps are given as the strict upper triangle in row order.
Eigen::MatrixXd cov_matrix(const ModelSpec& spec, const std::vector<double>& upper_overlaps, int ell);

// P(H'(s^1) in A, ..., H'(s^l) in A) for a centred unit-variance Gaussian
// vector with covariance B, l in {1,2,3}: tensor Gauss-Legendre quadrature of
// the joint density over A^l. Throws NumericalError when det B < 1e-12.
double gaussian_joint_window_prob(const Eigen::MatrixXd& b, const Normalization& norm, const BorelWindow& window,
                                  int nodes = kDefaultQuadratureNodes);

// Natural log of the same probability; -inf when it vanishes. Entries with
// |b_ij| = 1 are handled exactly by collapsing the perfectly (anti)correlated
// coordinates, so antipodal or repeated configurations are allowed.
double log_joint_window_prob(const Eigen::MatrixXd& b, const Normalization& norm, const BorelWindow& window,
                             int nodes = kDefaultQuadratureNodes);

// P(H' in A) for a single standard normal H, via erfc.
double window_prob_erfc(const Normalization& norm, const BorelWindow& window);

inline constexpr int kSemianalyticMaxN = 4000;
inline constexpr int kThirdMomentMaxN = 60;

// Exact annealed E (P_N(A))_l, l in {1,2}, for a Gaussian model: the pair
// sum runs over every signed overlap grid point with the exact pair count,
// weighted by p_N^2 and the joint window probability. Log-space throughout.
double semianalytic_moment(const ModelSpec& spec, int n, double m, const BorelWindow& window, int ell,
                           int nodes = kDefaultQuadratureNodes);

// E (P)_2 / (E P)^2 from semianalytic_moment.
double semianalytic_ratio(const ModelSpec& spec, int n, double m, const BorelWindow& window,
                          int nodes = kDefaultQuadratureNodes);

// Exact annealed E (P_N(A))_3 by summing over all signed overlap triples of
// distinct configurations (n <= 60).
double semianalytic_third_moment(const ModelSpec& spec, int n, double m, const BorelWindow& window,
                                 int nodes = kDefaultQuadratureNodes);

enum class ModelTag { npp, sk, pspin_high };
enum class Scaling { sqrt_n, linear };

std::string_view to_string(ModelTag t);
std::string_view to_string(Scaling s);
Scaling parse_scaling(std::string_view s);

// npp for pure p=1, sk for pure p=2, pspin_high for pure p>=3; nullopt for
// mixtures and the REM.
std::optional<ModelTag> model_tag(const ModelSpec& spec);

// m as a function of n under a scaling rule.
double scaled_m(Scaling s, double epsilon, int n);

// The largest epsilon for which the SK (and p >= 3) limits are claimed.
inline constexpr double kSkEpsilonMax = 0.18033688011112042;  // 1 / (8 log 2)

struct LimitPrediction {
  ModelTag model = ModelTag::npp;
  Scaling scaling = Scaling::sqrt_n;
  double epsilon = 0.0;
  int order = 2;
  double c4 = 0.0;
  // order 1: lim E P / mu(A); order 2: lim E(P)_2 / (E P)^2;
  // order 3 (p >= 3 only): lim E(P)_3 / (E P)^3.
  double value = 1.0;
};

LimitPrediction limit_constant(ModelTag model, Scaling scaling, double epsilon, int order, double c4 = 0.0);

}  // namespace remlab
