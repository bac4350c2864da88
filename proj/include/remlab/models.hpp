#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "remlab/core.hpp"
#include "remlab/rng.hpp"

namespace remlab {

// Unit-variance, even coupling laws.
enum class CouplingKind { gaussian, uniform, laplace };

std::string_view to_string(CouplingKind k);
CouplingKind parse_coupling(std::string_view s);

// c4 = -kappa4 / 24: the quartic coefficient of -log of the characteristic
// function in the (2 pi z) variable. Always < 1/12.
double coupling_c4(CouplingKind kind);

// Inverse CDF of the unit-variance law; u in (0,1).
double coupling_quantile(CouplingKind kind, double u);

inline double sample_coupling(CouplingKind kind, Rng& rng) { return coupling_quantile(kind, uniform_open01(rng)); }

struct C4Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// c4 from draws: k-statistic estimate of kappa4, delta-method standard error.
C4Estimate estimate_c4_empirical(CouplingKind kind, std::size_t samples, Rng& rng);

struct MixtureTerm {
  int p = 1;
  double a = 1.0;
};

enum class SamplerHint { explicit_couplings, cholesky, automatic };

std::string_view to_string(SamplerHint h);
SamplerHint parse_sampler_hint(std::string_view s);

// Law of the Hamiltonian: covariance nu(R) = sum_p a_p^2 R^p with
// nu(0) = 0 and nu(1) = 1, plus a coupling law. The REM (independent
// energies) is the degenerate member with nu(R) = [R == 1].
class ModelSpec {
 public:
  static ModelSpec rem();
  static ModelSpec pure(int p, CouplingKind coupling = CouplingKind::gaussian,
                        SamplerHint hint = SamplerHint::automatic);
  static ModelSpec mixture(std::vector<MixtureTerm> terms, CouplingKind coupling = CouplingKind::gaussian,
                           SamplerHint hint = SamplerHint::automatic);

  bool is_rem() const { return rem_; }
  const std::vector<MixtureTerm>& terms() const { return terms_; }
  CouplingKind coupling() const { return coupling_; }
  SamplerHint sampler_hint() const { return hint_; }
  // The p of a single-term mixture.
  std::optional<int> single_p() const;

  double nu(double r) const;
  std::string describe() const;

 private:
  ModelSpec() = default;
  void validate() const;

  bool rem_ = false;
  std::vector<MixtureTerm> terms_;
  CouplingKind coupling_ = CouplingKind::gaussian;
  SamplerHint hint_ = SamplerHint::automatic;
};

// One disorder replica: raw energies H_N(s) aligned with Cloud::members.
struct EnergySample {
  std::vector<double> values;
  std::uint64_t replica_id = 0;
};

enum class SamplerKind { rem, explicit_couplings, cholesky };
std::string_view to_string(SamplerKind k);

inline constexpr std::size_t kCholeskyMaxSize = 8192;
inline constexpr int kExplicitP2MaxN = 20000;

// explicit when the model is a single p in {1,2} and either the coupling is
// non-Gaussian or the cloud exceeds the Cholesky budget; cholesky otherwise.
SamplerKind resolve_sampler(const ModelSpec& spec, std::size_t cloud_size);

// Per-cloud sampler. Everything that depends only on (spec, cloud) is built
// once here and read concurrently by replicas.
//
// Explicit couplings: H(s) = N^{-p/2} sum over all ordered index tuples
// (diagonal included) of g * s_i1 ... s_ip, so cov = R^p exactly. For p = 2
// the diagonal adds the same sum_i g_ii / N to every configuration.
// Cholesky: K_ij = nu(R_ij) = L L^T, H = L z.
// Every coupling and every normal is one uniform through an inverse CDF, so
// all coupling kinds consume a replica's stream identically.
class EnergySampler {
 public:
  EnergySampler(const ModelSpec& spec, const Cloud& cloud);
  // Forces a path regardless of the model's hint; throws UsageError when the
  // path cannot realize the model.
  EnergySampler(const ModelSpec& spec, const Cloud& cloud, SamplerKind forced);

  SamplerKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  // Diagonal boost that made the factorization succeed (cholesky only).
  double jitter() const { return jitter_; }

  EnergySample sample(Rng& rng, std::uint64_t replica_id = 0) const;

  // Column j of the result is the replica driven by rngs[j].
  Eigen::MatrixXd sample_batch(std::span<Rng> rngs) const;

 private:
  ModelSpec spec_;
  SamplerKind kind_;
  std::size_t size_ = 0;
  int n_ = 0;
  int p_ = 0;
  double jitter_ = 0.0;
  Eigen::MatrixXd spins_;   // |X| x N, entries +-1 (explicit path)
  Eigen::MatrixXd factor_;  // lower Cholesky factor (cholesky path)
};

EnergySample sample_explicit(const ModelSpec& spec, const Cloud& cloud, Rng& rng, std::uint64_t replica_id = 0);
EnergySample sample_cholesky(const ModelSpec& spec, const Cloud& cloud, Rng& rng, std::uint64_t replica_id = 0);

// K_ij = nu(R(x_i, x_j)) over the cloud.
Eigen::MatrixXd covariance_matrix(const ModelSpec& spec, const Cloud& cloud);

}  // namespace remlab
