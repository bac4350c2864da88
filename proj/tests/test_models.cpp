#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "oracles.hpp"
#include "remlab/error.hpp"
#include "remlab/models.hpp"
#include "remlab/replica.hpp"

using namespace remlab;

namespace {

Cloud random_cloud(int n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SpinConfig> xs;
  while (xs.size() < k) {
    SpinConfig s = SpinConfig::uniform(n, rng);
    if (std::find(xs.begin(), xs.end(), s) == xs.end()) xs.push_back(s);
  }
  return make_cloud(n, std::log2(double(k)), xs);
}

// Sample mean and covariance over replicas (columns).
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cov_se;  // standard error of each covariance entry
};

Moments moments_of(const Eigen::MatrixXd& x) {
  const double r = static_cast<double>(x.cols());
  Moments m;
  m.mean = x.rowwise().mean();
  const Eigen::MatrixXd c = x.colwise() - m.mean;
  m.cov = c * c.transpose() / (r - 1);
  const Eigen::MatrixXd c2 = c.cwiseProduct(c);
  const Eigen::MatrixXd e4 = c2 * c2.transpose() / r;
  m.cov_se = ((e4 - m.cov.cwiseProduct(m.cov)) / r).cwiseMax(0.0).cwiseSqrt();
  return m;
}

Eigen::MatrixXd draw(const EnergySampler& s, std::uint64_t seed, std::size_t replicas) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(replicas));
  const auto cols =
      map_replicas<Eigen::VectorXd>(s, seed, replicas, [](std::size_t, const Eigen::VectorXd& h) { return h; });
  for (std::size_t r = 0; r < replicas; ++r) out.col(static_cast<Eigen::Index>(r)) = cols[r];
  return out;
}

}  // namespace

TEST(ModelSpec, Validation) {
  EXPECT_NO_THROW(ModelSpec::pure(2));
  EXPECT_THROW(ModelSpec::mixture({{1, 0.5}, {2, 0.5}}), UsageError);
  EXPECT_THROW(ModelSpec::pure(0), UsageError);
  EXPECT_THROW(ModelSpec::mixture({{2, std::sqrt(0.5)}, {2, std::sqrt(0.5)}}), UsageError);
  EXPECT_THROW(ModelSpec::pure(3, CouplingKind::uniform), UsageError);
  EXPECT_THROW(ModelSpec::mixture({{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}}, CouplingKind::laplace), UsageError);
  EXPECT_THROW(ModelSpec::pure(2, CouplingKind::uniform, SamplerHint::cholesky), UsageError);
  EXPECT_NO_THROW(ModelSpec::pure(1, CouplingKind::laplace));
}

TEST(ModelSpec, Nu) {
  EXPECT_EQ(ModelSpec::pure(2).nu(0.5), 0.25);
  EXPECT_EQ(ModelSpec::pure(1).nu(-0.5), -0.5);
  const ModelSpec mix = ModelSpec::mixture({{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}});
  EXPECT_NEAR(mix.nu(0.5), 0.375, 1e-15);
  EXPECT_NEAR(mix.nu(1.0), 1.0, 1e-15);
  EXPECT_EQ(mix.nu(0.0), 0.0);
  const ModelSpec rem = ModelSpec::rem();
  EXPECT_EQ(rem.nu(1.0), 1.0);
  EXPECT_EQ(rem.nu(0.9), 0.0);
  EXPECT_EQ(rem.nu(-1.0), 0.0);
}

TEST(Coupling, C4Values) {
  EXPECT_EQ(coupling_c4(CouplingKind::gaussian), 0.0);
  EXPECT_DOUBLE_EQ(coupling_c4(CouplingKind::uniform), 0.05);
  EXPECT_DOUBLE_EQ(coupling_c4(CouplingKind::laplace), -0.125);
}

TEST(Coupling, QuantileMomentsByQuadrature) {
  // E X^k = int_0^1 q(u)^k du; substitute u = (1 + tanh t)/2 to tame the ends.
  for (CouplingKind k : {CouplingKind::gaussian, CouplingKind::uniform, CouplingKind::laplace}) {
    auto moment = [&](int p) {
      return oracle::simpson(
          [&](double t) {
            const double u = 0.5 * (1.0 + std::tanh(t));
            const double du = 0.5 / (std::cosh(t) * std::cosh(t));
            if (u <= 0.0 || u >= 1.0) return 0.0;
            return std::pow(coupling_quantile(k, u), p) * du;
          },
          -18.0, 18.0, 200000);
    };
    EXPECT_NEAR(moment(1), 0.0, 1e-7);
    EXPECT_NEAR(moment(2), 1.0, 1e-6);
    const double kappa4 = moment(4) - 3.0;
    EXPECT_NEAR(-kappa4 / 24.0, coupling_c4(k), 1e-5) << to_string(k);
  }
}

TEST(Coupling, CharacteristicFunctionSeries) {
  // -log phi(s) = s^2/2 - kappa4 s^4 / 24 + O(s^6); fit the quartic term.
  for (CouplingKind k : {CouplingKind::uniform, CouplingKind::laplace}) {
    auto neg_log_phi = [&](double s) {
      double re;
      if (k == CouplingKind::uniform) {
        re = std::sin(std::sqrt(3.0) * s) / (std::sqrt(3.0) * s);
      } else {
        re = 1.0 / (1.0 + s * s / 2.0);
      }
      return -std::log(re);
    };
    const double s = 0.02;
    const double quartic = (neg_log_phi(s) - s * s / 2.0) / std::pow(s, 4);
    EXPECT_NEAR(quartic, coupling_c4(k), 2e-3);
  }
}

TEST(Coupling, EmpiricalC4) {
  for (CouplingKind k : {CouplingKind::gaussian, CouplingKind::uniform, CouplingKind::laplace}) {
    Rng rng = make_rng(2024, "c4", static_cast<std::uint64_t>(k));
    const C4Estimate e = estimate_c4_empirical(k, 2000000, rng);
    EXPECT_NEAR(e.value, coupling_c4(k), 3.0 * e.std_error) << to_string(k);
    EXPECT_GT(e.std_error, 0.0);
  }
  Rng rng(1);
  EXPECT_THROW(estimate_c4_empirical(CouplingKind::uniform, 999999, rng), UsageError);
}

TEST(Sampler, ResolveRule) {
  EXPECT_EQ(resolve_sampler(ModelSpec::rem(), 10), SamplerKind::rem);
  EXPECT_EQ(resolve_sampler(ModelSpec::pure(2), 100), SamplerKind::cholesky);
  EXPECT_EQ(resolve_sampler(ModelSpec::pure(2), 9000), SamplerKind::explicit_couplings);
  EXPECT_EQ(resolve_sampler(ModelSpec::pure(1, CouplingKind::uniform), 10), SamplerKind::explicit_couplings);
  EXPECT_EQ(resolve_sampler(ModelSpec::pure(3), 9000), SamplerKind::cholesky);
  EXPECT_EQ(resolve_sampler(ModelSpec::pure(2, CouplingKind::gaussian, SamplerHint::explicit_couplings), 10),
            SamplerKind::explicit_couplings);
}

TEST(Sampler, PathPreconditions) {
  const Cloud c = random_cloud(8, 4, 1);
  EXPECT_THROW(EnergySampler(ModelSpec::pure(3), c, SamplerKind::explicit_couplings), UsageError);
  EXPECT_THROW(EnergySampler(ModelSpec::pure(1, CouplingKind::uniform), c, SamplerKind::cholesky), UsageError);
  EXPECT_THROW(EnergySampler(ModelSpec::pure(2), c, SamplerKind::rem), UsageError);
  const Cloud wide = random_cloud(20001, 2, 2);
  EXPECT_THROW(EnergySampler(ModelSpec::pure(2), wide, SamplerKind::explicit_couplings), UsageError);
}

TEST(Sampler, P1SingleSpinIsAntisymmetric) {
  const Cloud c =
      make_cloud(1, 1, {SpinConfig::from_spins(std::vector<int>{1}), SpinConfig::from_spins(std::vector<int>{-1})});
  Rng rng(4);
  const EnergySample s = sample_explicit(ModelSpec::pure(1), c, rng);
  ASSERT_EQ(s.values.size(), 2u);
  EXPECT_EQ(s.values[0], -s.values[1]);
}

TEST(Sampler, P1Variance) {
  const Cloud c = random_cloud(30, 2, 3);
  const EnergySampler s(ModelSpec::pure(1), c, SamplerKind::explicit_couplings);
  const Moments m = moments_of(draw(s, 9, 100000));
  EXPECT_NEAR(m.cov(0, 0), 1.0, 0.02);
  EXPECT_NEAR(m.cov(0, 1), overlap(c.members[0], c.members[1]), 4 * m.cov_se(0, 1));
}

TEST(Sampler, P2OrthogonalPairUncorrelated) {
  const Cloud c = make_cloud(
      4, 1,
      {SpinConfig::from_spins(std::vector<int>{1, 1, 1, 1}), SpinConfig::from_spins(std::vector<int>{1, 1, -1, -1})});
  const EnergySampler s(ModelSpec::pure(2), c, SamplerKind::explicit_couplings);
  const Moments m = moments_of(draw(s, 10, 100000));
  EXPECT_NEAR(m.cov(0, 1), 0.0, 3.0 * std::pow(10.0, -2.5));
  EXPECT_NEAR(m.cov(0, 0), 1.0, 0.02);
}

TEST(Sampler, CholeskySingleton) {
  const Cloud c = random_cloud(10, 1, 4);
  const EnergySampler s(ModelSpec::pure(2), c, SamplerKind::cholesky);
  Rng a(77), b(77);
  EXPECT_EQ(s.sample(a).values[0], standard_normal(b));
}

TEST(Sampler, CholeskyMixtureCovariance) {
  // Two configurations at overlap 0.5.
  const Cloud c = make_cloud(
      4, 1,
      {SpinConfig::from_spins(std::vector<int>{1, 1, 1, 1}), SpinConfig::from_spins(std::vector<int>{1, 1, 1, -1})});
  const ModelSpec mix = ModelSpec::mixture({{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}});
  const Moments m = moments_of(draw(EnergySampler(mix, c, SamplerKind::cholesky), 11, 100000));
  EXPECT_NEAR(m.cov(0, 1), 0.375, 3 * m.cov_se(0, 1));
}

TEST(Sampler, CholeskySkCloudOfThree) {
  const Cloud c = random_cloud(6, 3, 5);
  const Moments m = moments_of(draw(EnergySampler(ModelSpec::pure(2), c, SamplerKind::cholesky), 12, 100000));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double r = overlap(c.members[i], c.members[j]);
      EXPECT_NEAR(m.cov(i, j), r * r, 3 * m.cov_se(i, j)) << i << "," << j;
    }
  }
}

TEST(Sampler, CovarianceMatrixEntries) {
  const Cloud c = random_cloud(12, 6, 6);
  const ModelSpec spec = ModelSpec::mixture({{1, 0.6}, {3, 0.8}});
  const Eigen::MatrixXd k = covariance_matrix(spec, c);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double r = overlap(c.members[i], c.members[j]);
      EXPECT_NEAR(k(i, j), 0.36 * r + 0.64 * r * r * r, 1e-15);
    }
  }
}

TEST(Sampler, ExplicitAndCholeskyRealizeTheSameLaw) {
  // 64 configurations in N = 128, 2e4 replicas per path.
  const Cloud c = random_cloud(128, 64, 8);
  const ModelSpec sk = ModelSpec::pure(2);
  const Moments a = moments_of(draw(EnergySampler(sk, c, SamplerKind::explicit_couplings), 21, 20000));
  const Moments b = moments_of(draw(EnergySampler(sk, c, SamplerKind::cholesky), 22, 20000));
  int over3 = 0, total = 0;
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double se_mean = std::sqrt((a.cov(i, i) + b.cov(i, i)) / 20000.0);
    const double zm = std::fabs(a.mean(i) - b.mean(i)) / se_mean;
    worst = std::max(worst, zm);
    over3 += zm > 3;
    ++total;
    for (int j = i; j < 64; ++j) {
      const double se = std::hypot(a.cov_se(i, j), b.cov_se(i, j));
      const double z = std::fabs(a.cov(i, j) - b.cov(i, j)) / se;
      worst = std::max(worst, z);
      over3 += z > 3;
      ++total;
    }
  }
  // About 0.27% of entries exceed 3 SE by chance.
  EXPECT_LT(double(over3) / total, 0.01);
  EXPECT_LT(worst, 5.0);
}

TEST(Sampler, DeterministicBytes) {
  const Cloud c = random_cloud(40, 16, 9);
  for (SamplerKind k : {SamplerKind::explicit_couplings, SamplerKind::cholesky}) {
    const EnergySampler s(ModelSpec::pure(2), c, k);
    Rng a(5), b(5);
    const auto x = s.sample(a).values;
    const auto y = s.sample(b).values;
    ASSERT_EQ(x.size(), y.size());
    EXPECT_EQ(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)), 0);
  }
}

TEST(Sampler, BatchColumnsEqualSingleDraws) {
  const Cloud c = random_cloud(30, 8, 10);
  const EnergySampler s(ModelSpec::pure(1, CouplingKind::uniform), c);
  std::vector<Rng> rngs{Rng(1), Rng(2), Rng(3)};
  const Eigen::MatrixXd batch = s.sample_batch(rngs);
  for (int j = 0; j < 3; ++j) {
    Rng r(j + 1);
    const auto single = s.sample(r).values;
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(batch(i, j), single[i], 1e-12);
  }
}
