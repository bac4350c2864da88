#include "remlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "remlab/error.hpp"
#include "remlab/pointproc.hpp"
#include "remlab/replica.hpp"
#include "remlab/rng.hpp"

namespace remlab {
namespace {

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const { return n < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

}  // namespace

double GibbsWeights::power_sum(int k) const {
  double s = 0.0;
  for (double w : weights) s += std::pow(w, k);
  return s;
}

GibbsWeights gibbs_weights(std::span<const double> values, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw UsageError("beta must be finite and > 0");
  if (values.empty()) throw UsageError("gibbs_weights needs at least one value");
  GibbsWeights g;
  g.beta = beta;
  g.m_pd = kBetaCritical / beta;
  const double shift = -beta * *std::min_element(values.begin(), values.end());
  g.weights.resize(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    g.weights[i] = std::exp(-beta * values[i] - shift);
    total += g.weights[i];
  }
  for (double& w : g.weights) w /= total;
  std::sort(g.weights.begin(), g.weights.end(), std::greater<>());
  return g;
}

double pd_moment(double m, int k) {
  if (!(m > 0.0 && m < 1.0)) throw UsageError("pd_moment needs 0 < m < 1");
  if (k < 2) throw UsageError("pd_moment needs k >= 2");
  double v = 1.0;
  for (int j = 1; j < k; ++j) v *= (j - m) / j;
  return v;
}

PdSimulation simulate_pd(double m, std::size_t atoms, std::size_t trials, std::uint64_t seed) {
  if (!(m > 0.0 && m < 1.0)) throw UsageError("simulate_pd needs 0 < m < 1");
  if (atoms < 1 || trials < 2) throw UsageError("simulate_pd needs atoms >= 1 and trials >= 2");
  std::vector<double> s2(trials), s3(trials), trunc(trials);
#pragma omp parallel
  {
    std::vector<double> x(atoms);
#pragma omp for schedule(static)
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng = make_rng(seed, "pd", t);
      double gamma = 0.0;
      double total = 0.0;
      for (std::size_t k = 0; k < atoms; ++k) {
        gamma -= std::log(uniform_open01(rng));
        x[k] = std::pow(gamma, -1.0 / m);
        total += x[k];
      }
      double a = 0.0, b = 0.0;
      for (std::size_t k = 0; k < atoms; ++k) {
        const double w = x[k] / total;
        a += w * w;
        b += w * w * w;
      }
      s2[t] = a;
      s3[t] = b;
      trunc[t] = m / (1.0 - m) * std::pow(x[atoms - 1], 1.0 - m) / total;
    }
  }
  PdSimulation out;
  out.m = m;
  out.atoms = atoms;
  out.trials = trials;
  Welford w2, w3, wt;
  for (std::size_t t = 0; t < trials; ++t) {
    w2.add(s2[t]);
    w3.add(s3[t]);
    wt.add(trunc[t]);
  }
  out.s2 = w2.mean;
  out.s2_se = w2.se();
  out.s3 = w3.mean;
  out.s3_se = w3.se();
  out.truncation_bound = wt.mean;
  return out;
}

PdCompareReport pd_compare(const ModelSpec& spec, const Cloud& cloud, double beta, std::size_t replicas,
                           std::uint64_t seed, std::size_t pd_trials) {
  if (!(beta > kBetaCritical)) {
    throw UsageError("Poisson-Dirichlet comparison requires beta > sqrt(2 log 2) = 1.177410 (got " +
                     std::to_string(beta) + ")");
  }
  if (replicas < 2) throw UsageError("pd_compare needs at least 2 replicas");
  const Normalization norm = Normalization::for_m(cloud.m);
  const EnergySampler sampler(spec, cloud);
  struct Sums {
    double s2 = 0.0, s3 = 0.0;
  };
  const auto per = map_replicas<Sums>(sampler, seed, replicas, [&](std::size_t, const Eigen::VectorXd& h) {
    std::vector<double> hp(static_cast<std::size_t>(h.size()));
    for (Eigen::Index i = 0; i < h.size(); ++i) hp[static_cast<std::size_t>(i)] = norm.apply(h(i));
    const GibbsWeights g = gibbs_weights(hp, beta);
    return Sums{g.power_sum(2), g.power_sum(3)};
  });
  Welford w2, w3;
  for (const auto& s : per) {
    w2.add(s.s2);
    w3.add(s.s3);
  }
  PdCompareReport rep;
  rep.beta = beta;
  rep.m_pd = kBetaCritical / beta;
  rep.replicas = replicas;
  rep.cloud_size = cloud.size();
  rep.s2 = w2.mean;
  rep.s2_se = w2.se();
  rep.s3 = w3.mean;
  rep.s3_se = w3.se();
  rep.pd_s2 = pd_moment(rep.m_pd, 2);
  rep.pd_s3 = pd_moment(rep.m_pd, 3);
  rep.finite_size =
      simulate_pd(rep.m_pd, std::max<std::size_t>(cloud.size(), 1), pd_trials, derive_seed(seed, "pd", 0));
  rep.band_lo = rep.pd_s2 - kPdBandHalfWidth;
  rep.band_hi = rep.pd_s2 + kPdBandHalfWidth;
  rep.passed = rep.s2 >= rep.band_lo && rep.s2 <= rep.band_hi;
  return rep;
}

}  // namespace remlab
