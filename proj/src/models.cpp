#include "remlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "remlab/error.hpp"

namespace remlab {

std::string_view to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::gaussian:
      return "gaussian";
    case CouplingKind::uniform:
      return "uniform";
    case CouplingKind::laplace:
      return "laplace";
  }
  return "?";
}

CouplingKind parse_coupling(std::string_view s) {
  if (s == "gaussian") return CouplingKind::gaussian;
  if (s == "uniform") return CouplingKind::uniform;
  if (s == "laplace") return CouplingKind::laplace;
  throw UsageError("unknown coupling '" + std::string(s) + "' (gaussian|uniform|laplace)");
}

double coupling_c4(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::gaussian:
      return 0.0;
    case CouplingKind::uniform:
      return 1.0 / 20.0;  // kappa4 = 9/5 - 3
    case CouplingKind::laplace:
      return -1.0 / 8.0;  // kappa4 = 6 - 3
  }
  return 0.0;
}

double coupling_quantile(CouplingKind kind, double u) {
  switch (kind) {
    case CouplingKind::gaussian:
      return normal_quantile(u);
    case CouplingKind::uniform:
      return std::numbers::sqrt3 * (2.0 * u - 1.0);
    case CouplingKind::laplace: {
      constexpr double scale = 0.70710678118654752440;  // variance 2 b^2 = 1
      return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 - 2.0 * u);
    }
  }
  return 0.0;
}

C4Estimate estimate_c4_empirical(CouplingKind kind, std::size_t samples, Rng& rng) {
  if (samples < 1000000) throw UsageError("estimate_c4_empirical needs at least 1e6 samples");
  long double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s6 = 0, s8 = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const long double x = sample_coupling(kind, rng);
    const long double x2 = x * x;
    const long double x4 = x2 * x2;
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x4;
    s6 += x4 * x2;
    s8 += x4 * x4;
  }
  const long double n = static_cast<long double>(samples);
  // Unbiased fourth k-statistic.
  const long double k4 = (-6 * s1 * s1 * s1 * s1 + 12 * n * s1 * s1 * s2 - 3 * n * (n - 1) * s2 * s2 -
                          4 * n * (n + 1) * s1 * s3 + n * n * (n + 1) * s4) /
                         (n * (n - 1) * (n - 2) * (n - 3));
  // Delta method for kappa4 = m4 - 3 m2^2 with the known zero mean.
  const long double m2 = s2 / n, m4 = s4 / n, m6 = s6 / n, m8 = s8 / n;
  const long double var = (m8 - m4 * m4) + 36 * m2 * m2 * (m4 - m2 * m2) - 12 * m2 * (m6 - m4 * m2);
  const double se_k4 = std::sqrt(static_cast<double>(std::max<long double>(var, 0) / n));
  return {static_cast<double>(-k4 / 24), se_k4 / 24.0};
}

std::string_view to_string(SamplerHint h) {
  switch (h) {
    case SamplerHint::explicit_couplings:
      return "explicit";
    case SamplerHint::cholesky:
      return "cholesky";
    case SamplerHint::automatic:
      return "auto";
  }
  return "?";
}

SamplerHint parse_sampler_hint(std::string_view s) {
  if (s == "explicit") return SamplerHint::explicit_couplings;
  if (s == "cholesky") return SamplerHint::cholesky;
  if (s == "auto") return SamplerHint::automatic;
  throw UsageError("unknown sampler hint '" + std::string(s) + "' (explicit|cholesky|auto)");
}

std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::rem:
      return "rem";
    case SamplerKind::explicit_couplings:
      return "explicit";
    case SamplerKind::cholesky:
      return "cholesky";
  }
  return "?";
}

ModelSpec ModelSpec::rem() {
  ModelSpec s;
  s.rem_ = true;
  return s;
}

ModelSpec ModelSpec::pure(int p, CouplingKind coupling, SamplerHint hint) {
  return mixture({{p, 1.0}}, coupling, hint);
}

ModelSpec ModelSpec::mixture(std::vector<MixtureTerm> terms, CouplingKind coupling, SamplerHint hint) {
  ModelSpec s;
  s.terms_ = std::move(terms);
  s.coupling_ = coupling;
  s.hint_ = hint;
  std::sort(s.terms_.begin(), s.terms_.end(), [](const MixtureTerm& a, const MixtureTerm& b) { return a.p < b.p; });
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  if (terms_.empty()) throw UsageError("mixture must have at least one term");
  double total = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (t.p < 1) throw UsageError("mixture terms need p >= 1 (nu(0) = 0)");
    if (i > 0 && terms_[i - 1].p == t.p) throw UsageError("mixture has a repeated p");
    if (!std::isfinite(t.a)) throw UsageError("mixture coefficient is not finite");
    total += t.a * t.a;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "mixture coefficients must satisfy sum a_p^2 = 1 (got " << total << ")";
    throw UsageError(os.str());
  }
  if (coupling_ != CouplingKind::gaussian) {
    if (terms_.size() != 1 || terms_[0].p > 2) {
      throw UsageError("non-Gaussian couplings require a single term with p in {1,2}");
    }
    if (hint_ == SamplerHint::cholesky) throw UsageError("the cholesky sampler is Gaussian only");
  }
  // nu nondecreasing on [0,1]; holds term by term but checked on a grid anyway.
  double prev = nu(0.0);
  for (int i = 1; i <= 64; ++i) {
    const double v = nu(i / 64.0);
    if (v < prev - 1e-15) throw UsageError("covariance function is not nondecreasing on [0,1]");
    prev = v;
  }
}

std::optional<int> ModelSpec::single_p() const {
  if (!rem_ && terms_.size() == 1) return terms_[0].p;
  return std::nullopt;
}

double ModelSpec::nu(double r) const {
  if (rem_) return r == 1.0 ? 1.0 : 0.0;
  double v = 0.0;
  for (const auto& t : terms_) v += t.a * t.a * std::pow(r, t.p);
  return v;
}

std::string ModelSpec::describe() const {
  if (rem_) return "rem";
  std::ostringstream os;
  os.precision(17);
  os << "mixture[";
  for (std::size_t i = 0; i < terms_.size(); ++i) os << (i ? "," : "") << terms_[i].p << ":" << terms_[i].a;
  os << "]/" << to_string(coupling_);
  return os.str();
}

SamplerKind resolve_sampler(const ModelSpec& spec, std::size_t cloud_size) {
  if (spec.is_rem()) return SamplerKind::rem;
  const auto p = spec.single_p();
  const bool explicit_ok = p && *p <= 2;
  switch (spec.sampler_hint()) {
    case SamplerHint::explicit_couplings:
      return SamplerKind::explicit_couplings;
    case SamplerHint::cholesky:
      return SamplerKind::cholesky;
    case SamplerHint::automatic:
      break;
  }
  if (explicit_ok && (spec.coupling() != CouplingKind::gaussian || cloud_size > kCholeskyMaxSize)) {
    return SamplerKind::explicit_couplings;
  }
  return SamplerKind::cholesky;
}

Eigen::MatrixXd covariance_matrix(const ModelSpec& spec, const Cloud& cloud) {
  const auto sz = static_cast<Eigen::Index>(cloud.size());
  // nu on the integer distance grid, so each entry is one table lookup.
  std::vector<double> nu_by_distance(static_cast<std::size_t>(cloud.n) + 1);
  for (int d = 0; d <= cloud.n; ++d) {
    nu_by_distance[d] = spec.nu(static_cast<double>(cloud.n - 2 * d) / cloud.n);
  }
  Eigen::MatrixXd k(sz, sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = nu_by_distance[hamming(cloud.members[i], cloud.members[j])];
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

EnergySampler::EnergySampler(const ModelSpec& spec, const Cloud& cloud)
    : EnergySampler(spec, cloud, resolve_sampler(spec, cloud.size())) {}

EnergySampler::EnergySampler(const ModelSpec& spec, const Cloud& cloud, SamplerKind forced)
    : spec_(spec), kind_(forced), size_(cloud.size()), n_(cloud.n) {
  if (spec.is_rem() != (forced == SamplerKind::rem)) {
    throw UsageError("the rem sampler is used exactly for the REM spec");
  }
  if (kind_ == SamplerKind::explicit_couplings) {
    const auto p = spec.single_p();
    if (!p || *p > 2) throw UsageError("explicit sampler supports a single term with p in {1,2}; use cholesky");
    p_ = *p;
    if (p_ == 2 && n_ > kExplicitP2MaxN) {
      throw UsageError("explicit p=2 sampler needs N^2 couplings; N=" + std::to_string(n_) +
                       " exceeds the memory budget, use the cholesky path");
    }
    spins_.resize(static_cast<Eigen::Index>(size_), n_);
    for (std::size_t i = 0; i < size_; ++i) {
      for (int j = 0; j < n_; ++j) spins_(static_cast<Eigen::Index>(i), j) = cloud.members[i].spin(j);
    }
  } else if (kind_ == SamplerKind::cholesky) {
    if (spec.coupling() != CouplingKind::gaussian) throw UsageError("the cholesky sampler is Gaussian only");
    if (size_ > kCholeskyMaxSize) {
      throw UsageError("cloud of " + std::to_string(size_) + " exceeds the cholesky budget of " +
                       std::to_string(kCholeskyMaxSize));
    }
    const Eigen::MatrixXd k = covariance_matrix(spec, cloud);
    bool ok = false;
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
      Eigen::MatrixXd boosted = k;
      boosted.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(boosted);
      if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        jitter_ = jitter;
        ok = true;
        break;
      }
    }
    if (!ok) throw NumericalError("cholesky factorization failed up to diagonal jitter 1e-08");
  }
}

Eigen::MatrixXd EnergySampler::sample_batch(std::span<Rng> rngs) const {
  const auto sz = static_cast<Eigen::Index>(size_);
  const auto batch = static_cast<Eigen::Index>(rngs.size());
  const CouplingKind law = spec_.coupling();
  switch (kind_) {
    case SamplerKind::rem: {
      Eigen::MatrixXd out(sz, batch);
      for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index i = 0; i < sz; ++i) out(i, b) = standard_normal(rngs[b]);
      }
      return out;
    }
    case SamplerKind::cholesky: {
      Eigen::MatrixXd z(sz, batch);
      for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index i = 0; i < sz; ++i) z(i, b) = standard_normal(rngs[b]);
      }
      return factor_.triangularView<Eigen::Lower>() * z;
    }
    case SamplerKind::explicit_couplings: {
      if (p_ == 1) {
        Eigen::MatrixXd g(n_, batch);
        for (Eigen::Index b = 0; b < batch; ++b) {
          for (int i = 0; i < n_; ++i) g(i, b) = sample_coupling(law, rngs[b]);
        }
        return (spins_ * g) / std::sqrt(static_cast<double>(n_));
      }
      Eigen::MatrixXd out(sz, batch);
      Eigen::MatrixXd g(n_, n_);
      for (Eigen::Index b = 0; b < batch; ++b) {
        // Row-major draw order: g(i1, i2) for i1 outer, i2 inner.
        for (int i = 0; i < n_; ++i) {
          for (int j = 0; j < n_; ++j) g(i, j) = sample_coupling(law, rngs[b]);
        }
        const Eigen::MatrixXd t = spins_ * g;
        out.col(b) = (t.cwiseProduct(spins_)).rowwise().sum() / static_cast<double>(n_);
      }
      return out;
    }
  }
  return {};
}

EnergySample EnergySampler::sample(Rng& rng, std::uint64_t replica_id) const {
  const Eigen::MatrixXd col = sample_batch(std::span<Rng>(&rng, 1));
  EnergySample s;
  s.replica_id = replica_id;
  s.values.assign(col.data(), col.data() + col.rows());
  return s;
}

EnergySample sample_explicit(const ModelSpec& spec, const Cloud& cloud, Rng& rng, std::uint64_t replica_id) {
  return EnergySampler(spec, cloud, SamplerKind::explicit_couplings).sample(rng, replica_id);
}

EnergySample sample_cholesky(const ModelSpec& spec, const Cloud& cloud, Rng& rng, std::uint64_t replica_id) {
  return EnergySampler(spec, cloud, SamplerKind::cholesky).sample(rng, replica_id);
}

}  // namespace remlab
