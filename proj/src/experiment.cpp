#include "remlab/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "remlab/combinatorics.hpp"
#include "remlab/gibbs.hpp"
#include "remlab/replica.hpp"

namespace remlab {
namespace {

using ojson = nlohmann::ordered_json;

ojson record(const ExperimentConfig& cfg, std::string_view kind) {
  ojson j;
  j["format_version"] = kFormatVersion;
  j["command"] = std::string(to_string(cfg.command));
  j["record"] = std::string(kind);
  j["config"] = config_to_json(cfg);
  return j;
}

void emit(std::ostream& out, const ojson& j) { out << j.dump() << '\n'; }

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << "remlab: " << msg << std::endl;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void write(const std::string& path) const {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw UsageError("cannot open CSV output '" + path + "'");
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
      f << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  return ojson(*v).dump();
}

std::optional<Scaling> scaling_of(MRule r) {
  if (r == MRule::sqrt_n) return Scaling::sqrt_n;
  if (r == MRule::linear) return Scaling::linear;
  return std::nullopt;
}

// Limit of E(P)_l / mu(A)^l (order 1..3) or of the ratio m2/m1^2 (ratio=true).
struct AsymptoticRef {
  std::optional<double> value;
  std::string note;
};

AsymptoticRef asymptotic_ratio(const ModelSpec& spec, MRule rule, double eps, int order) {
  AsymptoticRef ref;
  const auto tag = model_tag(spec);
  const auto scaling = scaling_of(rule);
  if (spec.is_rem() || !scaling) {
    // Fixed m is inside the Poisson regime for every model.
    if (spec.coupling() == CouplingKind::gaussian || order == 1 || order == 2) ref.value = 1.0;
    return ref;
  }
  if (!tag) {
    ref.note = "no limit constant for mixtures";
    return ref;
  }
  try {
    ref.value = limit_constant(*tag, *scaling, eps, order, coupling_c4(spec.coupling())).value;
  } catch (const UsageError& e) {
    ref.note = e.what();
  }
  return ref;
}

struct ReplicaObs {
  std::int64_t count = 0;
  std::vector<double> points;
};

ReplicaObs observe(const Eigen::VectorXd& h, const Normalization& norm, const BorelWindow& window) {
  ReplicaObs o;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double x = norm.apply(h(i));
    if (window.contains(x)) o.points.push_back(x);
  }
  o.count = static_cast<std::int64_t>(o.points.size());
  return o;
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log) {
  validate(cfg);
  const ModelSpec spec = cfg.model();
  const double m = cfg.m();
  const Normalization norm = Normalization::for_m(m);
  const BorelWindow window = cfg.borel_window();

  std::vector<ReplicaObs> obs;
  // Poisson reference mean: cloud size (2^m when annealed) times P(H' in A).
  double expected_points = std::pow(2.0, m);
  ojson run = record(cfg, "run");
  run["m"] = m;
  run["a_n"] = norm.a_n;
  run["b_n"] = norm.b_n;
  run["mu_window"] = intensity_mu(window);
  if (cfg.mode == ReplicaMode::quenched) {
    Rng cloud_rng = make_rng(cfg.seed, "cloud", 0);
    const Cloud cloud = sample_cloud(cfg.n, m, cloud_rng, cfg.cloud_mode);
    note(log, "cloud of " + std::to_string(cloud.size()) + " configurations");
    const EnergySampler sampler(spec, cloud);
    note(log, "sampler " + std::string(to_string(sampler.kind())) + ", " + std::to_string(cfg.replicas) + " replicas");
    run["cloud_size"] = cloud.size();
    expected_points = static_cast<double>(cloud.size());
    run["sampler"] = std::string(to_string(sampler.kind()));
    run["jitter"] = sampler.jitter();
    obs = map_replicas<ReplicaObs>(sampler, cfg.seed, cfg.replicas,
                                   [&](std::size_t, const Eigen::VectorXd& h) { return observe(h, norm, window); });
  } else {
    note(log, "annealed: fresh cloud per replica, " + std::to_string(cfg.replicas) + " replicas");
    obs.resize(cfg.replicas);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      try {
        Rng cloud_rng = make_rng(cfg.seed, "cloud", r);
        const Cloud cloud = sample_cloud(cfg.n, m, cloud_rng, cfg.cloud_mode);
        const EnergySampler sampler(spec, cloud);
        Rng rng = make_rng(cfg.seed, "replica", r);
        const EnergySample s = sampler.sample(rng, r);
        obs[r] = observe(Eigen::Map<const Eigen::VectorXd>(s.values.data(), static_cast<Eigen::Index>(s.values.size())),
                         norm, window);
      } catch (...) {
#pragma omp critical(remlab_annealed_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  emit(out, run);

  CountVector counts;
  counts.counts.reserve(obs.size());
  for (const auto& o : obs) counts.counts.push_back(o.count);

  const double mu = intensity_mu(window);
  const bool semi = cfg.references && spec.coupling() == CouplingKind::gaussian;
  std::vector<std::optional<double>> semi_moment(4);
  if (semi && cfg.n <= kSemianalyticMaxN) {
    note(log, "semi-analytic references");
    semi_moment[1] = semianalytic_moment(spec, cfg.n, m, window, 1);
    if (cfg.max_order >= 2) semi_moment[2] = semianalytic_moment(spec, cfg.n, m, window, 2);
    if (cfg.max_order >= 3 && cfg.n <= kThirdMomentMaxN) {
      semi_moment[3] = semianalytic_third_moment(spec, cfg.n, m, window);
    }
  }
  const AsymptoticRef first = asymptotic_ratio(spec, cfg.m_rule, cfg.epsilon, 1);
  const AsymptoticRef second = asymptotic_ratio(spec, cfg.m_rule, cfg.epsilon, 2);
  for (int ell = 1; ell <= cfg.max_order; ++ell) {
    MomentReport rep = factorial_moment(counts, ell);
    rep.reference_semianalytic = semi_moment[ell];
    if (cfg.references) {
      const AsymptoticRef a = asymptotic_ratio(spec, cfg.m_rule, cfg.epsilon, ell);
      if (ell == 1 && first.value) {
        rep.reference_asymptotic = mu * *first.value;
      } else if (ell == 2 && first.value && second.value) {
        rep.reference_asymptotic = mu * mu * *first.value * *first.value * *second.value;
      } else if (ell == 3 && a.value) {
        rep.reference_asymptotic = std::pow(mu, 3) * *a.value;
      }
    }
    ojson j = record(cfg, "moment");
    j["order"] = ell;
    j["estimate"] = rep.estimate;
    j["std_error"] = rep.std_error;
    j["reference_semianalytic"] = opt(rep.reference_semianalytic);
    j["reference_asymptotic"] = opt(rep.reference_asymptotic);
    emit(out, j);
  }

  if (cfg.max_order >= 2) {
    const RatioReport rr = moment_ratio(counts);
    ojson j = record(cfg, "ratio");
    j["m1"] = rr.m1;
    j["m2"] = rr.m2;
    j["ratio"] = rr.ratio;
    j["std_error"] = rr.std_error;
    std::optional<double> sa;
    if (semi_moment[1] && semi_moment[2]) sa = *semi_moment[2] / (*semi_moment[1] * *semi_moment[1]);
    j["reference_semianalytic"] = opt(sa);
    j["reference_asymptotic"] = cfg.references ? opt(second.value) : ojson(nullptr);
    if (!second.note.empty()) j["reference_note"] = second.note;
    emit(out, j);
  }

  const double lambda = expected_points * window_prob_erfc(norm, window);
  ojson g = record(cfg, "gof");
  g["lambda"] = lambda;
  if (counts.replicas() >= kGofMinReplicas) {
    const GofReport gr = poisson_gof(counts, lambda, cfg.gof_alpha);
    g["statistic"] = gr.statistic;
    g["dof"] = gr.dof;
    g["p_value"] = gr.p_value;
    g["alpha"] = gr.alpha;
    g["passed"] = gr.passed;
    g["observed"] = gr.observed;
    g["expected"] = gr.expected;
  } else {
    g["skipped"] = "needs at least " + std::to_string(kGofMinReplicas) + " replicas";
  }
  emit(out, g);

  std::vector<double> pooled;
  for (const auto& o : obs) pooled.insert(pooled.end(), o.points.begin(), o.points.end());
  ojson sp = record(cfg, "spacing");
  if (pooled.size() >= kSpacingMinPoints) {
    const SpacingReport s = spacing_test(pooled, window);
    sp["points"] = s.points;
    sp["ks_distance"] = s.ks_distance;
    sp["threshold"] = s.threshold;
    sp["p_value"] = s.p_value;
    sp["passed"] = s.passed;
  } else {
    sp["points"] = pooled.size();
    sp["skipped"] = "needs at least " + std::to_string(kSpacingMinPoints) + " pooled points";
  }
  emit(out, sp);
}

void cmd_theory(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log) {
  validate(cfg);
  const ModelSpec spec = cfg.model();
  const BorelWindow window = cfg.borel_window();
  const double mu = intensity_mu(window);
  CsvTable csv({"n", "epsilon", "m", "order", "semianalytic", "limit"});

  struct Point {
    int n;
    double eps;
    double m;
  };
  std::vector<Point> points;
  if (cfg.scan == "n") {
    for (int n : cfg.n_values) points.push_back({n, cfg.epsilon, cfg.m_for(n)});
  } else {
    const Scaling s = *scaling_of(cfg.m_rule);
    for (double e : cfg.eps_values) points.push_back({cfg.n, e, scaled_m(s, e, cfg.n)});
  }
  for (const auto& pt : points) {
    note(log, "theory n=" + std::to_string(pt.n) + " m=" + ojson(pt.m).dump());
    std::optional<double> sa;
    std::string sa_note;
    if (cfg.semianalytic) {
      if (spec.coupling() != CouplingKind::gaussian) {
        sa_note = "semi-analytic values are Gaussian only";
      } else if (pt.m < kMinNormalizationM || pt.m > pt.n) {
        sa_note = "m outside [2, n]";
      } else {
        const double m1 = semianalytic_moment(spec, pt.n, pt.m, window, 1, cfg.quadrature_nodes);
        if (cfg.order == 1) {
          sa = m1 / mu;
        } else if (cfg.order == 2) {
          sa = semianalytic_moment(spec, pt.n, pt.m, window, 2, cfg.quadrature_nodes) / (m1 * m1);
        } else {
          sa = semianalytic_third_moment(spec, pt.n, pt.m, window, cfg.quadrature_nodes) / (m1 * m1 * m1);
        }
      }
    }
    const AsymptoticRef lim = asymptotic_ratio(spec, cfg.m_rule, pt.eps, cfg.order);
    ojson j = record(cfg, "theory");
    j["n"] = pt.n;
    j["epsilon"] = pt.eps;
    j["m"] = pt.m;
    j["order"] = cfg.order;
    j["semianalytic"] = opt(sa);
    if (!sa_note.empty()) j["semianalytic_note"] = sa_note;
    j["limit"] = opt(lim.value);
    if (!lim.note.empty()) j["limit_note"] = lim.note;
    emit(out, j);
    csv.row({std::to_string(pt.n), ojson(pt.eps).dump(), ojson(pt.m).dump(), std::to_string(cfg.order), cell(sa),
             cell(lim.value)});
  }
  csv.write(cfg.csv);
}

void cmd_comb(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log) {
  validate(cfg);
  const int n = cfg.n;
  const double m = cfg.m();
  if (cfg.table == "pairs") {
    CsvTable csv({"k", "r", "count", "log_count", "J", "nJ", "regime", "verified"});
    std::optional<PairCensus> brute;
    if (cfg.verify) {
      note(log, "brute-force pair census");
      brute = brute_force_pair_census(n);
    }
    for (int k = 0; 2 * k <= n; ++k) {
      const double r = 1.0 - 2.0 * k / n;
      const BigInt count = count_v2_exact(n, r);
      const RegimeLabel lab = classify_pair_regime(n, m, r, cfg.c1, cfg.c2, cfg.empty_threshold);
      ojson j = record(cfg, "pair");
      j["k"] = k;
      j["r"] = r;
      j["count"] = count.str();
      j["log_count"] = log_count_v2(n, r);
      j["J"] = rate_j(r);
      j["nJ"] = n * rate_j(r);
      j["regime"] = std::string(to_string(lab.label));
      std::string verified;
      if (brute) {
        const auto it = brute->find(k);
        const bool ok = it != brute->end() && it->second == count;
        j["verified"] = ok;
        verified = ok ? "true" : "false";
      }
      emit(out, j);
      csv.row({std::to_string(k), ojson(r).dump(), count.str(), ojson(log_count_v2(n, r)).dump(),
               ojson(rate_j(r)).dump(), ojson(n * rate_j(r)).dump(), std::string(to_string(lab.label)), verified});
    }
    csv.write(cfg.csv);
  } else if (cfg.table == "triples") {
    CsvTable csv({"d12", "d23", "d31", "r12", "r23", "r31", "count", "J2", "regime", "verified"});
    std::optional<TripleCensus> brute;
    if (cfg.verify) {
      note(log, "brute-force triple census");
      brute = brute_force_triple_census(n);
    }
    for (int d12 = 0; d12 <= n; ++d12) {
      for (int d23 = 0; d23 <= n; ++d23) {
        for (int d31 = 0; d31 <= n; ++d31) {
          const TripleOverlap t{1.0 - 2.0 * d12 / n, 1.0 - 2.0 * d23 / n, 1.0 - 2.0 * d31 / n};
          const BigInt count = count_w3_exact(n, t);
          std::optional<bool> ok;
          if (brute) {
            const auto it = brute->find({d12, d23, d31});
            ok = it == brute->end() ? count == 0 : it->second == count;
          }
          if (count == 0 && (!ok || *ok)) continue;
          const RegimeLabel lab =
              classify_triple_regime(n, m, t, kDefaultC1Triple, kDefaultC2Triple, cfg.empty_threshold, cfg.c1);
          ojson j = record(cfg, "triple");
          j["d12"] = d12;
          j["d23"] = d23;
          j["d31"] = d31;
          j["r12"] = t.r12;
          j["r23"] = t.r23;
          j["r31"] = t.r31;
          j["count"] = count.str();
          j["J2"] = rate_j2(t);
          j["regime"] = std::string(to_string(lab.label));
          if (ok) j["verified"] = *ok;
          emit(out, j);
          csv.row({std::to_string(d12), std::to_string(d23), std::to_string(d31), ojson(t.r12).dump(),
                   ojson(t.r23).dump(), ojson(t.r31).dump(), count.str(), ojson(rate_j2(t)).dump(),
                   std::string(to_string(lab.label)), ok ? (*ok ? "true" : "false") : ""});
        }
      }
    }
    csv.write(cfg.csv);
  } else {
    CsvTable csv({"k", "x", "J"});
    for (int k = 0; k <= n; ++k) {
      const double x = 1.0 - 2.0 * k / n;
      ojson j = record(cfg, "rate");
      j["k"] = k;
      j["x"] = x;
      j["J"] = rate_j(x);
      emit(out, j);
      csv.row({std::to_string(k), ojson(x).dump(), ojson(rate_j(x)).dump()});
    }
    csv.write(cfg.csv);
  }
}

void cmd_gibbs(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log) {
  validate(cfg);
  const ModelSpec spec = cfg.model();
  Rng cloud_rng = make_rng(cfg.seed, "cloud", 0);
  const Cloud cloud = sample_cloud(cfg.n, cfg.m(), cloud_rng, cfg.cloud_mode);
  note(log, "gibbs on a cloud of " + std::to_string(cloud.size()) + " configurations");
  const PdCompareReport rep = pd_compare(spec, cloud, *cfg.beta, cfg.replicas, cfg.seed, cfg.pd_trials);
  ojson j = record(cfg, "gibbs");
  j["m"] = cfg.m();
  j["cloud_size"] = rep.cloud_size;
  j["beta"] = rep.beta;
  j["m_pd"] = rep.m_pd;
  j["sum_w2"] = rep.s2;
  j["sum_w2_std_error"] = rep.s2_se;
  j["sum_w3"] = rep.s3;
  j["sum_w3_std_error"] = rep.s3_se;
  j["pd_sum_w2"] = rep.pd_s2;
  j["pd_sum_w3"] = rep.pd_s3;
  j["finite_size_sum_w2"] = rep.finite_size.s2;
  j["finite_size_sum_w3"] = rep.finite_size.s3;
  j["finite_size_atoms"] = rep.finite_size.atoms;
  j["band"] = {rep.band_lo, rep.band_hi};
  j["passed"] = rep.passed;
  emit(out, j);
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log) {
  switch (cfg.command) {
    case Command::simulate:
      return cmd_simulate(cfg, out, log);
    case Command::theory:
      return cmd_theory(cfg, out, log);
    case Command::comb:
      return cmd_comb(cfg, out, log);
    case Command::gibbs:
      return cmd_gibbs(cfg, out, log);
  }
}

}  // namespace remlab
