#include "remlab/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "remlab/combinatorics.hpp"
#include "remlab/gibbs.hpp"

namespace remlab {
namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad(key, "expected a finite real, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, "expected true|false, got '" + v + "'");
}

json parse_array(const std::string& key, const std::string& v) {
  json j = json::parse(v, nullptr, false);
  if (j.is_discarded() || !j.is_array()) bad(key, "expected an array, got '" + v + "'");
  return j;
}

std::vector<Interval> parse_window(const std::string& key, const std::string& v) {
  std::vector<Interval> out;
  for (const auto& e : parse_array(key, v)) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      bad(key, "each interval must be [lo, hi]");
    }
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

std::vector<MixtureTerm> parse_terms(const std::string& key, const std::string& v) {
  std::vector<MixtureTerm> out;
  for (const auto& e : parse_array(key, v)) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
      bad(key, "each term must be [p, a_p] with integer p");
    }
    out.push_back({e[0].get<int>(), e[1].get<double>()});
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& e : parse_array(key, v)) {
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) bad(key, "expected integers");
    } else {
      if (!e.is_number()) bad(key, "expected numbers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

template <class T>
std::string list_text(const std::vector<T>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_integral_v<T>) {
      s += std::to_string(xs[i]);
    } else {
      s += fmt_double(xs[i]);
    }
  }
  return s + "]";
}

MRule parse_m_rule(const std::string& key, const std::string& v) {
  if (v == "fixed") return MRule::fixed;
  if (v == "sqrt") return MRule::sqrt_n;
  if (v == "linear") return MRule::linear;
  bad(key, "expected fixed|sqrt|linear, got '" + v + "'");
}

CloudMode parse_cloud_mode(const std::string& key, const std::string& v) {
  if (v == "auto") return CloudMode::automatic;
  if (v == "exact") return CloudMode::exact;
  if (v == "large_n") return CloudMode::large_n;
  bad(key, "expected auto|exact|large_n, got '" + v + "'");
}

std::string_view to_string(EmptyThreshold e) { return e == EmptyThreshold::literal_log2 ? "log2" : "log_n"; }

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const UsageError& e) {
    bad(key, e.what());
  }
}

}  // namespace

std::string_view to_string(MRule r) {
  switch (r) {
    case MRule::fixed:
      return "fixed";
    case MRule::sqrt_n:
      return "sqrt";
    case MRule::linear:
      return "linear";
  }
  return "?";
}

std::string_view to_string(ReplicaMode m) { return m == ReplicaMode::quenched ? "quenched" : "annealed"; }

std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::theory:
      return "theory";
    case Command::comb:
      return "comb";
    case Command::gibbs:
      return "gibbs";
  }
  return "?";
}

std::string_view to_string(CloudMode c) {
  switch (c) {
    case CloudMode::exact:
      return "exact";
    case CloudMode::large_n:
      return "large_n";
    case CloudMode::automatic:
      return "auto";
  }
  return "?";
}

Command parse_command(std::string_view s) {
  if (s == "simulate") return Command::simulate;
  if (s == "theory") return Command::theory;
  if (s == "comb") return Command::comb;
  if (s == "gibbs") return Command::gibbs;
  throw ConfigError("unknown command '" + std::string(s) + "' (simulate|theory|comb|gibbs)");
}

ModelSpec ExperimentConfig::model() const {
  if (rem) return ModelSpec::rem();
  return ModelSpec::mixture(terms, coupling, sampler);
}

double ExperimentConfig::m_for(int n_) const {
  switch (m_rule) {
    case MRule::fixed:
      return m_value;
    case MRule::sqrt_n:
      return scaled_m(Scaling::sqrt_n, epsilon, n_);
    case MRule::linear:
      return scaled_m(Scaling::linear, epsilon, n_);
  }
  return m_value;
}

BorelWindow ExperimentConfig::borel_window() const { return BorelWindow(window); }

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("config key '" + key + "' given twice");
    kv[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

void apply_override(KeyValues& kv, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + std::string(assignment) + "' has an empty key");
  kv[key] = trim(assignment.substr(eq + 1));
}

ExperimentConfig config_from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  for (const auto& [key, v] : kv) {
    if (key == "command") {
      c.command = wrap(key, [&] { return parse_command(v); });
    } else if (key == "model") {
      if (v == "rem") {
        c.rem = true;
      } else if (v == "mixture") {
        c.rem = false;
      } else {
        bad(key, "expected rem|mixture, got '" + v + "'");
      }
    } else if (key == "model.terms") {
      c.terms = parse_terms(key, v);
    } else if (key == "model.coupling") {
      c.coupling = wrap(key, [&] { return parse_coupling(v); });
    } else if (key == "model.sampler") {
      c.sampler = wrap(key, [&] { return parse_sampler_hint(v); });
    } else if (key == "n") {
      c.n = parse_int<int>(key, v);
    } else if (key == "m.rule") {
      c.m_rule = parse_m_rule(key, v);
    } else if (key == "m.value") {
      c.m_value = parse_double(key, v);
    } else if (key == "m.epsilon") {
      c.epsilon = parse_double(key, v);
    } else if (key == "window") {
      c.window = parse_window(key, v);
    } else if (key == "beta") {
      if (v == "none") {
        c.beta.reset();
      } else {
        c.beta = parse_double(key, v);
      }
    } else if (key == "replicas") {
      c.replicas = parse_int<std::size_t>(key, v);
    } else if (key == "seed") {
      c.seed = parse_int<std::uint64_t>(key, v);
    } else if (key == "mode") {
      if (v == "quenched") {
        c.mode = ReplicaMode::quenched;
      } else if (v == "annealed") {
        c.mode = ReplicaMode::annealed;
      } else {
        bad(key, "expected quenched|annealed, got '" + v + "'");
      }
    } else if (key == "cloud.mode") {
      c.cloud_mode = parse_cloud_mode(key, v);
    } else if (key == "simulate.max_order") {
      c.max_order = parse_int<int>(key, v);
    } else if (key == "simulate.gof_alpha") {
      c.gof_alpha = parse_double(key, v);
    } else if (key == "simulate.references") {
      c.references = parse_bool(key, v);
    } else if (key == "theory.scan") {
      if (v != "n" && v != "epsilon") bad(key, "expected n|epsilon, got '" + v + "'");
      c.scan = v;
    } else if (key == "theory.n_values") {
      c.n_values = parse_list<int>(key, v);
    } else if (key == "theory.eps_values") {
      c.eps_values = parse_list<double>(key, v);
    } else if (key == "theory.order") {
      c.order = parse_int<int>(key, v);
    } else if (key == "theory.nodes") {
      c.quadrature_nodes = parse_int<int>(key, v);
    } else if (key == "theory.semianalytic") {
      c.semianalytic = parse_bool(key, v);
    } else if (key == "comb.table") {
      if (v != "pairs" && v != "triples" && v != "rates") bad(key, "expected pairs|triples|rates, got '" + v + "'");
      c.table = v;
    } else if (key == "comb.verify") {
      c.verify = parse_bool(key, v);
    } else if (key == "comb.c1") {
      c.c1 = parse_double(key, v);
    } else if (key == "comb.c2") {
      c.c2 = parse_double(key, v);
    } else if (key == "comb.empty_threshold") {
      if (v == "log2") {
        c.empty_threshold = EmptyThreshold::literal_log2;
      } else if (v == "log_n") {
        c.empty_threshold = EmptyThreshold::log_n;
      } else {
        bad(key, "expected log2|log_n, got '" + v + "'");
      }
    } else if (key == "gibbs.pd_trials") {
      c.pd_trials = parse_int<std::size_t>(key, v);
    } else if (key == "output.csv") {
      c.csv = v;
    } else {
      bad(key, "unknown key");
    }
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  wrap("model", [&] { return c.model(); });
  wrap("window", [&] { return c.borel_window(); });
  if (c.n < 2) bad("n", "must be >= 2");
  if (c.m_rule == MRule::fixed && !(c.m_value >= 0.0)) bad("m.value", "must be >= 0");
  if (c.m_rule != MRule::fixed && !(c.epsilon >= 0.0)) bad("m.epsilon", "must be >= 0");
  const bool sampling = c.command == Command::simulate || c.command == Command::gibbs;
  if (sampling) {
    const double m = c.m();
    if (!(m >= kMinNormalizationM)) bad("m.value", "resolved m = " + fmt_double(m) + " is below 2");
    if (m > c.n) bad("m.value", "resolved m exceeds n");
    if (c.cloud_mode == CloudMode::exact && c.n > kExactCloudMaxN) bad("cloud.mode", "exact sampling needs n <= 24");
    if (c.n > kExactCloudMaxN && m > 26.0) bad("m.value", "large-n cloud sampling needs m <= 26");
    if (c.replicas < 2) bad("replicas", "must be >= 2");
  }
  if (c.command == Command::simulate) {
    if (c.max_order < 1 || c.max_order > 3) bad("simulate.max_order", "must be in 1..3");
    if (!(c.gof_alpha > 0.0 && c.gof_alpha < 1.0)) bad("simulate.gof_alpha", "must be in (0,1)");
  }
  if (c.command == Command::gibbs) {
    if (!c.beta) bad("beta", "required by the gibbs command");
    if (!(*c.beta > kBetaCritical)) {
      bad("beta", "Poisson-Dirichlet comparison requires beta > sqrt(2 log 2) = 1.177410");
    }
    if (c.pd_trials < 2) bad("gibbs.pd_trials", "must be >= 2");
    if (c.mode != ReplicaMode::quenched) bad("mode", "the gibbs command runs on one quenched cloud");
  }
  if (c.command == Command::theory) {
    if (c.order < 1 || c.order > 3) bad("theory.order", "must be in 1..3");
    if (c.quadrature_nodes < 1 || c.quadrature_nodes > 1000) bad("theory.nodes", "must be in 1..1000");
    if (c.scan == "n") {
      if (c.n_values.empty()) bad("theory.n_values", "empty scan");
      for (int n : c.n_values) {
        if (n < 2) bad("theory.n_values", "entries must be >= 2");
        if (c.semianalytic && n > (c.order == 3 ? kThirdMomentMaxN : kSemianalyticMaxN)) {
          bad("theory.n_values", "n = " + std::to_string(n) + " exceeds the semi-analytic limit for this order");
        }
      }
    } else {
      if (c.eps_values.empty()) bad("theory.eps_values", "empty scan");
      for (double e : c.eps_values) {
        if (!(e >= 0.0)) bad("theory.eps_values", "entries must be >= 0");
      }
      if (c.m_rule == MRule::fixed) bad("m.rule", "an epsilon scan needs m.rule = sqrt or linear");
      if (c.semianalytic && c.n > (c.order == 3 ? kThirdMomentMaxN : kSemianalyticMaxN)) {
        bad("n", "exceeds the semi-analytic limit for this order");
      }
    }
  }
  if (c.command == Command::comb) {
    if (c.table == "pairs" && c.n > 100000) bad("n", "pair table needs n <= 100000");
    if (c.table == "triples" && c.n > 64) bad("n", "grid too large for exact triple enumeration (n <= 64)");
    if (c.verify && c.n > kBruteForceMaxN) bad("comb.verify", "brute-force verification needs n <= 14");
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string s;
  auto put = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  std::string terms = "[";
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (i) terms += ", ";
    terms += "[" + std::to_string(c.terms[i].p) + ", " + fmt_double(c.terms[i].a) + "]";
  }
  terms += "]";
  std::string window = "[";
  for (std::size_t i = 0; i < c.window.size(); ++i) {
    if (i) window += ", ";
    window += "[" + fmt_double(c.window[i].lo) + ", " + fmt_double(c.window[i].hi) + "]";
  }
  window += "]";
  put("command", std::string(to_string(c.command)));
  put("model", c.rem ? "rem" : "mixture");
  put("model.terms", terms);
  put("model.coupling", std::string(to_string(c.coupling)));
  put("model.sampler", std::string(to_string(c.sampler)));
  put("n", std::to_string(c.n));
  put("m.rule", std::string(to_string(c.m_rule)));
  put("m.value", fmt_double(c.m_value));
  put("m.epsilon", fmt_double(c.epsilon));
  put("window", window);
  put("beta", c.beta ? fmt_double(*c.beta) : "none");
  put("replicas", std::to_string(c.replicas));
  put("seed", std::to_string(c.seed));
  put("mode", std::string(to_string(c.mode)));
  put("cloud.mode", std::string(to_string(c.cloud_mode)));
  put("simulate.max_order", std::to_string(c.max_order));
  put("simulate.gof_alpha", fmt_double(c.gof_alpha));
  put("simulate.references", c.references ? "true" : "false");
  put("theory.scan", c.scan);
  put("theory.n_values", list_text(c.n_values));
  put("theory.eps_values", list_text(c.eps_values));
  put("theory.order", std::to_string(c.order));
  put("theory.nodes", std::to_string(c.quadrature_nodes));
  put("theory.semianalytic", c.semianalytic ? "true" : "false");
  put("comb.table", c.table);
  put("comb.verify", c.verify ? "true" : "false");
  put("comb.c1", fmt_double(c.c1));
  put("comb.c2", fmt_double(c.c2));
  put("comb.empty_threshold", std::string(to_string(c.empty_threshold)));
  put("gibbs.pd_trials", std::to_string(c.pd_trials));
  put("output.csv", c.csv);
  return s;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : parse_key_values(serialize_config(c))) j[k] = v;
  return j;
}

}  // namespace remlab
