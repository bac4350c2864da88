#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "remlab/combinatorics.hpp"
#include "remlab/core.hpp"
#include "remlab/error.hpp"
#include "remlab/models.hpp"
#include "remlab/pointproc.hpp"
#include "remlab/theory.hpp"

namespace remlab {

// A config that cannot be parsed or fails validation; the message names the key.
class ConfigError : public UsageError {
 public:
  explicit ConfigError(const std::string& what) : UsageError(what) {}
};

inline constexpr int kFormatVersion = 1;

enum class MRule { fixed, sqrt_n, linear };
enum class ReplicaMode { quenched, annealed };
enum class Command { simulate, theory, comb, gibbs };

std::string_view to_string(MRule r);
std::string_view to_string(ReplicaMode m);
std::string_view to_string(Command c);
std::string_view to_string(CloudMode c);
Command parse_command(std::string_view s);

struct ExperimentConfig {
  Command command = Command::simulate;

  // Model: REM, or a mixture of pure p-spin terms with a coupling law.
  bool rem = false;
  std::vector<MixtureTerm> terms{{2, 1.0}};
  CouplingKind coupling = CouplingKind::gaussian;
  SamplerHint sampler = SamplerHint::automatic;

  int n = 100;
  MRule m_rule = MRule::fixed;
  double m_value = 10.0;
  double epsilon = 0.0;

  std::vector<Interval> window{{0.0, 1.0}};
  std::optional<double> beta;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  ReplicaMode mode = ReplicaMode::quenched;
  CloudMode cloud_mode = CloudMode::automatic;

  // simulate
  int max_order = 3;
  double gof_alpha = 0.01;
  bool references = true;

  // theory
  std::string scan = "n";  // "n" or "epsilon"
  std::vector<int> n_values{100, 400, 1600};
  std::vector<double> eps_values{0.0};
  int order = 2;
  int quadrature_nodes = kDefaultQuadratureNodes;
  bool semianalytic = true;

  // comb
  std::string table = "pairs";  // pairs | triples | rates
  bool verify = false;
  double c1 = 0.6;
  double c2 = 1.6;
  EmptyThreshold empty_threshold = EmptyThreshold::literal_log2;

  // gibbs
  std::size_t pd_trials = 20000;

  std::string csv;  // optional CSV table path

  ModelSpec model() const;
  // m for a given n under the m rule.
  double m_for(int n_) const;
  double m() const { return m_for(n); }
  BorelWindow borel_window() const;
};

// Ordered key -> raw text value.
using KeyValues = std::map<std::string, std::string>;

// Lines "key = value"; blank lines and '#' comments ignored.
KeyValues parse_key_values(std::string_view text);

// "key=value"
void apply_override(KeyValues& kv, std::string_view assignment);

// Typed config from raw values; unknown keys and malformed values raise
// ConfigError naming the key. Module preconditions are checked here.
ExperimentConfig config_from_key_values(const KeyValues& kv);

// Every field, in a fixed order, with doubles printed round-trip exactly.
std::string serialize_config(const ExperimentConfig& cfg);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

}  // namespace remlab
