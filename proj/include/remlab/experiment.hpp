#pragma once

#include <ostream>

#include "remlab/config.hpp"

namespace remlab {

// Runs cfg.command and writes one JSON object per line to `out`. Each record
// carries format_version and the resolved config. Progress lines go to `log`
// when it is non-null. A CSV copy of scan tables is written to cfg.csv when set.
void run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log = nullptr);

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log = nullptr);
void cmd_theory(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log = nullptr);
void cmd_comb(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log = nullptr);
void cmd_gibbs(const ExperimentConfig& cfg, std::ostream& out, std::ostream* log = nullptr);

}  // namespace remlab
