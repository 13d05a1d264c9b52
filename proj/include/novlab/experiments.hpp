#pragma once

#include "novlab/config.hpp"
#include "novlab/grid.hpp"
#include "novlab/oracles.hpp"

#include <string>
#include <vector>

namespace novlab {

struct CheckLine {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string op = "<=";  // how value relates to threshold when passing
};

struct RunOutcome {
    int exit_code = 0;  // 0 pass, 2 check failed, 3 blow-up/collision
    std::string status = "ok";
    std::vector<CheckLine> checks;
    std::string message;
};

// Per-subcommand baseline configuration (grids, initial data, horizons) used
// when no config file is given.  Throws ConfigError on an unknown name.
ExperimentConfig default_config(const std::string& experiment);

// Initial velocity field from the init.* keys.  peakon_bump and
// gaussian_momentum build a sign-definite momentum density and invert it, so
// the result is admissible to round-off.
Field build_initial(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment ("verify" runs lemma-oracles plus the identity
// suite), writes artifacts under cfg.out_dir, and returns the outcome.
// jobs > 1 parallelises sweep points and corpus entries; outputs are
// byte-identical regardless of jobs.
RunOutcome run_experiment(const ExperimentConfig& cfg, int jobs = 1, bool quiet = false);

// Rebuilds <run_dir>/report.txt from the artifacts of a finished or
// interrupted run.  Missing artifacts are listed in the report; returns 0
// only when everything expected is present and all recorded checks passed.
int export_report(const std::string& run_dir, bool quiet = false);

// The lemma-oracle check battery (seeded corpus + structural verifiers) and
// the algebraic identity battery; exposed for the verify path and tests.
OracleReport oracle_battery(const ExperimentConfig& cfg, int jobs);
std::vector<CheckLine> identity_battery(const ExperimentConfig& cfg);

} // namespace novlab
