#include "novlab/config.hpp"
#include "novlab/errors.hpp"
#include "novlab/experiments.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

const std::vector<std::string> kExperiments = {
    "peakon-travel", "multipeakon",     "stability",     "monotonicity",
    "transport-front", "lyapunov",      "lemma-oracles", "convergence-study",
    "verify",
};

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    int jobs = 1;
    double dx_override = 0.0;
    bool quiet = false;
};

void add_run_flags(CLI::App* cmd, CliArgs& a) {
    cmd->add_option("--config", a.config_path, "configuration file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out_dir, "output directory (default from config)");
    cmd->add_option("--seed", a.seed, "seed override");
    cmd->add_option("--jobs", a.jobs, "worker threads for sweep/corpus points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dx-override", a.dx_override,
                    "replace grid.dx, keeping the domain width")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", a.quiet, "suppress progress output");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for peakon dynamics of a cubic nonlocal wave equation"};
    app.require_subcommand(1);

    CliArgs args;
    for (const auto& name : kExperiments) add_run_flags(app.add_subcommand(name), args);

    std::string report_dir;
    bool report_quiet = false;
    CLI::App* report_cmd = app.add_subcommand("report", "rebuild report.txt from run artifacts");
    report_cmd->add_option("--out", report_dir, "run directory to summarise")->required();
    report_cmd->add_flag("--quiet", report_quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 4;
    }

    try {
        if (report_cmd->parsed()) return novlab::export_report(report_dir, report_quiet);

        const std::string name = app.get_subcommands().front()->get_name();
        novlab::ExperimentConfig cfg = args.config_path.empty()
                                           ? novlab::default_config(name)
                                           : novlab::load_config(args.config_path);
        cfg.experiment = name;
        if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
        if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
        if (args.dx_override > 0.0) {
            const double width = static_cast<double>(cfg.grid_n - 1) * cfg.grid_dx;
            cfg.grid_n = static_cast<std::int64_t>(std::llround(width / args.dx_override)) + 1;
            cfg.grid_dx = args.dx_override;
        }
        const novlab::RunOutcome out = novlab::run_experiment(cfg, args.jobs, args.quiet);
        return out.exit_code;
    } catch (const novlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
