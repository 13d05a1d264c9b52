#pragma once

#include "novlab/evolve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace novlab {

// Flat key = value configuration with dotted section prefixes.  Unknown keys
// are rejected by name; serialize() followed by parse() reproduces the struct
// exactly.
struct ExperimentConfig {
    std::string experiment = "peakon-travel";
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    double grid_x_left = -25.0;
    double grid_dx = 0.05;
    std::int64_t grid_n = 1201;

    std::string init_kind = "peakon";  // peakon | peakon_bump | multipeakon |
                                       // gaussian_momentum | field_csv | field_bin
    double init_c = 1.0;
    double init_x0 = 0.0;
    double init_bump_amp = 0.0;
    double init_bump_center = 0.0;
    double init_bump_width = 1.0;
    std::vector<double> init_q;
    std::vector<double> init_p;
    std::string init_file;

    double evolve_cfl = 0.4;
    double evolve_t_end = 1.0;
    double evolve_snapshot_every = 0.1;
    std::string evolve_limiter = "upwind1";  // upwind1 | weno3

    double mp_t_end = 10.0;
    double mp_rtol = 1e-10;
    double mp_gap_floor = 1e-6;
    double mp_sample_every = 0.0;

    std::vector<std::int64_t> modulation_n0_candidates = {4, 8, 16, 32};
    double modulation_sigma = 1.0;
    double modulation_window_A = 10.0;
    double modulation_guess = 0.0;

    std::vector<double> windows_R_list = {6.0, 12.0, 18.0, 24.0};
    double windows_z_rate = 2.0 / 3.0;
    double windows_t0 = -1.0;  // < 0: anchor at the final stored time

    std::vector<double> front_gamma_fracs = {0.5};
    double front_delta = 0.5;

    double edge_rel_threshold = 1e-8;

    std::vector<double> sweep_dx_list;
    std::string sweep_metric = "shape_error";  // shape_error | mp_cross |
                                               // y23_drift | energy_drift | sign_min

    bool operator==(const ExperimentConfig&) const = default;

    Grid grid() const { return Grid{grid_x_left, grid_dx, grid_n}; }
    Limiter limiter() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

} // namespace novlab
