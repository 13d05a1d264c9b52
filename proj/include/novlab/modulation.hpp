#pragma once

#include "novlab/evolve.hpp"
#include "novlab/grid.hpp"

#include <string>
#include <vector>

namespace novlab {

struct ModulationSetup {
    int n0 = 0;          // accepted smoothing index
    Field kernel;        // smoothed peak-profile derivative on a centred grid
    double sigma = 1.0;  // half-width of the admissible centre bracket
};

struct CalibrationReport {
    int candidate = 0;
    bool resolvable = false;     // smoothing radius spans at least one cell
    double zero_location = 0.0;  // root of the pairing on [-1/2, 1/2]
    bool unique_zero = false;
    bool monotone = false;       // pairing increases across [-1/2, 1/2]
    double slope_at_zero = 0.0;  // must be >= (1/4) e^{-1/2}
    bool accepted = false;
};

// Scans candidate smoothing indices (ascending) and returns the setup for the
// smallest one whose smoothed-kernel pairing with the peak profile has a
// unique zero at the origin on [-1/2, 1/2], increases across that interval,
// and has slope at least (1/4) e^{-1/2} at the origin.  Throws
// CalibrationError when no candidate qualifies.
ModulationSetup calibrate_n0(const Grid& g, std::span<const int> candidates,
                             std::vector<CalibrationReport>* reports = nullptr,
                             double sigma = 1.0);

// The pairing h(x0) = trapezoid of u(x) * kernel(x - x0); root = crest centre.
double center_pairing(const Field& u, const ModulationSetup& setup, double x0);

// Solves h(x0) = 0 within [guess - sigma, guess + sigma] (safeguarded secant
// over a sign-changing bracket).  No sign change or a degenerate field raises
// ModulationLoss with the given time attached.
double solve_center(const Field& u, const ModulationSetup& setup, double guess,
                    double time_for_errors = 0.0);

struct ModulationTrack {
    std::vector<double> t;
    std::vector<double> x_of_t;
    std::vector<double> xdot;        // centred differences of x_of_t
    std::vector<double> c_of_t;      // squared profile supremum (crest value
                                     // reconstructed between nodes)
    std::vector<double> c_energy;    // E/2, logged alternative estimate
    std::vector<double> orth_resid;  // |pairing| at the solved centre
    std::vector<double> resid_h1;    // ||u - sup(u) profile(. - x)||_{H1}
    std::vector<double> resid_right; // same norm restricted to x > x(t) - A
    double window_A = 10.0;
};

// Tracks the centre through a snapshot sequence, warm-starting each solve at
// the previous centre.  guess0 seeds the first solve.
ModulationTrack track(const std::vector<TimedField>& snapshots, const ModulationSetup& setup,
                      double guess0, double window_A = 10.0);

// CSV export with a header line.
void write_track_csv(const ModulationTrack& tr, const std::string& path);

} // namespace novlab
