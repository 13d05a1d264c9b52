#pragma once

#include "novlab/evolve.hpp"
#include "novlab/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace novlab {

struct GapResult {
    double min_gap = 0.0;  // min over the core window of p*(3 v v_x^2 + 5 v^3) - 2 v^3
    double argmin_x = 0.0;
};

// Pointwise lower-bound check for admissible (nonnegative-momentum) fields.
// The continuum inequality degenerates to 0 >= 0 where v vanishes — for any
// decaying profile the gap shrinks like 3 C^2 v in the far tail — so the
// minimum is taken over the core window v >= core_floor * max(v), where it
// stays O(max v)^3 for genuinely smooth profiles and ~0 in the single-peak
// case. Throws PreconditionError when momentum_density(v) is not
// sign-admissible.
GapResult check_three_five_two(const Field& v, double core_floor = 0.25);

// Rebuilds v and v_x from one-sided first-order exponential prefix integrals
// of the momentum density and returns the max reconstruction error
// (against v and its centred derivative); O(dx) by construction.
double check_representation(const Field& v);

struct DecayFit {
    double C = 0.0;   // amplitude of the fitted C e^{-r/K}
    double K = 0.0;   // decay scale
    double r2 = 0.0;  // goodness of the log-linear fit
    bool accepted() const { return r2 >= 0.98 && K >= 1.0 - 1e-6; }
};

// Log-linear least squares of u against distance from `center` over
// r_min <= |x - center| <= r_max (both tails pooled; r_max - r_min >= 5).
// Nonpositive samples inside the window raise UnsupportedInput.
DecayFit decay_fit(const Field& u, double center, double r_min, double r_max);

struct CharacteristicCheck {
    double max_mismatch = 0.0;  // sup over retained samples
    int skipped_near_crest = 0; // samples within 3 dx of the crest
    double domination_defect = 0.0;  // max of |u_x| - u along the paths
};

// Compares the finite-difference time derivative of u_x along stored flow
// paths against 0.5 u (u^2 - u_x^2) - 0.5 [p_plus*(u-u_x)^3 + p_minus*(u+u_x)^3],
// and records how far |u_x| <= u (preserved by sign-admissible momentum)
// drifts along the same paths.
CharacteristicCheck check_characteristic_derivative(const std::vector<TimedField>& snapshots,
                                                    const FlowMap& fm);

struct CorpusMember {
    MomentumField y;
    Field v;          // helmholtz_inverse(y)
    int bumps = 0;
    int spikes = 0;   // nonzero marks the single-crest stratum
};

// Seeded random admissible momentum drawn from two strata: with probability
// 1/3 a single dominant momentum spike plus a co-located bump at most 1e-3
// of its size (a near-single-crest profile, where the pointwise bound is
// close to equality), otherwise a cluster of 1-5 wide O(1) Gaussian bumps
// within +-4 of a common centre (smooth profiles bounded away from
// equality). Features always sit well inside the grid interior.
CorpusMember random_y_plus_member(std::uint64_t seed, const Grid& g);

struct OracleCheckLine {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct OracleReport {
    std::uint64_t seed = 0;
    std::vector<OracleCheckLine> lines;
    bool all_pass() const;
};

void write_oracle_report(const OracleReport& rep, const std::string& path);

} // namespace novlab
