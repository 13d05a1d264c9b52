#pragma once

#include "novlab/grid.hpp"

#include <string>
#include <vector>

namespace novlab {

struct MultipeakonState {
    double t = 0.0;
    std::vector<double> q;  // positions, strictly increasing
    std::vector<double> p;  // amplitudes

    std::size_t size() const { return q.size(); }
};

struct MultipeakonRates {
    std::vector<double> dq;
    std::vector<double> dp;
};

// Interaction rates
//   dq_i = ( sum_j p_j e^{-|q_i-q_j|} )^2
//   dp_i = p_i ( sum_j p_j sgn(q_i-q_j) e^{-|q_i-q_j|} ) ( sum_k p_k e^{-|q_i-q_k|} )
// with sgn(0) = 0.  Factored O(n^2) evaluation; the triple-sum form is kept
// as a test oracle.
MultipeakonRates mp_rhs(const MultipeakonState& s);

enum class MpStatus { ok, collision, step_underflow };

struct MpEvolveConfig {
    double t_end = 10.0;
    double rtol = 1e-10;
    double gap_floor = 1e-6;   // halt when neighbouring positions get this close
    double sample_every = 0.0; // 0: emit accepted steps only; else dense cadence
};

struct MpEvolveResult {
    std::vector<MultipeakonState> states;  // includes t=0 and the final state
    MpStatus status = MpStatus::ok;
    double stop_time = 0.0;
    std::string message;
};

// Adaptive Dormand-Prince 5(4) with PI step control.  Halts with a collision
// signal when any gap drops below gap_floor, carrying the last good state.
MpEvolveResult mp_evolve(const MultipeakonState& s0, const MpEvolveConfig& cfg);

// Closed-form H^1 energy of the peakon superposition: 2 sum_ij p_i p_j e^{-|q_i-q_j|}.
double mp_energy(const MultipeakonState& s);

// Field synthesis at the state's positions/amplitudes.
Field mp_field(const MultipeakonState& s, const Grid& g);

// CSV trajectory export: t,q1..qn,p1..pn with a header line.
void write_trajectory_csv(const std::vector<MultipeakonState>& states, const std::string& path);

} // namespace novlab
