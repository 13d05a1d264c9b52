#pragma once

#include "novlab/evolve.hpp"
#include "novlab/grid.hpp"

#include <limits>
#include <string>
#include <vector>

namespace novlab {

struct DiagnosticsRow {
    double t = 0.0;
    double E = 0.0;       // trapezoid u^2 + u_x^2
    double F = 0.0;       // trapezoid u^4 + 2 u^2 u_x^2 - (1/3) u_x^4
    double M_tot = 0.0;   // sum y dx
    double y23 = 0.0;     // (sum |y|^{2/3} dx)^{3/2}
    double sup_u = 0.0;
    double x_peak = 0.0;  // node of max |u|
    double lyap = std::numeric_limits<double>::quiet_NaN();     // u at the momentum right edge
    double x_gamma = std::numeric_limits<double>::quiet_NaN();  // front position, when tracked
};

DiagnosticsRow diagnostics(const Field& u, double t = 0.0);

// CSV log with one header line; columns exactly in DiagnosticsRow order.
void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path);

// trapezoid of (u^2 + u_x^2) Psi(x - shift).
double weighted_energy(const Field& u, double shift);

// Path of a tracked frame position x(t), sampled at the stored times.
struct FramePath {
    std::vector<double> t;
    std::vector<double> x;
};

enum class WindowSide { right, left };

struct WindowSpec {
    double t0 = 0.0;        // anchor time (must be one of the stored times)
    double R = 6.0;         // window offset
    double z_rate = 2.0 / 3.0;  // fraction of the frame motion given to the window
    WindowSide side = WindowSide::right;
};

struct WindowSeries {
    std::vector<double> t;
    std::vector<double> I;
    double excess = 0.0;  // max over t <= t0 of (I(t0) - I(t))_+ (right side)
};

// I(t) = weighted_energy(u(t), x(t0) +- R + z_rate (x(t) - x(t0))).
// Requires the frame to move forward: min frame speed > 0.
WindowSeries monotonicity_series(const std::vector<TimedField>& snapshots, const FramePath& frame,
                                 const WindowSpec& w);

// Largest node x with tail mass sum_{x' > x} y dx above rel_threshold * M_tot.
double right_edge(const MomentumField& y, double rel_threshold = 1e-8);

struct LyapunovSeries {
    std::vector<double> t;
    std::vector<double> value;        // u interpolated at the edge path
    double max_edge_identity = 0.0;   // max |u + u_x| at nodes right of the edge
};

// edges[k]: support right edge at snapshot k (e.g. from right_edge of the
// momentum density).  The identity residual scans nodes in
// [edge + 2 dx, edge + 12].
LyapunovSeries lyapunov_series(const std::vector<TimedField>& snapshots,
                               std::span<const double> edges);

// Solves weighted_energy(u, s) = gamma for the front position s (bisection;
// the map s -> value is strictly decreasing).  gamma must lie in (0, E(u)).
double x_gamma_solve(const Field& u, double gamma);

// x_gamma at every stored snapshot for a fixed level gamma.
std::vector<double> front_series(const std::vector<TimedField>& snapshots, double gamma);

struct FrontRateResult {
    double min_step = 0.0;      // min over consecutive snapshots of x(t_{k+1}) - x(t_k)
    double worst_margin = 0.0;  // min over anchors of lhs - (2/5) * time-space integral
    int pairs = 0;              // anchor pairs (t, t + delta) found on the stored times
};

// Lower-bound check for the front motion: over every stored pair
// (t_k, t_k + delta),
//   x(t_k + delta) - x(t_k) >= (2/5) int_{t_k}^{t_k+delta} int u^2 W'(x - x(t_k)) dx dt
// up to quadrature tolerance; the inner shift is frozen at the interval start.
FrontRateResult front_rate_check(const std::vector<TimedField>& snapshots,
                                 std::span<const double> front, double delta);

} // namespace novlab
