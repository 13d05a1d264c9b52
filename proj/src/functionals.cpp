#include "novlab/functionals.hpp"

#include "novlab/errors.hpp"
#include "novlab/field_io.hpp"
#include "novlab/interp.hpp"
#include "novlab/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace novlab {

DiagnosticsRow diagnostics(const Field& u, double t) {
    const Grid& g = u.grid;
    const std::size_t n = u.size();
    const auto ux = diff1(u);
    std::vector<double> e(n), f(n);
    double sup = 0.0;
    std::size_t ipeak = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u2 = u[i] * u[i], x2 = ux[i] * ux[i];
        e[i] = u2 + x2;
        f[i] = u2 * u2 + 2.0 * u2 * x2 - x2 * x2 / 3.0;
        if (std::abs(u[i]) > sup) {
            sup = std::abs(u[i]);
            ipeak = i;
        }
    }
    const MomentumField y = momentum_density(u);
    double mass = 0.0, q23 = 0.0;
    for (double v : y.values) {
        mass += v * g.dx;
        q23 += std::pow(std::abs(v), 2.0 / 3.0) * g.dx;
    }
    DiagnosticsRow row;
    row.t = t;
    row.E = trapezoid(g, e);
    row.F = trapezoid(g, f);
    row.M_tot = mass;
    row.y23 = std::pow(q23, 1.5);
    row.sup_u = sup;
    row.x_peak = g.x(static_cast<std::int64_t>(ipeak));
    return row;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "t,E,F,M_tot,y23,sup_u,x_peak,lyap,x_gamma\n";
    for (const auto& r : rows) {
        out << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.F) << ','
            << format_double(r.M_tot) << ',' << format_double(r.y23) << ','
            << format_double(r.sup_u) << ',' << format_double(r.x_peak) << ','
            << format_double(r.lyap) << ',' << format_double(r.x_gamma) << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

double weighted_energy(const Field& u, double shift) {
    const Grid& g = u.grid;
    const std::size_t n = u.size();
    const auto ux = diff1(u);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = g.x(static_cast<std::int64_t>(i)) - shift;
        e[i] = (u[i] * u[i] + ux[i] * ux[i]) * psi_value(z);
    }
    return trapezoid(g, e);
}

WindowSeries monotonicity_series(const std::vector<TimedField>& snapshots, const FramePath& frame,
                                 const WindowSpec& w) {
    if (snapshots.empty()) throw InvalidParameter("monotonicity_series: no snapshots");
    if (frame.t.size() != snapshots.size() || frame.x.size() != snapshots.size())
        throw InvalidParameter("monotonicity_series: frame must be sampled at snapshot times");
    for (std::size_t k = 1; k < frame.x.size(); ++k)
        if (!(frame.x[k] > frame.x[k - 1]))
            throw PreconditionError("monotonicity_series: frame must move strictly forward");

    std::size_t k0 = snapshots.size();
    for (std::size_t k = 0; k < snapshots.size(); ++k)
        if (std::abs(snapshots[k].t - w.t0) <= 1e-9 * std::max(1.0, std::abs(w.t0))) k0 = k;
    if (k0 == snapshots.size())
        throw InvalidParameter("monotonicity_series: anchor t0 is not a stored time");

    const double sgn = (w.side == WindowSide::right) ? 1.0 : -1.0;
    WindowSeries out;
    out.t.reserve(snapshots.size());
    out.I.reserve(snapshots.size());
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const double shift = frame.x[k0] + sgn * w.R + w.z_rate * (frame.x[k] - frame.x[k0]);
        out.t.push_back(snapshots[k].t);
        out.I.push_back(weighted_energy(snapshots[k].u, shift));
    }
    double excess = 0.0;
    for (std::size_t k = 0; k <= k0; ++k) {
        const double d = (w.side == WindowSide::right) ? out.I[k0] - out.I[k]
                                                       : out.I[k] - out.I[k0];
        excess = std::max(excess, d);
    }
    out.excess = excess;
    return out;
}

double right_edge(const MomentumField& y, double rel_threshold) {
    const Grid& g = y.grid;
    double mass = 0.0;
    for (double v : y.values) mass += v * g.dx;
    if (!(mass > 0.0)) throw UndefinedEdge("right_edge: total momentum mass is not positive");
    const double thr = rel_threshold * mass;
    double tail = 0.0;
    for (std::int64_t i = g.n - 1; i-- > 0;) {
        tail += y[static_cast<std::size_t>(i + 1)] * g.dx;
        if (tail > thr) return g.x(i);
    }
    return g.x_left;
}

LyapunovSeries lyapunov_series(const std::vector<TimedField>& snapshots,
                               std::span<const double> edges) {
    if (snapshots.size() != edges.size())
        throw InvalidParameter("lyapunov_series: need one edge per snapshot");
    LyapunovSeries out;
    out.t.reserve(snapshots.size());
    out.value.reserve(snapshots.size());
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const Field& u = snapshots[k].u;
        const Grid& g = u.grid;
        CubicInterp ui(g.x_left, g.dx, u.values);
        out.t.push_back(snapshots[k].t);
        out.value.push_back(ui(edges[k]));
        const auto ux = diff1(u);
        const double lo = edges[k] + 2.0 * g.dx;
        const double hi = edges[k] + 12.0;
        for (std::int64_t i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            if (x < lo || x > hi) continue;
            out.max_edge_identity = std::max(
                out.max_edge_identity,
                std::abs(u[static_cast<std::size_t>(i)] + ux[static_cast<std::size_t>(i)]));
        }
    }
    return out;
}

double x_gamma_solve(const Field& u, double gamma) {
    const DiagnosticsRow d = diagnostics(u);
    if (!(gamma > 0.0) || !(gamma < d.E))
        throw InvalidParameter("x_gamma_solve: gamma must lie in (0, E)");
    const Grid& g = u.grid;
    double lo = g.x_left - 90.0;   // value(lo) ~ E, above any admissible gamma
    double hi = g.x_right() + 90.0;  // value(hi) ~ 0
    auto val = [&](double s) { return weighted_energy(u, s); };
    double flo = val(lo), fhi = val(hi);
    if (!(flo >= gamma && fhi <= gamma))
        throw InvalidParameter("x_gamma_solve: gamma unreachable on this domain");
    const double tol = 1e-10 * d.E;
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = val(mid);
        if (std::abs(fmid - gamma) <= tol && hi - lo <= 1e-9) break;
        if (fmid >= gamma)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(fmid - gamma) > tol)
        throw InternalError("x_gamma_solve: bisection failed to meet the residual bound");
    return mid;
}

std::vector<double> front_series(const std::vector<TimedField>& snapshots, double gamma) {
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(x_gamma_solve(s.u, gamma));
    return out;
}

FrontRateResult front_rate_check(const std::vector<TimedField>& snapshots,
                                 std::span<const double> front, double delta) {
    if (snapshots.size() != front.size())
        throw InvalidParameter("front_rate_check: need one front value per snapshot");
    if (snapshots.size() < 2) throw InvalidParameter("front_rate_check: need at least two snapshots");
    if (!(delta > 0.0)) throw InvalidParameter("front_rate_check: delta must be positive");

    FrontRateResult res;
    res.min_step = std::numeric_limits<double>::infinity();
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < front.size(); ++k)
        res.min_step = std::min(res.min_step, front[k] - front[k - 1]);

    // g[k] = int u(t_k)^2 W'(x - front[anchor]) dx, re-evaluated per anchor.
    for (std::size_t k0 = 0; k0 < front.size(); ++k0) {
        std::size_t k1 = front.size();
        for (std::size_t m = k0 + 1; m < front.size(); ++m)
            if (std::abs(snapshots[m].t - snapshots[k0].t - delta) <= 1e-6) k1 = m;
        if (k1 == front.size()) continue;

        double time_integral = 0.0;
        double prev = 0.0;
        for (std::size_t m = k0; m <= k1; ++m) {
            const Field& u = snapshots[m].u;
            const Grid& g = u.grid;
            std::vector<double> w(u.size());
            for (std::size_t i = 0; i < u.size(); ++i)
                w[i] = u[i] * u[i] * psi_prime(g.x(static_cast<std::int64_t>(i)) - front[k0]);
            const double cur = trapezoid(g, w);
            if (m > k0) time_integral += 0.5 * (prev + cur) * (snapshots[m].t - snapshots[m - 1].t);
            prev = cur;
        }
        const double lhs = front[k1] - front[k0];
        res.worst_margin = std::min(res.worst_margin, lhs - 0.4 * time_integral);
        ++res.pairs;
    }
    if (res.pairs == 0) throw InvalidParameter("front_rate_check: no stored pair spans delta");
    return res;
}

} // namespace novlab
