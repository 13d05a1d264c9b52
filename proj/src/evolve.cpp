#include "novlab/evolve.hpp"

#include "novlab/errors.hpp"
#include "novlab/interp.hpp"
#include "novlab/nonlocal.hpp"

#include <algorithm>
#include <cmath>

namespace novlab {

namespace {

// Left-biased derivative for the nonnegative advecting speed u^2; zero inflow
// from outside the domain.
std::vector<double> upwind_slope(const Grid& g, const std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<double> d(n);
    d[0] = u[0] / g.dx;
    for (std::size_t i = 1; i < n; ++i) d[i] = (u[i] - u[i - 1]) / g.dx;
    return d;
}

// Third-order upwind-biased reconstruction of the derivative with nonlinear
// smoothness weights (flux form, two two-point stencils, weights 1/3 and 2/3).
std::vector<double> weno3_slope(const Grid& g, const std::vector<double>& u) {
    const std::size_t n = u.size();
    auto at = [&](std::ptrdiff_t i) -> double {
        if (i < 0) return 0.0;
        if (i >= static_cast<std::ptrdiff_t>(n)) return 0.0;
        return u[static_cast<std::size_t>(i)];
    };
    constexpr double eps = 1e-6;
    // reconstruct u at i+1/2 from the left
    std::vector<double> half(n + 1);
    for (std::size_t f = 0; f <= n; ++f) {
        const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(f) - 1;  // upwind cell
        const double um = at(i - 1), u0 = at(i), up = at(i + 1);
        const double p0 = 1.5 * u0 - 0.5 * um;
        const double p1 = 0.5 * u0 + 0.5 * up;
        const double b0 = (u0 - um) * (u0 - um);
        const double b1 = (up - u0) * (up - u0);
        double w0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
        double w1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
        const double ws = w0 + w1;
        half[f] = (w0 * p0 + w1 * p1) / ws;
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (half[i + 1] - half[i]) / g.dx;
    return d;
}

std::vector<double> transport_slope(const Grid& g, const std::vector<double>& u, Limiter lim) {
    return lim == Limiter::upwind1 ? upwind_slope(g, u) : weno3_slope(g, u);
}

std::vector<double> second_diff(const Grid& g, const std::vector<double>& u) {
    const std::size_t n = u.size();
    const double r = 1.0 / (g.dx * g.dx);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = (i == 0) ? u[0] : u[i - 1];
        const double up = (i + 1 == n) ? u[n - 1] : u[i + 1];
        d[i] = (up - 2.0 * u[i] + um) * r;
    }
    return d;
}

} // namespace

Field rhs_weak(const Field& u, Limiter limiter) {
    const Grid& g = u.grid;
    const std::size_t n = u.size();
    const auto up = transport_slope(g, u.values, limiter);
    const auto ux = diff1(u);
    std::vector<double> load(n), cube(n);
    for (std::size_t i = 0; i < n; ++i) {
        load[i] = u[i] * u[i] * u[i] + 1.5 * u[i] * ux[i] * ux[i];
        cube[i] = ux[i] * ux[i] * ux[i];
    }
    const Field pw = helmholtz_inverse(g, load);
    const auto dpw = diff1(g, pw.values);
    const Field pc = helmholtz_inverse(g, cube);
    Field out(g);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = -u[i] * u[i] * up[i] - dpw[i] - 0.5 * pc[i];
    return out;
}

Field rhs_direct(const Field& u, Limiter limiter) {
    const Grid& g = u.grid;
    const std::size_t n = u.size();
    const auto up = transport_slope(g, u.values, limiter);
    const auto ux = diff1(u);
    const auto uxx = second_diff(g, u.values);
    std::vector<double> load(n);
    for (std::size_t i = 0; i < n; ++i)
        load[i] = 3.0 * u[i] * ux[i] * uxx[i] + 2.0 * ux[i] * ux[i] * ux[i] +
                  3.0 * u[i] * u[i] * ux[i];
    const Field pl = helmholtz_inverse(g, load);
    Field out(g);
    for (std::size_t i = 0; i < n; ++i) out[i] = -u[i] * u[i] * up[i] - pl[i];
    return out;
}

namespace {

struct FieldScan {
    double max_abs = 0.0;
    double max_slope = 0.0;
    bool finite = true;
};

FieldScan scan_field(const Field& u) {
    FieldScan s;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(u[i])) {
            s.finite = false;
            return s;
        }
        s.max_abs = std::max(s.max_abs, std::abs(u[i]));
        if (i > 0)
            s.max_slope = std::max(s.max_slope, std::abs(u[i] - u[i - 1]) / u.grid.dx);
    }
    return s;
}

} // namespace

EvolveResult evolve(const Field& u0, const EvolveConfig& cfg,
                    const std::function<void(const StepInfo&)>& on_step) {
    if (!(cfg.cfl > 0.0) || !(cfg.t_end >= 0.0) || !(cfg.snapshot_every > 0.0))
        throw InvalidParameter("evolve: cfl, t_end, snapshot_every must be positive");
    for (double v : u0.values)
        if (!std::isfinite(v)) throw PreconditionError("evolve: initial field must be finite");

    EvolveResult res;
    res.snapshots.push_back({0.0, u0});
    Field u = u0;
    double t = 0.0;
    std::int64_t emit_k = 1;
    double next_emit = cfg.snapshot_every;

    auto broken = [&](const FieldScan& s) { return !s.finite || s.max_slope > cfg.slope_limit; };

    {
        const FieldScan s0 = scan_field(u);
        if (broken(s0)) {
            res.status = EvolveStatus::blow_up;
            res.stop_time = 0.0;
            res.message = "wave breaking detected in initial data";
            return res;
        }
    }

    while (t < cfg.t_end) {
        double vmax = 0.0;
        for (double v : u.values) vmax = std::max(vmax, v * v);
        double dt = cfg.cfl * u.grid.dx / std::max(vmax, cfg.speed_floor);
        dt = std::min(dt, cfg.t_end - t);
        // land exactly on the emission cadence so stored times are uniform
        bool emit = false;
        if (next_emit < cfg.t_end - 1e-12 && t + dt >= next_emit - 1e-12) {
            dt = next_emit - t;
            emit = true;
        }

        // Shu-Osher three-stage strong-stability-preserving scheme
        Field k1 = rhs_weak(u, cfg.limiter);
        Field u1 = u;
        for (std::size_t i = 0; i < u.size(); ++i) u1[i] += dt * k1[i];
        Field k2 = rhs_weak(u1, cfg.limiter);
        Field u2 = u;
        for (std::size_t i = 0; i < u.size(); ++i)
            u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * k2[i]);
        Field k3 = rhs_weak(u2, cfg.limiter);
        Field un = u;
        for (std::size_t i = 0; i < u.size(); ++i)
            un[i] = (1.0 / 3.0) * u[i] + (2.0 / 3.0) * (u2[i] + dt * k3[i]);

        const FieldScan s = scan_field(un);
        if (broken(s)) {
            res.status = EvolveStatus::blow_up;
            res.stop_time = t;
            res.message = "wave breaking detected at t = " + std::to_string(t + dt);
            if (res.snapshots.back().t < t) res.snapshots.push_back({t, u});
            return res;
        }

        u = std::move(un);
        t = emit ? next_emit : t + dt;
        if (on_step) on_step({t, dt, s.max_abs, s.max_slope});

        if (emit) {
            res.snapshots.push_back({t, u});
            next_emit = static_cast<double>(++emit_k) * cfg.snapshot_every;
        }
    }
    if (res.snapshots.back().t < cfg.t_end) res.snapshots.push_back({cfg.t_end, u});
    res.stop_time = cfg.t_end;
    return res;
}

namespace {

struct SnapshotInterp {
    std::vector<double> times;
    std::vector<CubicInterp> u;

    double value(double t, double x, std::size_t seg) const {
        const double t0 = times[seg], t1 = times[seg + 1];
        const double w = (t1 == t0) ? 0.0 : (t - t0) / (t1 - t0);
        return (1.0 - w) * u[seg](x) + w * u[seg + 1](x);
    }
    double slope(double t, double x, std::size_t seg) const {
        const double t0 = times[seg], t1 = times[seg + 1];
        const double w = (t1 == t0) ? 0.0 : (t - t0) / (t1 - t0);
        return (1.0 - w) * u[seg].derivative(x) + w * u[seg + 1].derivative(x);
    }
};

} // namespace

FlowMap flow_map(const std::vector<TimedField>& snapshots, std::span<const double> seeds) {
    if (snapshots.size() < 2) throw PreconditionError("flow_map: need at least two snapshots");
    const Grid& g = snapshots.front().u.grid;
    const bool forward = snapshots.back().t > snapshots.front().t;
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        const double step = snapshots[k].t - snapshots[k - 1].t;
        const double mag = std::abs(step);
        if ((forward && step <= 0.0) || (!forward && step >= 0.0))
            throw PreconditionError("flow_map: snapshot times must be strictly monotone");
        if (mag > g.dx * (1.0 + 1e-9))
            throw PreconditionError("flow_map: snapshot spacing must not exceed dx");
    }

    SnapshotInterp si;
    si.times.reserve(snapshots.size());
    si.u.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        si.times.push_back(s.t);
        si.u.emplace_back(g.x_left, g.dx, s.u.values);
    }

    FlowMap fm;
    fm.times = si.times;
    fm.seeds.assign(seeds.begin(), seeds.end());
    fm.frozen.assign(seeds.size(), false);
    fm.paths.assign(snapshots.size(), std::vector<double>(seeds.size()));
    fm.slopes.assign(snapshots.size(), std::vector<double>(seeds.size(), 1.0));
    for (std::size_t j = 0; j < seeds.size(); ++j) fm.paths[0][j] = seeds[j];

    for (std::size_t k = 0; k + 1 < snapshots.size(); ++k) {
        const double t0 = si.times[k], t1 = si.times[k + 1];
        const double h = t1 - t0;
        for (std::size_t j = 0; j < seeds.size(); ++j) {
            double q = fm.paths[k][j];
            auto f = [&](double t, double x) {
                const double v = si.value(t, x, k);
                return v * v;
            };
            const double a1 = f(t0, q);
            const double a2 = f(t0 + 0.5 * h, q + 0.5 * h * a1);
            const double a3 = f(t0 + 0.5 * h, q + 0.5 * h * a2);
            const double a4 = f(t1, q + h * a3);
            double qn = q + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            if (qn < g.x_left || qn > g.x_right()) {
                qn = std::clamp(qn, g.x_left, g.x_right());
                fm.frozen[j] = true;
            }
            fm.paths[k + 1][j] = qn;
            // stretching factor: exp(2 int u u_x) via trapezoid along the path
            const double g0 = si.value(t0, q, k) * si.slope(t0, q, k);
            const double g1 = si.value(t1, qn, k) * si.slope(t1, qn, k);
            fm.slopes[k + 1][j] = fm.slopes[k][j] * std::exp(h * (g0 + g1));
        }
    }

    for (std::size_t k = 0; k < fm.paths.size(); ++k)
        for (std::size_t j = 1; j < fm.paths[k].size(); ++j)
            if (fm.seeds[j] > fm.seeds[j - 1] && !(fm.paths[k][j] > fm.paths[k][j - 1]) &&
                !fm.frozen[j] && !fm.frozen[j - 1])
                throw InternalError("flow_map: characteristic paths crossed");
    return fm;
}

double flow_invariant_residual(const std::vector<TimedField>& snapshots, const FlowMap& fm) {
    if (snapshots.size() != fm.times.size())
        throw InvalidParameter("flow_invariant_residual: snapshot/path mismatch");
    const MomentumField y0 = momentum_density(snapshots.front().u);
    double ymax = 0.0, ymass = 0.0;
    for (double v : y0.values) {
        ymax = std::max(ymax, std::abs(v));
        ymass += std::abs(v) * y0.grid.dx;
    }
    if (ymax <= 0.0) return 0.0;
    if (ymax * y0.grid.dx > 0.5 * ymass)
        throw UnsupportedInput(
            "flow_invariant_residual: spike-like momentum density is not resolvable");

    std::vector<double> ref(fm.seeds.size());
    {
        CubicInterp y0i(y0.grid.x_left, y0.grid.dx, y0.values);
        for (std::size_t j = 0; j < fm.seeds.size(); ++j) ref[j] = y0i(fm.seeds[j]);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const MomentumField yk = momentum_density(snapshots[k].u);
        CubicInterp yi(yk.grid.x_left, yk.grid.dx, yk.values);
        for (std::size_t j = 0; j < fm.seeds.size(); ++j) {
            if (fm.frozen[j]) continue;
            const double qx = fm.slopes[k][j];
            const double val = yi(fm.paths[k][j]) * qx * std::sqrt(qx);
            worst = std::max(worst, std::abs(val - ref[j]));
        }
    }
    return worst / ymax;
}

} // namespace novlab
