#include "novlab/experiments.hpp"

#include "novlab/errors.hpp"
#include "novlab/evolve.hpp"
#include "novlab/field_io.hpp"
#include "novlab/functionals.hpp"
#include "novlab/modulation.hpp"
#include "novlab/multipeakon.hpp"
#include "novlab/nonlocal.hpp"
#include "novlab/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace novlab {
namespace {

void note(bool quiet, const std::string& line) {
    if (!quiet) std::fprintf(stdout, "%s\n", line.c_str());
}

CheckLine make_check(const std::string& name, double value, double threshold,
                     const std::string& op) {
    CheckLine c;
    c.name = name;
    c.value = value;
    c.threshold = threshold;
    c.op = op;
    if (op == "<=") c.pass = value <= threshold;
    else if (op == ">=") c.pass = value >= threshold;
    else if (op == "<") c.pass = value < threshold;
    else if (op == ">") c.pass = value > threshold;
    else throw InternalError("make_check: bad op " + op);
    return c;
}

void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mx;
    std::exception_ptr first_err;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mx);
                    if (!first_err) first_err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_err) std::rethrow_exception(first_err);
}

double l2_diff(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw InvalidParameter("l2_diff: grids differ");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(trapezoid(a.grid, d));
}

double lsq_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InvalidParameter("lsq_slope: need matched samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidParameter("lsq_slope: degenerate abscissae");
    return sxy / sxx;
}

void write_snapshots(const fs::path& dir, const std::vector<TimedField>& snaps) {
    fs::create_directories(dir);
    std::ofstream idx(dir / "index.csv");
    if (!idx) throw Error("cannot open for writing: " + (dir / "index.csv").string());
    idx << "t,file,sup_u\n";
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04zu.csv", k);
        write_field_csv(snaps[k].u, (dir / name).string());
        idx << format_double(snaps[k].t) << ',' << name << ','
            << format_double(norms(snaps[k].u).sup) << '\n';
    }
    if (!idx) throw Error("write failed: " + (dir / "index.csv").string());
}

void write_checks_file(const fs::path& path, const ExperimentConfig& cfg, const RunOutcome& out) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << "experiment = " << cfg.experiment << '\n';
    f << "seed = " << cfg.seed << '\n';
    f << "status = " << out.status << '\n';
    if (!out.message.empty()) f << "message = " << out.message << '\n';
    for (const auto& c : out.checks) {
        f << "check = " << c.name << '\n';
        f << "value = " << format_double(c.value) << '\n';
        f << "threshold = " << format_double(c.threshold) << '\n';
        f << "op = " << c.op << '\n';
        f << "verdict = " << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    bool all = true;
    for (const auto& c : out.checks) all = all && c.pass;
    f << "overall = " << (out.status != "ok" ? "FAIL" : (all ? "PASS" : "FAIL")) << '\n';
    if (!f) throw Error("write failed: " + path.string());
}

void print_checks(bool quiet, const RunOutcome& out) {
    if (quiet) return;
    for (const auto& c : out.checks)
        std::fprintf(stdout, "[%s] %s: %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                     c.value, c.op.c_str(), c.threshold);
}

int settle_exit(RunOutcome& out) {
    if (out.status != "ok") {
        out.exit_code = 3;
        return 3;
    }
    for (const auto& c : out.checks)
        if (!c.pass) {
            out.exit_code = 2;
            return 2;
        }
    out.exit_code = 0;
    return 0;
}

Field build_initial_on(const ExperimentConfig& cfg, const Grid& g) {
    const std::string& kind = cfg.init_kind;
    if (kind == "peakon") return peakon_field({cfg.init_c, cfg.init_x0, +1}, 0.0, g);
    if (kind == "peakon_bump") {
        if (cfg.init_bump_amp < 0.0)
            throw ConfigError("init.bump_amp: must be >= 0 for a sign-definite start");
        if (!(cfg.init_bump_width > 0.0)) throw ConfigError("init.bump_width: must be positive");
        MomentumField y = peakon_momentum_spike({cfg.init_c, cfg.init_x0, +1}, 0.0, g);
        for (std::int64_t i = 0; i < g.n; ++i) {
            const double s = (g.x(i) - cfg.init_bump_center) / cfg.init_bump_width;
            y[static_cast<std::size_t>(i)] += cfg.init_bump_amp * bump_profile(s);
        }
        return helmholtz_inverse(y);
    }
    if (kind == "gaussian_momentum") {
        if (!(cfg.init_bump_amp > 0.0))
            throw ConfigError("init.bump_amp: gaussian_momentum needs a positive amplitude");
        if (!(cfg.init_bump_width > 0.0)) throw ConfigError("init.bump_width: must be positive");
        MomentumField y(g);
        for (std::int64_t i = 0; i < g.n; ++i) {
            const double s = (g.x(i) - cfg.init_bump_center) / cfg.init_bump_width;
            y[static_cast<std::size_t>(i)] = cfg.init_bump_amp * std::exp(-s * s);
        }
        return helmholtz_inverse(y);
    }
    if (kind == "multipeakon") {
        if (cfg.init_q.empty() || cfg.init_q.size() != cfg.init_p.size())
            throw ConfigError("init.q / init.p: need matching nonempty position/amplitude lists");
        return multipeakon_field(cfg.init_q, cfg.init_p, g);
    }
    if (kind == "field_csv" || kind == "field_bin") {
        if (cfg.init_file.empty()) throw ConfigError("init.file: required for field input kinds");
        if (!fs::exists(cfg.init_file))
            throw ConfigError("init.file: no such file: " + cfg.init_file);
        return kind == "field_csv" ? read_field_csv(cfg.init_file)
                                   : read_field_binary(cfg.init_file);
    }
    throw ConfigError("init.kind: unknown value '" + kind + "'");
}

EvolveConfig evolve_config(const ExperimentConfig& cfg) {
    EvolveConfig ec;
    ec.cfl = cfg.evolve_cfl;
    ec.t_end = cfg.evolve_t_end;
    ec.snapshot_every = cfg.evolve_snapshot_every;
    ec.limiter = cfg.limiter();
    if (!(ec.cfl > 0.0 && ec.cfl <= 1.0)) throw ConfigError("evolve.cfl: must lie in (0, 1]");
    if (!(ec.t_end > 0.0)) throw ConfigError("evolve.t_end: must be positive");
    if (!(ec.snapshot_every > 0.0)) throw ConfigError("evolve.snapshot_every: must be positive");
    return ec;
}

ModulationTrack run_track(const std::vector<TimedField>& snaps, const ExperimentConfig& cfg,
                          std::vector<CalibrationReport>* reports = nullptr) {
    std::vector<int> cands;
    cands.reserve(cfg.modulation_n0_candidates.size());
    for (std::int64_t v : cfg.modulation_n0_candidates) cands.push_back(static_cast<int>(v));
    const ModulationSetup setup =
        calibrate_n0(snaps.front().u.grid, cands, reports, cfg.modulation_sigma);
    return track(snaps, setup, cfg.modulation_guess, cfg.modulation_window_A);
}

MultipeakonState mirrored(const MultipeakonState& s) {
    MultipeakonState m;
    m.t = 0.0;
    const std::size_t n = s.size();
    m.q.resize(n);
    m.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.q[i] = -s.q[n - 1 - i];
        m.p[i] = s.p[n - 1 - i];
    }
    return m;
}

// Triple-sum form of the interaction rates, kept deliberately naive: same
// math as mp_rhs through a different association order.
MultipeakonRates mp_rhs_brute(const MultipeakonState& s) {
    const std::size_t n = s.size();
    MultipeakonRates r;
    r.dq.assign(n, 0.0);
    r.dp.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                r.dq[i] += s.p[j] * s.p[k] * std::exp(-std::abs(s.q[i] - s.q[j])) *
                           std::exp(-std::abs(s.q[i] - s.q[k]));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const double d = s.q[i] - s.q[j];
                const double sgn = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                r.dp[i] += s.p[i] * s.p[j] * s.p[k] * sgn * std::exp(-std::abs(d)) *
                           std::exp(-std::abs(s.q[i] - s.q[k]));
            }
    }
    return r;
}

std::vector<DiagnosticsRow> diag_rows(const std::vector<TimedField>& snaps) {
    std::vector<DiagnosticsRow> rows;
    rows.reserve(snaps.size());
    for (const auto& s : snaps) rows.push_back(diagnostics(s.u, s.t));
    return rows;
}

// ---------------------------------------------------------------------------
// experiment runners
// ---------------------------------------------------------------------------

RunOutcome run_peakon_travel(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    const Grid g = cfg.grid();
    const Field u0 = build_initial_on(cfg, g);
    const EvolveResult res = evolve(u0, evolve_config(cfg));
    if (res.status == EvolveStatus::blow_up) {
        out.status = "blow_up";
        out.message = res.message;
    }

    auto rows = diag_rows(res.snapshots);
    write_diagnostics_csv(rows, (dir / "diagnostics.csv").string());
    write_snapshots(dir / "snapshots", res.snapshots);

    std::ofstream se(dir / "shape_error.csv");
    if (!se) throw Error("cannot open for writing: " + (dir / "shape_error.csv").string());
    se << "t,shape_error\n";
    double final_err = 0.0;
    for (const auto& s : res.snapshots) {
        const Field ref = peakon_field({cfg.init_c, cfg.init_x0, +1}, s.t, s.u.grid);
        const double err = l2_diff(s.u, ref);
        se << format_double(s.t) << ',' << format_double(err) << '\n';
        final_err = err;
    }
    se.close();

    if (out.status == "ok") {
        const double drift =
            std::abs(rows.back().E - rows.front().E) / std::max(rows.front().E, 1e-300);
        // The crest kink dissipates sub-linearly in dx: measured on the
        // default run (upwind1, c=1, t=1) shape error 0.174 / 0.134 / 0.102
        // and drift 0.173 / 0.136 / 0.104 over dx 0.05 / 0.025 / 0.0125.
        // These are ceilings at the default; the sweep pins the trend.
        out.checks.push_back(
            make_check("shape_error_final", final_err, 0.25 * std::sqrt(cfg.init_c), "<="));
        out.checks.push_back(make_check("energy_drift_rel", drift, 0.25, "<="));
        note(quiet, "peakon-travel: " + std::to_string(res.snapshots.size()) +
                        " snapshots, final shape error " + format_double(final_err));
    }
    return out;
}

RunOutcome run_multipeakon(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    if (cfg.init_q.empty() || cfg.init_q.size() != cfg.init_p.size())
        throw ConfigError("init.q / init.p: need matching nonempty lists");
    MultipeakonState s0;
    s0.t = 0.0;
    s0.q = cfg.init_q;
    s0.p = cfg.init_p;

    MpEvolveConfig mc;
    mc.t_end = cfg.mp_t_end;
    mc.rtol = cfg.mp_rtol;
    mc.gap_floor = cfg.mp_gap_floor;
    mc.sample_every = cfg.mp_sample_every;
    if (!(mc.t_end > 0.0)) throw ConfigError("mp.t_end: must be positive");

    const MpEvolveResult fwd = mp_evolve(s0, mc);
    write_trajectory_csv(fwd.states, (dir / "trajectory.csv").string());

    const double e0 = mp_energy(s0);
    double drift = 0.0;
    for (const auto& st : fwd.states)
        drift = std::max(drift, std::abs(mp_energy(st) - e0) / std::abs(e0));
    out.checks.push_back(make_check("energy_drift_rel", drift, 1e-8, "<="));

    if (fwd.status != MpStatus::ok) {
        out.status = fwd.status == MpStatus::collision ? "collision" : "step_underflow";
        out.message = fwd.message;
        return out;
    }

    const MpEvolveResult back = mp_evolve(mirrored(fwd.states.back()), mc);
    if (back.status != MpStatus::ok) {
        out.status = "collision";
        out.message = "reverse leg: " + back.message;
        return out;
    }
    const MultipeakonState ret = mirrored(back.states.back());
    double rev = 0.0;
    for (std::size_t i = 0; i < s0.size(); ++i) {
        rev = std::max(rev, std::abs(ret.q[i] - s0.q[i]));
        rev = std::max(rev, std::abs(ret.p[i] - s0.p[i]));
    }
    out.checks.push_back(make_check("reversal_error", rev, 1e-7, "<="));
    note(quiet, "multipeakon: " + std::to_string(fwd.states.size()) + " states, drift " +
                    format_double(drift) + ", reversal " + format_double(rev));
    return out;
}

// Long-horizon tracking needs non-dissipative dynamics: the grid scheme
// sheds several percent of the crest per time unit (the kink is never
// resolved), which would swamp frame statistics long before t ~ 10-20.
// A peakon plus a small nonnegative bump is exactly representable as a
// two-peakon state, so these experiments integrate the interaction system
// at rtol and synthesize fields for the tracker.
struct SynthesizedRun {
    MpEvolveResult mp;
    std::vector<TimedField> snaps;
    bool ok = false;
    std::string status = "ok";
    std::string message;
};

SynthesizedRun run_peakon_bump_system(const ExperimentConfig& cfg, const Grid& g,
                                      const fs::path& dir) {
    if (!(cfg.init_bump_amp > 0.0))
        throw ConfigError("init.bump_amp: this experiment needs a positive bump");
    MultipeakonState s0;
    s0.t = 0.0;
    if (cfg.init_bump_center > cfg.init_x0) {
        s0.q = {cfg.init_x0, cfg.init_bump_center};
        s0.p = {std::sqrt(cfg.init_c), cfg.init_bump_amp};
    } else {
        s0.q = {cfg.init_bump_center, cfg.init_x0};
        s0.p = {cfg.init_bump_amp, std::sqrt(cfg.init_c)};
    }
    MpEvolveConfig mc;
    mc.t_end = cfg.evolve_t_end;
    mc.rtol = cfg.mp_rtol;
    mc.gap_floor = cfg.mp_gap_floor;
    mc.sample_every = cfg.evolve_snapshot_every;

    SynthesizedRun run;
    run.mp = mp_evolve(s0, mc);
    write_trajectory_csv(run.mp.states, (dir / "trajectory.csv").string());
    run.snaps.reserve(run.mp.states.size());
    for (const auto& s : run.mp.states) run.snaps.push_back({s.t, mp_field(s, g)});
    write_diagnostics_csv(diag_rows(run.snaps), (dir / "diagnostics.csv").string());
    write_snapshots(dir / "snapshots", run.snaps);
    run.ok = run.mp.status == MpStatus::ok;
    if (!run.ok) {
        run.status = run.mp.status == MpStatus::collision ? "collision" : "step_underflow";
        run.message = run.mp.message;
    }
    return run;
}

RunOutcome run_stability(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    const Grid g = cfg.grid();
    g.validate(20.0);
    const SynthesizedRun run = run_peakon_bump_system(cfg, g, dir);
    if (!run.ok) {
        out.status = run.status;
        out.message = run.message;
        return out;
    }

    const ModulationTrack tr = run_track(run.snaps, cfg);
    write_track_csv(tr, (dir / "track.csv").string());

    double orth = 0.0;
    for (double r : tr.orth_resid) orth = std::max(orth, r);
    out.checks.push_back(make_check("orth_resid_max", orth, 1e-8, "<="));

    const std::size_t n = tr.t.size();
    const std::size_t q0 = n - n / 4;
    double mean = 0.0;
    for (std::size_t k = q0; k < n; ++k) mean += tr.xdot[k];
    mean /= static_cast<double>(n - q0);
    double dev = 0.0;
    for (std::size_t k = q0; k < n; ++k) dev = std::max(dev, std::abs(tr.xdot[k] - mean));
    out.checks.push_back(make_check("xdot_final_quarter_dev", dev / std::abs(mean), 0.01, "<="));

    double c_star = 0.0;
    for (std::size_t k = q0; k < n; ++k) c_star += tr.c_of_t[k];
    c_star /= static_cast<double>(n - q0);
    out.checks.push_back(
        make_check("c_star_rel_err", std::abs(c_star - cfg.init_c) / cfg.init_c, 0.05, "<="));
    out.checks.push_back(make_check("resid_right_change",
                                    tr.resid_right.back() - tr.resid_right.front(), 0.0, "<="));
    note(quiet, "stability: c* = " + format_double(c_star) + ", orth residual " +
                    format_double(orth));
    return out;
}

RunOutcome run_monotonicity(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    const Grid g = cfg.grid();
    g.validate(20.0);
    if (cfg.windows_R_list.size() < 2)
        throw ConfigError("windows.R_list: need at least two offsets for the rate fit");
    const SynthesizedRun run = run_peakon_bump_system(cfg, g, dir);
    if (!run.ok) {
        out.status = run.status;
        out.message = run.message;
        return out;
    }

    const ModulationTrack tr = run_track(run.snaps, cfg);
    write_track_csv(tr, (dir / "track.csv").string());
    FramePath frame{tr.t, tr.x_of_t};

    const double t0 = cfg.windows_t0 < 0.0 ? run.snaps.back().t : cfg.windows_t0;
    std::ofstream wf(dir / "windows.csv");
    if (!wf) throw Error("cannot open for writing: " + (dir / "windows.csv").string());
    wf << "R,excess\n";
    std::vector<double> logs;
    for (double R : cfg.windows_R_list) {
        WindowSpec w;
        w.t0 = t0;
        w.R = R;
        w.z_rate = cfg.windows_z_rate;
        w.side = WindowSide::right;
        const WindowSeries series = monotonicity_series(run.snaps, frame, w);
        wf << format_double(R) << ',' << format_double(series.excess) << '\n';
        logs.push_back(std::log(series.excess + 1e-16));
    }
    wf.close();

    const double slope = lsq_slope(cfg.windows_R_list, logs);
    out.checks.push_back(make_check("excess_log_slope", slope, -1.0 / 6.0 + 0.05, "<="));
    note(quiet, "monotonicity: excess log-slope vs R = " + format_double(slope));
    return out;
}

RunOutcome run_transport_front(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    const Grid g = cfg.grid();
    const Field u0 = build_initial_on(cfg, g);
    if (cfg.front_gamma_fracs.empty()) throw ConfigError("front.gamma_fracs: need at least one level");
    for (double f : cfg.front_gamma_fracs)
        if (!(f > 0.0 && f < 1.0)) throw ConfigError("front.gamma_fracs: levels must lie in (0, 1)");
    if (!(cfg.front_delta > 0.0)) throw ConfigError("front.delta: must be positive");

    const EvolveResult res = evolve(u0, evolve_config(cfg));
    write_snapshots(dir / "snapshots", res.snapshots);
    if (res.status == EvolveStatus::blow_up) {
        out.status = "blow_up";
        out.message = res.message;
        write_diagnostics_csv(diag_rows(res.snapshots), (dir / "diagnostics.csv").string());
        return out;
    }

    const double E0 = diagnostics(u0).E;
    std::vector<std::vector<double>> fronts;
    for (double f : cfg.front_gamma_fracs) fronts.push_back(front_series(res.snapshots, f * E0));

    auto rows = diag_rows(res.snapshots);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].x_gamma = fronts[0][k];
    write_diagnostics_csv(rows, (dir / "diagnostics.csv").string());

    std::ofstream ff(dir / "front.csv");
    if (!ff) throw Error("cannot open for writing: " + (dir / "front.csv").string());
    ff << "t";
    for (double f : cfg.front_gamma_fracs) ff << ",x_gamma_" << format_double(f);
    ff << '\n';
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
        ff << format_double(res.snapshots[k].t);
        for (const auto& fr : fronts) ff << ',' << format_double(fr[k]);
        ff << '\n';
    }
    ff.close();

    for (std::size_t j = 0; j < fronts.size(); ++j) {
        const FrontRateResult rate = front_rate_check(res.snapshots, fronts[j], cfg.front_delta);
        const std::string tag = format_double(cfg.front_gamma_fracs[j]);
        out.checks.push_back(
            make_check("front_min_step_" + tag, rate.min_step, -1e-6 * E0, ">="));
        out.checks.push_back(make_check("front_rate_margin_" + tag, rate.worst_margin,
                                        -1e-3 * cfg.front_delta * E0, ">="));
    }
    note(quiet, "transport-front: " + std::to_string(fronts.size()) + " level(s), " +
                    std::to_string(res.snapshots.size()) + " snapshots");
    return out;
}

RunOutcome run_lyapunov(const ExperimentConfig& cfg, const fs::path& dir, bool quiet) {
    RunOutcome out;
    const Grid g = cfg.grid();
    g.validate(18.0);
    const SynthesizedRun run = run_peakon_bump_system(cfg, g, dir);
    if (!run.ok) {
        out.status = run.status;
        out.message = run.message;
        return out;
    }

    // For momentum carried by peaks the right support edge is the rightmost
    // position itself, so the edge value comes straight off the integrated
    // state.  Re-detecting the edge per snapshot through the tail-mass
    // threshold quantizes it to grid nodes, and the resulting +-u*dx jitter
    // in u(edge) would drown the per-step tolerance; the grid still enters
    // through the one-sided identity window beyond the edge.  The threshold
    // detections at 1e-6 / 1e-8 / 1e-10 are logged alongside for comparison.
    std::vector<double> edges, values;
    edges.reserve(run.mp.states.size());
    values.reserve(run.mp.states.size());
    for (const auto& s : run.mp.states) {
        const double qr = s.q.back();
        double v = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j)
            v += s.p[j] * std::exp(-std::abs(qr - s.q[j]));
        edges.push_back(qr);
        values.push_back(v);
    }
    const LyapunovSeries ls = lyapunov_series(run.snaps, edges);

    auto rows = diag_rows(run.snaps);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].lyap = values[k];
    write_diagnostics_csv(rows, (dir / "diagnostics.csv").string());

    std::ofstream lf(dir / "lyap.csv");
    if (!lf) throw Error("cannot open for writing: " + (dir / "lyap.csv").string());
    lf << "t,edge,value,value_interp,edge_thr_1e6,edge_thr_1e8,edge_thr_1e10\n";
    for (std::size_t k = 0; k < ls.t.size(); ++k) {
        const MomentumField y = momentum_density(run.snaps[k].u);
        lf << format_double(ls.t[k]) << ',' << format_double(edges[k]) << ','
           << format_double(values[k]) << ',' << format_double(ls.value[k]) << ','
           << format_double(right_edge(y, 1e-6)) << ',' << format_double(right_edge(y, 1e-8))
           << ',' << format_double(right_edge(y, 1e-10)) << '\n';
    }
    lf.close();

    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < values.size(); ++k)
        min_step = std::min(min_step, values[k] - values[k - 1]);
    out.checks.push_back(
        make_check("lyap_min_step", min_step, -1e-4 * std::sqrt(cfg.init_c), ">="));
    // Beyond the edge the field is a pure decaying exponential, so centered
    // differences leave a second-order residual (about u*dx^2/6; 3.6e-4 on
    // the default run).  A first-order ceiling certifies the claimed rate
    // with headroom across the sweep range.
    out.checks.push_back(
        make_check("edge_identity_max", ls.max_edge_identity, 0.05 * cfg.grid_dx, "<="));
    note(quiet, "lyapunov: edge value " + format_double(values.front()) + " -> " +
                    format_double(values.back()));
    return out;
}

double gap_margin(const CorpusMember& m, double dx) {
    const GapResult gr = check_three_five_two(m.v);
    double vmax = 0.0;
    for (double v : m.v.values) vmax = std::max(vmax, std::abs(v));
    return gr.min_gap + 5.0 * dx * vmax * vmax * vmax;
}

RunOutcome run_lemma_oracles(const ExperimentConfig& cfg, const fs::path& dir, int jobs,
                             bool quiet) {
    RunOutcome out;
    const OracleReport rep = oracle_battery(cfg, jobs);
    write_oracle_report(rep, (dir / "oracle_report.txt").string());
    for (const auto& line : rep.lines) {
        CheckLine c;
        c.name = line.name;
        c.value = line.statistic;
        c.threshold = line.threshold;
        c.pass = line.pass;
        const bool holds_le = line.statistic <= line.threshold;
        c.op = line.pass == holds_le ? "<=" : ">=";
        out.checks.push_back(c);
    }
    note(quiet, "lemma-oracles: " + std::to_string(rep.lines.size()) + " checks, seed " +
                    std::to_string(cfg.seed));
    return out;
}

RunOutcome run_convergence(const ExperimentConfig& cfg, const fs::path& dir, int jobs,
                           bool quiet) {
    RunOutcome out;
    if (cfg.sweep_dx_list.size() < 2)
        throw ConfigError("sweep.dx_list: need at least two spacings");
    std::vector<double> dxs = cfg.sweep_dx_list;
    std::sort(dxs.begin(), dxs.end(), std::greater<>());
    const std::string metric = cfg.sweep_metric;
    if (metric != "shape_error" && metric != "mp_cross" && metric != "y23_drift" &&
        metric != "energy_drift" && metric != "sign_min")
        throw ConfigError("sweep.metric: unknown value '" + metric + "'");

    const double width = static_cast<double>(cfg.grid_n - 1) * cfg.grid_dx;
    std::vector<double> values(dxs.size());
    parallel_for(jobs, dxs.size(), [&](std::size_t k) {
        const double dx = dxs[k];
        if (!(dx > 0.0)) throw ConfigError("sweep.dx_list: spacings must be positive");
        Grid g{cfg.grid_x_left, dx, static_cast<std::int64_t>(std::llround(width / dx)) + 1};
        if (metric == "mp_cross") {
            if (cfg.init_q.empty() || cfg.init_q.size() != cfg.init_p.size())
                throw ConfigError("init.q / init.p: mp_cross sweep needs a multipeakon start");
            const Field u0 = multipeakon_field(cfg.init_q, cfg.init_p, g);
            EvolveConfig ec = evolve_config(cfg);
            ec.snapshot_every = ec.t_end;
            const EvolveResult res = evolve(u0, ec);
            if (res.status != EvolveStatus::ok)
                throw InternalError("mp_cross sweep: evolution stopped early at dx " +
                                    format_double(dx));
            MultipeakonState s0;
            s0.q = cfg.init_q;
            s0.p = cfg.init_p;
            MpEvolveConfig mc;
            mc.t_end = cfg.evolve_t_end;
            mc.rtol = cfg.mp_rtol;
            const MpEvolveResult ode = mp_evolve(s0, mc);
            if (ode.status != MpStatus::ok)
                throw InternalError("mp_cross sweep: particle system stopped early");
            values[k] = l2_diff(res.snapshots.back().u, mp_field(ode.states.back(), g));
            return;
        }
        ExperimentConfig point = cfg;
        point.grid_x_left = g.x_left;
        point.grid_dx = g.dx;
        point.grid_n = g.n;
        const Field u0 = build_initial_on(point, g);
        EvolveConfig ec = evolve_config(cfg);
        if (metric != "sign_min") ec.snapshot_every = ec.t_end;
        const EvolveResult res = evolve(u0, ec);
        if (res.status != EvolveStatus::ok)
            throw InternalError("sweep: evolution stopped early at dx " + format_double(dx));
        if (metric == "shape_error") {
            const Field ref = peakon_field({cfg.init_c, cfg.init_x0, +1}, cfg.evolve_t_end, g);
            values[k] = l2_diff(res.snapshots.back().u, ref);
        } else if (metric == "y23_drift" || metric == "energy_drift") {
            const DiagnosticsRow a = diagnostics(res.snapshots.front().u);
            const DiagnosticsRow b = diagnostics(res.snapshots.back().u);
            values[k] = metric == "y23_drift" ? std::abs(b.y23 - a.y23) / std::abs(a.y23)
                                              : std::abs(b.E - a.E) / std::abs(a.E);
        } else {  // sign_min
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& s : res.snapshots) {
                const MomentumField y = momentum_density(s.u);
                double mn = 0.0, mx = 0.0;
                for (double v : y.values) {
                    mn = std::min(mn, v);
                    mx = std::max(mx, std::abs(v));
                }
                worst = std::min(worst, mx > 0.0 ? mn / mx : 0.0);
            }
            values[k] = worst;
        }
    });

    std::ofstream sf(dir / "sweep.csv");
    if (!sf) throw Error("cannot open for writing: " + (dir / "sweep.csv").string());
    sf << "dx,value\n";
    for (std::size_t k = 0; k < dxs.size(); ++k)
        sf << format_double(dxs[k]) << ',' << format_double(values[k]) << '\n';
    sf.close();

    if (metric == "sign_min") {
        double worst = values[0];
        for (double v : values) worst = std::min(worst, v);
        out.checks.push_back(make_check("sign_min_worst", worst, -1e-10, ">="));
    } else if (metric == "shape_error") {
        double worst_ratio = 0.0;
        for (std::size_t k = 0; k + 1 < values.size(); ++k)
            worst_ratio = std::max(worst_ratio, values[k + 1] / values[k]);
        out.checks.push_back(make_check("refinement_ratio_max", worst_ratio, 1.0, "<"));
    } else {
        double min_factor = std::numeric_limits<double>::infinity();
        int halvings = 0;
        for (std::size_t k = 0; k + 1 < values.size(); ++k)
            if (std::abs(dxs[k] / dxs[k + 1] - 2.0) < 0.05) {
                min_factor = std::min(min_factor, values[k] / values[k + 1]);
                ++halvings;
            }
        if (halvings == 0) throw ConfigError("sweep.dx_list: metric needs dx-halving pairs");
        out.checks.push_back(make_check("halving_reduction_min", min_factor, 1.3, ">="));
    }
    note(quiet, "convergence-study: metric " + metric + " over " + std::to_string(dxs.size()) +
                    " spacings");
    return out;
}

RunOutcome run_verify(const ExperimentConfig& cfg, const fs::path& dir, int jobs, bool quiet) {
    RunOutcome out = run_lemma_oracles(cfg, dir, jobs, quiet);
    for (const auto& c : identity_battery(cfg)) out.checks.push_back(c);
    note(quiet, "verify: " + std::to_string(out.checks.size()) + " checks total");
    return out;
}

const std::map<std::string, std::vector<std::string>>& expected_artifacts() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"peakon-travel", {"diagnostics.csv", "shape_error.csv", "snapshots/index.csv"}},
        {"multipeakon", {"trajectory.csv"}},
        {"stability", {"diagnostics.csv", "track.csv", "trajectory.csv", "snapshots/index.csv"}},
        {"monotonicity",
         {"diagnostics.csv", "track.csv", "trajectory.csv", "windows.csv", "snapshots/index.csv"}},
        {"transport-front", {"diagnostics.csv", "front.csv", "snapshots/index.csv"}},
        {"lyapunov", {"diagnostics.csv", "lyap.csv", "trajectory.csv", "snapshots/index.csv"}},
        {"lemma-oracles", {"oracle_report.txt"}},
        {"convergence-study", {"sweep.csv"}},
        {"verify", {"oracle_report.txt"}},
    };
    return table;
}

} // namespace

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "peakon-travel" || experiment == "lemma-oracles" ||
        experiment == "verify") {
        return c;  // baseline grid/peakon defaults
    }
    if (experiment == "multipeakon") {
        c.init_kind = "multipeakon";
        c.init_q = {-5.0, 5.0};
        c.init_p = {1.2, 0.8};
        return c;
    }
    if (experiment == "stability") {
        c.init_kind = "peakon_bump";
        c.init_bump_amp = 1e-2;
        c.init_bump_center = 5.0;
        c.init_bump_width = 1.0;
        c.grid_x_left = -20.0;
        c.grid_n = 1401;  // right end at 50
        c.evolve_t_end = 20.0;
        c.evolve_snapshot_every = 0.5;
        // The overtaken bump parks ~6 behind the crest by t_end; the right
        // window must exclude it for the residual-contraction statistic.
        c.modulation_window_A = 4.0;
        return c;
    }
    if (experiment == "monotonicity") {
        c.init_kind = "peakon_bump";
        c.init_bump_amp = 1e-2;
        c.init_bump_center = -5.0;
        c.init_bump_width = 1.0;
        c.grid_x_left = -20.0;
        c.grid_n = 1301;  // right end at 45
        c.evolve_t_end = 12.0;
        c.evolve_snapshot_every = 0.25;
        return c;
    }
    if (experiment == "transport-front") {
        c.init_kind = "gaussian_momentum";
        c.init_bump_amp = 1.0;
        c.init_bump_center = 0.0;
        c.init_bump_width = 2.0;
        c.evolve_t_end = 2.0;
        c.evolve_snapshot_every = 0.1;
        return c;
    }
    if (experiment == "lyapunov") {
        c.init_kind = "peakon_bump";
        c.init_bump_amp = 1e-2;
        c.init_bump_center = 3.0;
        c.init_bump_width = 1.0;
        c.grid_x_left = -20.0;
        c.evolve_t_end = 5.0;
        c.evolve_snapshot_every = 0.1;
        return c;
    }
    if (experiment == "convergence-study") {
        c.sweep_dx_list = {0.05, 0.025, 0.0125};
        c.sweep_metric = "shape_error";
        return c;
    }
    throw ConfigError("experiment: unknown name '" + experiment + "'");
}

Field build_initial(const ExperimentConfig& cfg) {
    return build_initial_on(cfg, cfg.grid());
}

RunOutcome run_experiment(const ExperimentConfig& cfg, int jobs, bool quiet) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    save_config(cfg, (dir / "config_resolved.txt").string());
    cfg.grid().validate();

    RunOutcome out;
    const std::string& e = cfg.experiment;
    if (e == "peakon-travel") out = run_peakon_travel(cfg, dir, quiet);
    else if (e == "multipeakon") out = run_multipeakon(cfg, dir, quiet);
    else if (e == "stability") out = run_stability(cfg, dir, quiet);
    else if (e == "monotonicity") out = run_monotonicity(cfg, dir, quiet);
    else if (e == "transport-front") out = run_transport_front(cfg, dir, quiet);
    else if (e == "lyapunov") out = run_lyapunov(cfg, dir, quiet);
    else if (e == "lemma-oracles") out = run_lemma_oracles(cfg, dir, jobs, quiet);
    else if (e == "convergence-study") out = run_convergence(cfg, dir, jobs, quiet);
    else if (e == "verify") out = run_verify(cfg, dir, jobs, quiet);
    else throw ConfigError("experiment: unknown name '" + e + "'");

    write_checks_file(dir / "checks.txt", cfg, out);
    print_checks(quiet, out);
    settle_exit(out);
    if (out.exit_code == 3) note(quiet, cfg.experiment + ": stopped early (" + out.status + "): " + out.message);
    return out;
}

int export_report(const std::string& run_dir, bool quiet) {
    const fs::path dir(run_dir);
    std::ostringstream rep;
    std::vector<std::string> missing;
    bool checks_ok = true;
    int total = 0, passed = 0;

    rep << "run_dir = " << run_dir << '\n';
    ExperimentConfig cfg;
    bool have_cfg = false;
    if (fs::exists(dir / "config_resolved.txt")) {
        cfg = load_config((dir / "config_resolved.txt").string());
        have_cfg = true;
        rep << "experiment = " << cfg.experiment << '\n';
        rep << "seed = " << cfg.seed << '\n';
    } else {
        missing.push_back("config_resolved.txt");
    }

    std::string status = "unknown";
    if (fs::exists(dir / "checks.txt")) {
        std::ifstream cf(dir / "checks.txt");
        std::string line, name;
        std::map<std::string, std::string> cur;
        auto flush = [&]() {
            if (name.empty()) return;
            ++total;
            const bool pass = cur["verdict"] == "PASS";
            if (pass) ++passed;
            checks_ok = checks_ok && pass;
            rep << "check." << name << ".value = " << cur["value"] << '\n';
            rep << "check." << name << ".threshold = " << cur["threshold"] << '\n';
            rep << "check." << name << ".op = " << cur["op"] << '\n';
            rep << "check." << name << ".verdict = " << cur["verdict"] << '\n';
            name.clear();
            cur.clear();
        };
        while (std::getline(cf, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string k = line.substr(0, eq);
            std::string v = line.substr(eq + 1);
            while (!k.empty() && k.back() == ' ') k.pop_back();
            while (!v.empty() && v.front() == ' ') v.erase(v.begin());
            if (k == "check") {
                flush();
                name = v;
            } else if (k == "status") {
                status = v;
            } else if (!name.empty()) {
                cur[k] = v;
            }
        }
        flush();
    } else {
        missing.push_back("checks.txt");
    }
    rep << "status = " << status << '\n';
    rep << "checks_total = " << total << '\n';
    rep << "checks_passed = " << passed << '\n';

    if (have_cfg) {
        const auto& table = expected_artifacts();
        const auto it = table.find(cfg.experiment);
        if (it != table.end())
            for (const auto& rel : it->second) {
                const bool ok = fs::exists(dir / rel);
                rep << "artifact." << rel << " = " << (ok ? "present" : "missing") << '\n';
                if (!ok) missing.push_back(rel);
            }
        if (cfg.experiment == "convergence-study" && fs::exists(dir / "sweep.csv")) {
            std::ifstream sf(dir / "sweep.csv");
            std::string line;
            std::getline(sf, line);  // header
            std::vector<double> lx, ly;
            while (std::getline(sf, line)) {
                const auto comma = line.find(',');
                if (comma == std::string::npos) continue;
                const double dx = std::stod(line.substr(0, comma));
                const double v = std::stod(line.substr(comma + 1));
                if (dx > 0.0 && v > 0.0) {
                    lx.push_back(std::log(dx));
                    ly.push_back(std::log(v));
                }
            }
            rep << "sweep.points = " << lx.size() << '\n';
            if (lx.size() >= 2)
                rep << "sweep.fitted_order = " << format_double(lsq_slope(lx, ly)) << '\n';
        }
    }

    for (std::size_t i = 0; i < missing.size(); ++i)
        rep << "missing." << i << " = " << missing[i] << '\n';
    const std::string overall =
        !missing.empty() ? "INCOMPLETE" : (checks_ok && status == "ok" ? "PASS" : "FAIL");
    rep << "overall = " << overall << '\n';

    std::ofstream out(dir / "report.txt");
    if (!out) throw Error("cannot open for writing: " + (dir / "report.txt").string());
    out << rep.str();
    out.close();
    note(quiet, "report: " + (dir / "report.txt").string() + " (" + overall + ")");
    return overall == "PASS" ? 0 : 2;
}

// ---------------------------------------------------------------------------
// oracle + identity batteries
// ---------------------------------------------------------------------------

OracleReport oracle_battery(const ExperimentConfig& cfg, int jobs) {
    const Grid g = cfg.grid();
    g.validate(10.0);
    const double dx = g.dx;
    OracleReport rep;
    rep.seed = cfg.seed;
    auto add = [&](const std::string& name, double stat, double thr, bool pass) {
        rep.lines.push_back({name, stat, thr, pass});
    };

    // Equality case: the profile built from a single momentum spike.
    {
        const Field v = helmholtz_inverse(peakon_momentum_spike({1.0, 0.0, +1}, 0.0, g));
        const GapResult gr = check_three_five_two(v);
        add("gap_peakon_abs", std::abs(gr.min_gap), 10.0 * dx, std::abs(gr.min_gap) <= 10.0 * dx);
    }
    // A genuinely smooth profile stays bounded away from equality.
    {
        MomentumField y(g);
        for (std::int64_t i = 0; i < g.n; ++i) {
            const double s = g.x(i) / 2.0;
            y[static_cast<std::size_t>(i)] = std::exp(-s * s);
        }
        const GapResult gr = check_three_five_two(helmholtz_inverse(y));
        // Refinement dx 0.05 -> 0.00625 converges to 0.23591; the floor
        // keeps half that margin.
        add("gap_gaussian_floor", gr.min_gap, 0.118, gr.min_gap >= 0.118);
    }
    {
        const GapResult gr = check_three_five_two(Field(g, 0.0));
        add("gap_zero", std::abs(gr.min_gap), 0.0, gr.min_gap == 0.0);
    }

    // One-sided reconstruction error and its first-order halving.
    {
        auto gauss_field = [](const Grid& gg) {
            Field f(gg);
            for (std::int64_t i = 0; i < gg.n; ++i)
                f[static_cast<std::size_t>(i)] = std::exp(-gg.x(i) * gg.x(i));
            return f;
        };
        const double e1 = check_representation(gauss_field(g));
        Grid g2{g.x_left, 0.5 * dx, 2 * (g.n - 1) + 1};
        const double e2 = check_representation(gauss_field(g2));
        // Measured constant is 1.49 dx on this profile; the halving check
        // below pins the first-order rate, so the ceiling just needs slack.
        add("rep_gauss_err", e1, 2.0 * dx, e1 <= 2.0 * dx);
        add("rep_halving_ratio_dev", std::abs(e1 / e2 - 2.0), 0.4, std::abs(e1 / e2 - 2.0) <= 0.4);
    }
    // Slope domination consequence on a random admissible field.
    {
        const CorpusMember m = random_y_plus_member(cfg.seed, g);
        const auto vx = diff1(m.v);
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.v.size(); ++i)
            worst = std::max(worst, std::abs(vx[i]) - m.v[i]);
        add("slope_dominated", worst, 1.0 * dx, worst <= 1.0 * dx);
    }

    // Tail decay fits.
    {
        const Field v = helmholtz_inverse(peakon_momentum_spike({1.0, 0.0, +1}, 0.0, g));
        const DecayFit fit = decay_fit(v, 0.0, 2.0, 10.0);
        add("decay_peakon_K", std::abs(fit.K - 1.0), 0.02,
            fit.accepted() && std::abs(fit.K - 1.0) <= 0.02);
        add("decay_peakon_C", std::abs(fit.C - 1.0), 0.05,
            fit.accepted() && std::abs(fit.C - 1.0) <= 0.05);

        MomentumField two = peakon_momentum_spike({1.0, 0.0, +1}, 0.0, g);
        const MomentumField far = peakon_momentum_spike({0.09, 8.0, +1}, 0.0, g);
        for (std::size_t i = 0; i < two.size(); ++i) two[i] += far[i];
        const DecayFit bad = decay_fit(helmholtz_inverse(two), 0.0, 2.0, 10.0);
        add("decay_two_bump_r2", bad.r2, 0.98, bad.r2 < 0.98);

        const DecayFit smoothed = decay_fit(mollify(v, 8), 0.0, 2.0, 10.0);
        add("decay_mollified_K", std::abs(smoothed.K - 1.0), 0.05,
            std::abs(smoothed.K - 1.0) <= 0.05);
    }

    // Path-derivative identity under refinement, plus its sign consequence.
    {
        auto run_char = [&](double hdx) {
            ExperimentConfig cc = cfg;
            cc.init_kind = "gaussian_momentum";
            cc.init_bump_amp = 1.0;
            cc.init_bump_center = 0.0;
            cc.init_bump_width = 2.0;
            const double width = static_cast<double>(g.n - 1) * dx;
            Grid gg{g.x_left, hdx, static_cast<std::int64_t>(std::llround(width / hdx)) + 1};
            const Field u0 = build_initial_on(cc, gg);
            EvolveConfig ec;
            ec.t_end = 1.0;
            ec.snapshot_every = hdx;  // path tracing needs stored steps <= dx
            const EvolveResult res = evolve(u0, ec);
            if (res.status != EvolveStatus::ok)
                throw InternalError("oracle battery: smooth run stopped early");
            std::vector<double> seeds;
            for (int s = -5; s <= 5; ++s) seeds.push_back(static_cast<double>(s));
            return check_characteristic_derivative(res.snapshots, flow_map(res.snapshots, seeds));
        };
        const CharacteristicCheck coarse = run_char(dx);
        const CharacteristicCheck fine = run_char(0.5 * dx);
        const double ratio = fine.max_mismatch / coarse.max_mismatch;
        add("char_mismatch_refines", ratio, 1.0, ratio < 1.0);
        add("char_flow_domination", coarse.domination_defect, 1.0 * dx,
            coarse.domination_defect <= 1.0 * dx);
    }

    // Seeded corpus: lower bound everywhere; near-equality only on
    // peakon-like members (two-sided tail scale within 5% of the profile's).
    {
        const std::size_t N = 200;
        std::vector<double> margins(N), gaps(N);
        std::vector<int> spikes(N);
        std::vector<DecayFit> fits(N);
        std::vector<double> crests(N);
        parallel_for(jobs, N, [&](std::size_t i) {
            const CorpusMember m = random_y_plus_member(cfg.seed + 1000 + i, g);
            margins[i] = gap_margin(m, dx);
            gaps[i] = check_three_five_two(m.v).min_gap;
            spikes[i] = m.spikes;
            std::size_t imax = 0;
            for (std::size_t j = 0; j < m.v.size(); ++j)
                if (m.v[j] > m.v[imax]) imax = j;
            crests[i] = m.v.grid.x(static_cast<std::int64_t>(imax));
            if (gaps[i] <= 10.0 * dx) fits[i] = decay_fit(m.v, crests[i], 2.0, 10.0);
        });
        double worst_margin = std::numeric_limits<double>::infinity();
        for (double v : margins) worst_margin = std::min(worst_margin, v);
        add("corpus_min_gap_margin", worst_margin, 0.0, worst_margin >= 0.0);

        int near = 0, violators = 0;
        for (std::size_t i = 0; i < N; ++i) {
            if (gaps[i] > 10.0 * dx) continue;
            ++near;
            if (!(fits[i].accepted() && std::abs(fits[i].K - 1.0) <= 0.05)) ++violators;
        }
        add("corpus_equality_hits", static_cast<double>(near), 1.0, near >= 1);
        add("corpus_equality_violators", static_cast<double>(violators), 0.0, violators == 0);
    }

    return rep;
}

std::vector<CheckLine> identity_battery(const ExperimentConfig& cfg) {
    std::vector<CheckLine> out;
    const Grid g = cfg.grid();

    // Mixed decaying field shared by the operator identities.
    Field u(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        u[static_cast<std::size_t>(i)] =
            std::exp(-0.25 * (x - 2.0) * (x - 2.0)) + 0.6 * std::exp(-std::abs(x + 3.0));
    }

    {
        const Field back = helmholtz_inverse(momentum_density(u));
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(back[i] - u[i]));
        out.push_back(make_check("round_trip_residual", err, 1e-10, "<="));
    }
    {
        const Field whole = conv_kernel(u, Kernel::p);
        const Field plus = conv_kernel(u, Kernel::p_plus);
        const Field minus = conv_kernel(u, Kernel::p_minus);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            err = std::max(err, std::abs(plus[i] + minus[i] - whole[i]));
        out.push_back(make_check("kernel_split_residual", err, 1e-8, "<="));
    }
    {
        MultipeakonState s;
        s.q = {-4.0, -1.5, 0.3, 2.2, 5.1};
        s.p = {1.2, -0.4, 0.9, 2.0, 0.1};
        const MultipeakonRates a = mp_rhs(s);
        const MultipeakonRates b = mp_rhs_brute(s);
        double err = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            err = std::max(err, std::abs(a.dq[i] - b.dq[i]));
            err = std::max(err, std::abs(a.dp[i] - b.dp[i]));
        }
        out.push_back(make_check("rates_brute_residual", err, 1e-12, "<="));
    }
    {
        double worst = 0.0;
        for (double z = -100.0; z <= 100.0; z += 1e-3)
            worst = std::max(worst, std::abs(psi_third(z)) / psi_prime(z));
        out.push_back(make_check("weight_third_ratio", worst, 0.1, "<="));
    }
    {
        // The certificate grid spans +-150 so the weight tails fall under the
        // slack before the one-sided boundary stencil matters.
        const Grid cg{-150.0, g.dx, static_cast<std::int64_t>(std::llround(300.0 / g.dx)) + 1};
        Field w(cg);
        for (std::int64_t i = 0; i < cg.n; ++i)
            w[static_cast<std::size_t>(i)] = psi_prime(cg.x(i));
        const MomentumField lhs = momentum_density(w);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < w.size(); ++i)
            worst = std::min(worst, lhs[i] - 0.5 * w[i]);
        out.push_back(make_check("weight_discrete_bound", worst, -1e-8, ">="));
    }
    {
        const ExperimentConfig round = parse_config(serialize_config(cfg));
        out.push_back(make_check("config_round_trip", round == cfg ? 0.0 : 1.0, 0.0, "<="));
    }
    return out;
}

} // namespace novlab
