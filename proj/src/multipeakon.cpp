#include "novlab/multipeakon.hpp"

#include "novlab/errors.hpp"
#include "novlab/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace novlab {

namespace {

void check_ordered(const MultipeakonState& s) {
    if (s.q.size() != s.p.size()) throw InvalidParameter("multipeakon: |q| != |p|");
    if (s.q.empty()) throw InvalidParameter("multipeakon: empty state");
    for (std::size_t i = 1; i < s.q.size(); ++i)
        if (!(s.q[i] > s.q[i - 1]))
            throw PreconditionError("multipeakon: positions must be strictly increasing");
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

MultipeakonRates mp_rhs(const MultipeakonState& s) {
    check_ordered(s);
    const std::size_t n = s.size();
    MultipeakonRates r;
    r.dq.resize(n);
    r.dp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0;  // a = u(q_i), b = sum_j p_j sgn(q_i-q_j) e^{-|..|}
        for (std::size_t j = 0; j < n; ++j) {
            const double w = s.p[j] * std::exp(-std::abs(s.q[i] - s.q[j]));
            a += w;
            b += w * sgn(s.q[i] - s.q[j]);
        }
        r.dq[i] = a * a;
        r.dp[i] = s.p[i] * a * b;
    }
    return r;
}

double mp_energy(const MultipeakonState& s) {
    check_ordered(s);
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            e += s.p[i] * s.p[j] * std::exp(-std::abs(s.q[i] - s.q[j]));
    return 2.0 * e;
}

Field mp_field(const MultipeakonState& s, const Grid& g) {
    return multipeakon_field(s.q, s.p, g);
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 35.0 / 384.0 - 5179.0 / 57600.0, E3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                 E4 = 125.0 / 192.0 - 393.0 / 640.0,
                 E5 = -2187.0 / 6784.0 + 92097.0 / 339200.0, E6 = 11.0 / 84.0 - 187.0 / 2100.0,
                 E7 = -1.0 / 40.0;

struct Vec {
    std::vector<double> v;
    explicit Vec(std::size_t n = 0) : v(n, 0.0) {}
};

} // namespace

MpEvolveResult mp_evolve(const MultipeakonState& s0, const MpEvolveConfig& cfg) {
    check_ordered(s0);
    if (!(cfg.rtol > 0.0) || !(cfg.t_end >= s0.t))
        throw InvalidParameter("mp_evolve: need rtol > 0 and t_end >= start time");
    const std::size_t n = s0.size();
    const std::size_t dim = 2 * n;

    auto pack = [&](const MultipeakonState& s, std::vector<double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = s.q[i];
            y[n + i] = s.p[i];
        }
    };
    auto unpack = [&](const std::vector<double>& y, double t) {
        MultipeakonState s;
        s.t = t;
        s.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
        s.p.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
        return s;
    };
    auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
        MultipeakonState s = unpack(y, 0.0);
        // rates are well-defined for any ordering; guard separately
        const std::size_t m = s.size();
        for (std::size_t i = 0; i < m; ++i) {
            double a = 0.0, b = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double w = s.p[j] * std::exp(-std::abs(s.q[i] - s.q[j]));
                a += w;
                b += w * sgn(s.q[i] - s.q[j]);
            }
            dy[i] = a * a;
            dy[m + i] = s.p[i] * a * b;
        }
    };
    auto min_gap = [&](const std::vector<double>& y) {
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < n; ++i) gmin = std::min(gmin, y[i] - y[i - 1]);
        return gmin;
    };

    MpEvolveResult res;
    res.states.push_back(s0);
    std::vector<double> y(dim), ynew(dim), yerr(dim);
    pack(s0, y);
    double t = s0.t;
    double h = std::min(1e-3, cfg.t_end - t);
    if (h <= 0.0) {
        res.stop_time = t;
        return res;
    }
    double next_sample = cfg.sample_every > 0.0 ? t + cfg.sample_every : 0.0;

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim);
    double err_prev = 1.0;
    const int max_steps = 20'000'000;
    for (int step = 0; step < max_steps && t < cfg.t_end; ++step) {
        if (cfg.t_end - t <= 1e-12 * std::max(1.0, std::abs(cfg.t_end))) break;
        h = std::min(h, cfg.t_end - t);
        // Land on sample times exactly: once the peaks separate the dynamics is
        // nearly free flight and the controller would otherwise leap across
        // several sample intervals in one step.
        if (cfg.sample_every > 0.0 && t + h > next_sample) h = next_sample - t;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            res.status = MpStatus::step_underflow;
            res.stop_time = t;
            res.message = "step size underflow at t = " + std::to_string(t);
            return res;
        }
        deriv(y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * A21 * k1[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        deriv(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        deriv(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        deriv(tmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] +
                                 A65 * k5[i]);
        deriv(tmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        deriv(ynew, k7);
        double err = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            yerr[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                           E7 * k7[i]);
            const double sc = cfg.rtol * std::max({1.0, std::abs(y[i]), std::abs(ynew[i])});
            err = std::max(err, std::abs(yerr[i]) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = ynew;
            const double gmin = min_gap(y);
            if (n > 1 && gmin < cfg.gap_floor) {
                res.states.push_back(unpack(y, t));
                res.status = MpStatus::collision;
                res.stop_time = t;
                res.message = "positions within gap floor at t = " + std::to_string(t);
                return res;
            }
            if (cfg.sample_every > 0.0) {
                if (t + 1e-12 >= next_sample || t >= cfg.t_end) {
                    res.states.push_back(unpack(y, t));
                    while (next_sample <= t + 1e-12) next_sample += cfg.sample_every;
                }
            } else {
                res.states.push_back(unpack(y, t));
            }
            // PI controller
            const double e = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
            err_prev = e;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    if (res.states.back().t < t) res.states.push_back(unpack(y, t));
    res.stop_time = t;
    if (cfg.t_end - t > 1e-12 * std::max(1.0, std::abs(cfg.t_end))) {
        res.status = MpStatus::step_underflow;
        res.message = "step budget exhausted before t_end";
    }
    return res;
}

void write_trajectory_csv(const std::vector<MultipeakonState>& states, const std::string& path) {
    if (states.empty()) throw InvalidParameter("trajectory export: no states");
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    const std::size_t n = states.front().size();
    out << "t";
    for (std::size_t i = 0; i < n; ++i) out << ",q" << (i + 1);
    for (std::size_t i = 0; i < n; ++i) out << ",p" << (i + 1);
    out << '\n';
    for (const auto& s : states) {
        out << format_double(s.t);
        for (double v : s.q) out << ',' << format_double(v);
        for (double v : s.p) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

} // namespace novlab
