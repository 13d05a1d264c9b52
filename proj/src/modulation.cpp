#include "novlab/modulation.hpp"

#include "novlab/errors.hpp"
#include "novlab/field_io.hpp"
#include "novlab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace novlab {

namespace {

double peak_profile(double x) { return std::exp(-std::abs(x)); }
double peak_profile_prime(double x) {
    if (x == 0.0) return 0.0;
    return (x > 0.0 ? -1.0 : 1.0) * std::exp(-std::abs(x));
}

// Composite Simpson on [a, b] (even interval count).
template <typename F>
double simpson(const F& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// (rho_n * profile')(xi): quadrature over the bump support, split at the kink.
double smoothed_profile_prime(double xi, int n) {
    const double radius = 1.0 / n;
    const double norm = bump_normalization() / n;  // int of rho(n z) dz
    auto integrand = [&](double z) {
        return bump_profile(z / radius) / norm * peak_profile_prime(xi - z);
    };
    if (std::abs(xi) < radius) {
        return simpson(integrand, -radius, xi, 128) + simpson(integrand, xi, radius, 128);
    }
    return simpson(integrand, -radius, radius, 256);
}

// Pairing of the peak profile with the shifted kernel, by quadrature against
// the exact profile: g(y) = int profile(x) k(x - y) dx.
double profile_pairing(const CubicInterp& kernel, double y, double reach) {
    auto integrand = [&](double x) { return peak_profile(x) * kernel(x - y); };
    // the integrand decays like e^{-|x|}; split at the profile kink
    return simpson(integrand, -reach, 0.0, 2048) + simpson(integrand, 0.0, reach, 2048);
}

double profile_prime_pairing(const CubicInterp& kernel, double y, double reach) {
    auto integrand = [&](double x) { return peak_profile_prime(x) * kernel(x - y); };
    return simpson(integrand, -reach, 0.0, 2048) + simpson(integrand, 0.0, reach, 2048);
}

Field sample_kernel(const Grid& g, int n0) {
    // centred grid with the same spacing; reach 25 gives e^{-25} tail truncation
    const std::int64_t m = static_cast<std::int64_t>(std::floor(25.0 / g.dx));
    Grid kg{-static_cast<double>(m) * g.dx, g.dx, 2 * m + 1};
    Field k(kg);
    for (std::int64_t i = 0; i < kg.n; ++i)
        k[static_cast<std::size_t>(i)] = smoothed_profile_prime(kg.x(i), n0);
    return k;
}

} // namespace

ModulationSetup calibrate_n0(const Grid& g, std::span<const int> candidates,
                             std::vector<CalibrationReport>* reports, double sigma) {
    if (candidates.empty()) throw InvalidParameter("calibrate_n0: no candidates");
    g.validate();
    if (reports) reports->clear();

    std::vector<int> order(candidates.begin(), candidates.end());
    std::sort(order.begin(), order.end());

    const double bound = 0.25 * std::exp(-0.5);
    for (int n0 : order) {
        if (n0 < 1) throw InvalidParameter("calibrate_n0: candidates must be >= 1");
        CalibrationReport rep;
        rep.candidate = n0;
        rep.resolvable = std::floor((1.0 / n0) / g.dx) >= 1.0;
        if (!rep.resolvable) {
            if (reports) reports->push_back(rep);
            continue;
        }
        const Field kf = sample_kernel(g, n0);
        CubicInterp kernel(kf.grid.x_left, kf.grid.dx, kf.values);
        const double reach = -kf.grid.x_left;

        // sample the pairing over [-1/2, 1/2] at grid spacing
        std::vector<double> ys, gs;
        for (double y = -0.5; y <= 0.5 + 1e-12; y += g.dx) {
            ys.push_back(y);
            gs.push_back(profile_pairing(kernel, y, reach));
        }
        int sign_changes = 0;
        double root = 0.0;
        bool monotone = true;
        for (std::size_t j = 1; j < gs.size(); ++j) {
            if (!(gs[j] > gs[j - 1])) monotone = false;
            if (gs[j - 1] < 0.0 && gs[j] >= 0.0) {
                ++sign_changes;
                const double w = gs[j] - gs[j - 1];
                root = ys[j - 1] + (w != 0.0 ? -gs[j - 1] / w * g.dx : 0.0);
            } else if (gs[j - 1] >= 0.0 && gs[j] < 0.0) {
                ++sign_changes;
                root = ys[j - 1];
            }
        }
        rep.unique_zero = (sign_changes == 1) && std::abs(root) <= g.dx;
        rep.zero_location = root;
        rep.monotone = monotone;
        rep.slope_at_zero = profile_prime_pairing(kernel, 0.0, reach);
        rep.accepted = rep.unique_zero && rep.monotone && rep.slope_at_zero >= bound;
        if (reports) reports->push_back(rep);
        if (rep.accepted) {
            ModulationSetup setup;
            setup.n0 = n0;
            setup.kernel = kf;
            setup.sigma = sigma;
            return setup;
        }
    }
    throw CalibrationError("calibrate_n0: no candidate passed the zero/monotonicity/slope checks");
}

double center_pairing(const Field& u, const ModulationSetup& setup, double x0) {
    const Grid& g = u.grid;
    const Grid& kg = setup.kernel.grid;
    CubicInterp kernel(kg.x_left, kg.dx, setup.kernel.values);
    const double reach = -kg.x_left;
    // integration window: overlap of the grid with the kernel support
    std::int64_t i_lo = static_cast<std::int64_t>(std::ceil((x0 - reach - g.x_left) / g.dx));
    std::int64_t i_hi = static_cast<std::int64_t>(std::floor((x0 + reach - g.x_left) / g.dx));
    i_lo = std::max<std::int64_t>(i_lo, 0);
    i_hi = std::min<std::int64_t>(i_hi, g.n - 1);
    if (i_hi - i_lo < 2) return 0.0;
    double s = 0.0;
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
        const double w = (i == i_lo || i == i_hi) ? 0.5 : 1.0;
        s += w * u[static_cast<std::size_t>(i)] * kernel(g.x(i) - x0);
    }
    return s * g.dx;
}

double solve_center(const Field& u, const ModulationSetup& setup, double guess,
                    double time_for_errors) {
    const Norms nu = norms(u);
    if (nu.sup == 0.0)
        throw ModulationLoss("solve_center: zero field has no centre", time_for_errors);
    std::vector<double> k2(setup.kernel.size());
    for (std::size_t i = 0; i < k2.size(); ++i) k2[i] = setup.kernel[i] * setup.kernel[i];
    const double kernel_l2 = std::sqrt(trapezoid(setup.kernel.grid, k2));
    const double scale = nu.l2 * kernel_l2;

    double lo = guess - setup.sigma, hi = guess + setup.sigma;
    double flo = center_pairing(u, setup, lo);
    double fhi = center_pairing(u, setup, hi);
    if (!(flo < 0.0 && fhi > 0.0))
        throw ModulationLoss("solve_center: no sign change across the centre bracket",
                             time_for_errors);
    double mid = guess, fmid = center_pairing(u, setup, mid);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fmid) <= 1e-10 * scale) return mid;
        if (fmid < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
        // secant proposal, safeguarded by the bracket
        double prop = (fhi != flo) ? (lo * fhi - hi * flo) / (fhi - flo) : 0.5 * (lo + hi);
        const double width = hi - lo;
        if (!(prop > lo + 0.05 * width) || !(prop < hi - 0.05 * width)) prop = 0.5 * (lo + hi);
        mid = prop;
        fmid = center_pairing(u, setup, mid);
        if (width < 1e-14 * std::max(1.0, std::abs(mid))) break;
    }
    if (std::abs(fmid) <= 1e-10 * scale) return mid;
    throw ModulationLoss("solve_center: pairing root did not converge", time_for_errors);
}

// Crest value of the peaked profile at the solved centre. The grid max
// undershoots a between-nodes kink by up to a factor e^{-dx}; reading the
// two bracketing nodes through the one-sided exponentials recovers the
// crest of a·e^{-|x - centre|} exactly and is O(v)-accurate otherwise.
static double crest_amplitude(const Field& u, double centre) {
    const Grid& g = u.grid;
    std::int64_t i = static_cast<std::int64_t>(std::floor((centre - g.x_left) / g.dx));
    i = std::clamp<std::int64_t>(i, 0, g.n - 2);
    const double left = u[static_cast<std::size_t>(i)] * std::exp(centre - g.x(i));
    const double right = u[static_cast<std::size_t>(i + 1)] * std::exp(g.x(i + 1) - centre);
    return 0.5 * (left + right);
}

ModulationTrack track(const std::vector<TimedField>& snapshots, const ModulationSetup& setup,
                      double guess0, double window_A) {
    if (snapshots.empty()) throw InvalidParameter("track: no snapshots");
    ModulationTrack tr;
    tr.window_A = window_A;
    double guess = guess0;
    for (const auto& snap : snapshots) {
        const double x = solve_center(snap.u, setup, guess, snap.t);
        guess = x;
        const double amp = crest_amplitude(snap.u, x);
        tr.t.push_back(snap.t);
        tr.x_of_t.push_back(x);
        tr.c_of_t.push_back(amp * amp);
        tr.orth_resid.push_back(std::abs(center_pairing(snap.u, setup, x)));

        const Grid& g = snap.u.grid;
        const std::size_t n = snap.u.size();
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = snap.u[i] -
                   amp * peak_profile(g.x(static_cast<std::int64_t>(i)) - x);
        const auto vx = diff1(g, v);
        std::vector<double> h1(n);
        for (std::size_t i = 0; i < n; ++i) h1[i] = v[i] * v[i] + vx[i] * vx[i];
        tr.resid_h1.push_back(std::sqrt(trapezoid(g, h1)));

        double right = 0.0;
        const double cut = x - window_A;
        for (std::size_t i = 0; i < n; ++i) {
            if (g.x(static_cast<std::int64_t>(i)) < cut) continue;
            const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            right += w * h1[i] * g.dx;
        }
        tr.resid_right.push_back(std::sqrt(right));

        std::vector<double> e(n);
        const auto ux = diff1(g, snap.u.values);
        for (std::size_t i = 0; i < n; ++i) e[i] = snap.u[i] * snap.u[i] + ux[i] * ux[i];
        tr.c_energy.push_back(0.5 * trapezoid(g, e));
    }
    const std::size_t m = tr.t.size();
    tr.xdot.assign(m, 0.0);
    if (m >= 2) {
        tr.xdot[0] = (tr.x_of_t[1] - tr.x_of_t[0]) / (tr.t[1] - tr.t[0]);
        for (std::size_t k = 1; k + 1 < m; ++k)
            tr.xdot[k] = (tr.x_of_t[k + 1] - tr.x_of_t[k - 1]) / (tr.t[k + 1] - tr.t[k - 1]);
        tr.xdot[m - 1] = (tr.x_of_t[m - 1] - tr.x_of_t[m - 2]) / (tr.t[m - 1] - tr.t[m - 2]);
    }
    return tr;
}

void write_track_csv(const ModulationTrack& tr, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "t,x,xdot,c,c_energy,orth_resid,resid_h1,resid_right\n";
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        out << format_double(tr.t[k]) << ',' << format_double(tr.x_of_t[k]) << ','
            << format_double(tr.xdot[k]) << ',' << format_double(tr.c_of_t[k]) << ','
            << format_double(tr.c_energy[k]) << ',' << format_double(tr.orth_resid[k]) << ','
            << format_double(tr.resid_h1[k]) << ',' << format_double(tr.resid_right[k]) << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

} // namespace novlab
