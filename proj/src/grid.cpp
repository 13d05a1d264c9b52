#include "novlab/grid.hpp"

#include "novlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace novlab {

std::int64_t Grid::nearest(double xq) const {
    const double r = (xq - x_left) / dx;
    std::int64_t i = static_cast<std::int64_t>(std::llround(r));
    return std::clamp<std::int64_t>(i, 0, n - 1);
}

void Grid::validate(double min_half_width) const {
    if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_left))
        throw InvalidParameter("grid: dx must be positive and finite");
    if (n < 3) throw InvalidParameter("grid: need at least 3 nodes");
    if (half_width() < min_half_width)
        throw InvalidParameter("grid: domain half-width below required floor");
}

Grid make_grid(double x_left, double dx, std::int64_t n) {
    Grid g{x_left, dx, n};
    g.validate();
    return g;
}

Field peakon_field(const PeakonParams& p, double t, const Grid& g) {
    if (!(p.c > 0.0)) throw InvalidParameter("peakon: speed c must be positive");
    if (p.sign != 1 && p.sign != -1) throw InvalidParameter("peakon: sign must be +1 or -1");
    const double amp = p.sign * std::sqrt(p.c);
    const double crest = p.x0 + p.c * t;
    Field u(g);
    for (std::int64_t i = 0; i < g.n; ++i)
        u[static_cast<std::size_t>(i)] = amp * std::exp(-std::abs(g.x(i) - crest));
    return u;
}

Field multipeakon_field(std::span<const double> q, std::span<const double> p, const Grid& g) {
    if (q.size() != p.size()) throw InvalidParameter("multipeakon: |q| != |p|");
    for (std::size_t k = 1; k < q.size(); ++k)
        if (!(q[k] > q[k - 1]))
            throw PreconditionError("multipeakon: positions must be strictly increasing");
    Field u(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        const double xi = g.x(i);
        double s = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) s += p[k] * std::exp(-std::abs(xi - q[k]));
        u[static_cast<std::size_t>(i)] = s;
    }
    return u;
}

MomentumField peakon_momentum_spike(const PeakonParams& p, double t, const Grid& g) {
    if (!(p.c > 0.0)) throw InvalidParameter("peakon: speed c must be positive");
    MomentumField y(g);
    const std::int64_t k = g.nearest(p.x0 + p.c * t);
    y[static_cast<std::size_t>(k)] = p.sign * 2.0 * std::sqrt(p.c) / g.dx;
    return y;
}

MomentumField momentum_density(const Field& u) {
    const Grid& g = u.grid;
    const double inv = 1.0 / (g.dx * g.dx);
    const std::size_t n = u.size();
    MomentumField y(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = (i == 0) ? u[0] : u[i - 1];
        const double up = (i + 1 == n) ? u[n - 1] : u[i + 1];
        y[i] = u[i] - (up - 2.0 * u[i] + um) * inv;
    }
    return y;
}

double trapezoid(const Grid& g, std::span<const double> v) {
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * g.dx;
}

std::vector<double> diff1(const Grid& g, std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> d(n);
    d[0] = (v[1] - v[0]) / g.dx;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * g.dx);
    d[n - 1] = (v[n - 1] - v[n - 2]) / g.dx;
    return d;
}

std::vector<double> diff1(const Field& u) { return diff1(u.grid, u.values); }

Norms norms(const Field& u) {
    const std::size_t n = u.size();
    std::vector<double> sq(n), hsq(n);
    const auto ux = diff1(u);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = u[i] * u[i];
        hsq[i] = sq[i] + ux[i] * ux[i];
        sup = std::max(sup, std::abs(u[i]));
    }
    Norms out;
    out.l2 = std::sqrt(trapezoid(u.grid, sq));
    out.h1 = std::sqrt(trapezoid(u.grid, hsq));
    out.sup = sup;
    return out;
}

double bump_profile(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 / (s * s - 1.0));
}

namespace {

double adaptive_simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_quad(double (*f)(double), double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

double bump_normalization() {
    static const double value = adaptive_quad(&bump_profile, -1.0, 1.0, 1e-14);
    return value;
}

Field mollify(const Field& u, int n_smooth) {
    if (n_smooth < 1) throw InvalidParameter("mollify: smoothing index must be >= 1");
    const Grid& g = u.grid;
    const double radius = 1.0 / static_cast<double>(n_smooth);
    const std::int64_t m = static_cast<std::int64_t>(std::floor(radius / g.dx));
    if (m < 1)
        throw ResolutionError("mollify: smoothing radius below grid spacing, kernel unresolvable");
    std::vector<double> w(static_cast<std::size_t>(2 * m + 1));
    double total = 0.0;
    for (std::int64_t j = -m; j <= m; ++j) {
        const double wj = bump_profile(static_cast<double>(j) * g.dx / radius);
        w[static_cast<std::size_t>(j + m)] = wj;
        total += wj;
    }
    for (double& wj : w) wj /= total;  // exact unit discrete mass
    const std::int64_t n = g.n;
    Field out(g);
    for (std::int64_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::int64_t j = -m; j <= m; ++j) {
            const std::int64_t k = std::clamp<std::int64_t>(i + j, 0, n - 1);
            s += w[static_cast<std::size_t>(j + m)] * u[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

bool is_y_plus(const MomentumField& y) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = 0.0;
    for (double v : y.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, std::abs(v));
    }
    return mn >= -1e-10 * mx;
}

} // namespace novlab
