#include "novlab/nonlocal.hpp"

#include "novlab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace novlab {

Field helmholtz_inverse(const Grid& g, std::span<const double> f) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    if (f.size() != n) throw InvalidParameter("helmholtz_inverse: size mismatch");
    const double r = 1.0 / (g.dx * g.dx);

    // Thomas elimination for rows
    //   (1+r) v0 - r v1                  = f0
    //   -r v_{i-1} + (1+2r) v_i - r v_{i+1} = f_i
    //   -r v_{n-2} + (1+r) v_{n-1}       = f_{n-1}
    std::vector<double> c(n, 0.0);
    Field v(g);
    std::vector<double>& x = v.values;
    double diag = 1.0 + r;
    c[0] = -r / diag;
    x[0] = f[0] / diag;
    for (std::size_t i = 1; i < n; ++i) {
        const double b = (i + 1 == n) ? 1.0 + r : 1.0 + 2.0 * r;
        diag = b - (-r) * c[i - 1];
        c[i] = -r / diag;
        x[i] = (f[i] - (-r) * x[i - 1]) / diag;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];

    double fmax = 0.0, xmax = 0.0, resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xm = (i == 0) ? x[0] : x[i - 1];
        const double xp = (i + 1 == n) ? x[n - 1] : x[i + 1];
        resid = std::max(resid, std::abs(x[i] - (xp - 2.0 * x[i] + xm) * r - f[i]));
        fmax = std::max(fmax, std::abs(f[i]));
        xmax = std::max(xmax, std::abs(x[i]));
    }
    // Backward-stable elimination leaves |f - A x| = O(eps (|A||x| + |f|));
    // the row norm 1+4r grows like dx^-2, so the guard must scale with it.
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol = 32.0 * eps * ((1.0 + 4.0 * r) * xmax + fmax) + 1e-12 * fmax;
    if (resid > tol)
        throw InternalError("helmholtz_inverse: residual exceeds elimination round-off bound");
    return v;
}

Field helmholtz_inverse(const Field& f) { return helmholtz_inverse(f.grid, f.values); }
Field helmholtz_inverse(const MomentumField& f) { return helmholtz_inverse(f.grid, f.values); }

GreenCoeffs green_coeffs(double dx) {
    const double h = 1.0 + 0.5 * dx * dx;
    const double mu = h - std::sqrt(h * h - 1.0);
    const double alpha = 1.0 / (1.0 + 2.0 * (1.0 - mu) / (dx * dx));
    return {mu, alpha};
}

Field conv_kernel(const Grid& g, std::span<const double> f, Kernel k) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    if (f.size() != n) throw InvalidParameter("conv_kernel: size mismatch");
    switch (k) {
        case Kernel::p:
            return helmholtz_inverse(g, f);
        case Kernel::p_x: {
            const Field v = helmholtz_inverse(g, f);
            Field out(g);
            out.values = diff1(v);
            return out;
        }
        case Kernel::p_plus: {
            const auto [mu, alpha] = green_coeffs(g.dx);
            Field out(g);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = alpha * (0.5 * f[i] + s);
                s = mu * (s + f[i]);
            }
            return out;
        }
        case Kernel::p_minus: {
            const auto [mu, alpha] = green_coeffs(g.dx);
            Field out(g);
            double s = 0.0;
            for (std::size_t i = n; i-- > 0;) {
                out[i] = alpha * (0.5 * f[i] + s);
                s = mu * (s + f[i]);
            }
            return out;
        }
    }
    throw InvalidParameter("conv_kernel: unknown kernel tag");
}

Field conv_kernel(const Field& f, Kernel k) { return conv_kernel(f.grid, f.values, k); }

double psi_value(double z) {
    return (2.0 / std::numbers::pi) * std::atan(std::exp(z / 6.0));
}

double psi_prime(double z) {
    // 1/(6 pi cosh(z/6)), written to avoid overflow for large |z|
    const double w = std::abs(z) / 6.0;
    const double e = std::exp(-w);
    return e / (3.0 * std::numbers::pi * (1.0 + e * e));
}

double psi_third(double z) {
    const double w = std::abs(z) / 6.0;
    const double e = std::exp(-w);
    const double sech = 2.0 * e / (1.0 + e * e);
    const double tanh = (1.0 - e * e) / (1.0 + e * e);
    return sech * (tanh * tanh - sech * sech) / (216.0 * std::numbers::pi);
}

WeightEval psi_eval(const Grid& g, double shift) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    WeightEval w;
    w.psi.resize(n);
    w.dpsi.resize(n);
    w.d3psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = g.x(static_cast<std::int64_t>(i)) - shift;
        w.psi[i] = psi_value(z);
        w.dpsi[i] = psi_prime(z);
        w.d3psi[i] = psi_third(z);
    }
    return w;
}

} // namespace novlab
