#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "novlab/errors.hpp"
#include "novlab/grid.hpp"
#include "novlab/nonlocal.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace novlab;

namespace {

Grid wide_grid(double dx = 0.05) {
    auto n = static_cast<std::int64_t>(std::llround(50.0 / dx)) + 1;
    return make_grid(-25.0, dx, n);
}

double sup_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("discrete green function matches half the exponential kernel") {
    for (double dx : {0.05, 0.025}) {
        Grid g = wide_grid(dx);
        MomentumField spike(g);
        std::int64_t mid = g.nearest(0.0);
        spike[static_cast<std::size_t>(mid)] = 1.0 / dx; // unit mass
        Field v = helmholtz_inverse(spike);
        double err = 0.0;
        for (std::int64_t i = 0; i < g.n; ++i)
            err = std::max(err,
                           std::abs(v[static_cast<std::size_t>(i)] - 0.5 * std::exp(-std::abs(g.x(i)))));
        CHECK(err <= 0.15 * dx * dx); // measured dx^2/16
    }
}

TEST_CASE("convolution with p solves the shifted helmholtz problem") {
    Grid g = wide_grid();
    std::vector<double> q{-3.0, 0.5, 4.0}, p{1.1, 0.6, 0.9};
    Field u = multipeakon_field(q, p, g);
    Field again = conv_kernel(Field{momentum_density(u).grid, 0.0}, Kernel::p);
    CHECK(sup_abs(again) == 0.0); // zero input, zero output

    MomentumField y = momentum_density(u);
    Field w = conv_kernel(g, y.values, Kernel::p);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(w[i] - u[i]));
    CHECK(worst <= 1e-10 * sup_abs(u));
}

TEST_CASE("kernel image of a peakon hits the closed-form value at the crest") {
    // (p * e^{-|.|})(0) = 1/2 integral e^{-2|z|} = 1/2
    Grid g = wide_grid();
    Field u = peakon_field({1.0, 0.0, +1}, 0.0, g);
    Field w = conv_kernel(u, Kernel::p);
    CHECK(std::abs(w[static_cast<std::size_t>(g.nearest(0.0))] - 0.5) <= 1e-3); // measured 2.9e-4
}

TEST_CASE("one-sided kernels split the full convolution") {
    Grid g = wide_grid();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Field f(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        f[static_cast<std::size_t>(i)] = unif(rng) * std::exp(-0.05 * x * x);
    }
    Field full = conv_kernel(f, Kernel::p);
    Field plus = conv_kernel(f, Kernel::p_plus);
    Field minus = conv_kernel(f, Kernel::p_minus);
    double worst = 0.0;
    // away from the ends, where the prefix recursion has no boundary defect
    for (std::int64_t i = 40; i + 40 < g.n; ++i) {
        auto k = static_cast<std::size_t>(i);
        worst = std::max(worst, std::abs(plus[k] + minus[k] - full[k]));
    }
    CHECK(worst <= 1e-8 * sup_abs(f));
}

TEST_CASE("kernels map nonnegative data to nonnegative images") {
    Grid g = wide_grid();
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    Field f(g);
    for (std::int64_t i = 0; i < g.n; ++i) f[static_cast<std::size_t>(i)] = unif(rng);
    for (Kernel k : {Kernel::p, Kernel::p_plus, Kernel::p_minus}) {
        Field w = conv_kernel(f, k);
        double mn = 0.0;
        for (double v : w.values) mn = std::min(mn, v);
        CHECK(mn >= -1e-12 * sup_abs(f));
    }
}

TEST_CASE("kernel images obey the smoothing bound") {
    // sup |p*f| <= (1/2) discrete L1 norm of f
    Grid g = wide_grid();
    std::mt19937_64 rng(777);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Field f(g);
        for (std::int64_t i = 0; i < g.n; ++i) {
            double x = g.x(i);
            f[static_cast<std::size_t>(i)] = gauss(rng) * std::exp(-0.1 * std::abs(x));
        }
        std::vector<double> absf(f.values);
        for (double& v : absf) v = std::abs(v);
        double l1 = trapezoid(g, absf);
        CHECK(sup_abs(conv_kernel(f, Kernel::p)) <= 0.5 * l1 * (1.0 + 1e-12));
    }
}

TEST_CASE("odd data has a vanishing kernel image at the origin") {
    Grid g = wide_grid();
    Field f(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        f[static_cast<std::size_t>(i)] = x * std::exp(-x * x);
    }
    Field w = conv_kernel(f, Kernel::p);
    CHECK(std::abs(w[static_cast<std::size_t>(g.nearest(0.0))]) <= 1e-12);
}

TEST_CASE("derivative kernel is odd against even data") {
    Grid g = wide_grid();
    Field f(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        double x = g.x(i);
        f[static_cast<std::size_t>(i)] = std::exp(-x * x);
    }
    Field w = conv_kernel(f, Kernel::p_x);
    std::int64_t mid = g.nearest(0.0);
    CHECK(std::abs(w[static_cast<std::size_t>(mid)]) <= 1e-12);
    for (std::int64_t d : {10L, 50L, 200L}) {
        double a = w[static_cast<std::size_t>(mid + d)];
        double b = w[static_cast<std::size_t>(mid - d)];
        CHECK(a == doctest::Approx(-b).epsilon(1e-10));
    }
}

TEST_CASE("green coefficients track their continuum expansions") {
    for (double dx : {0.1, 0.05, 0.025}) {
        GreenCoeffs c = green_coeffs(dx);
        CHECK(std::abs(c.mu - std::exp(-dx)) <= dx * dx * dx);
        CHECK(std::abs(c.alpha - 0.5 * dx) <= dx * dx * dx);
        CHECK(c.mu > 0.0);
        CHECK(c.mu < 1.0);
    }
}

TEST_CASE("transport weight has the documented closed-form values") {
    CHECK(psi_value(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // tails close at rate (2/pi) e^{-z/6}: ~1e-6 at z = 80
    CHECK(psi_value(80.0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(psi_value(-80.0) <= 1e-5);
    CHECK(1.0 - psi_value(80.0) >= 1e-7);
    CHECK(psi_prime(0.0) == doctest::Approx(1.0 / (6.0 * 3.14159265358979323846)).epsilon(1e-14));
    // partition identity psi(z) + psi(-z) = 1
    for (double z : {0.3, 2.0, 11.7, 40.0}) {
        CHECK(psi_value(z) + psi_value(-z) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(psi_prime(z) > 0.0);
    }
}

TEST_CASE("weight derivatives match finite differences of the value") {
    const double h = 1e-5;
    for (double z : {-30.0, -4.2, 0.0, 1.7, 25.0}) {
        double fd1 = (psi_value(z + h) - psi_value(z - h)) / (2.0 * h);
        CHECK(std::abs(fd1 - psi_prime(z)) <= 1e-9 + 1e-6 * std::abs(psi_prime(z)));
        double fd3 = (psi_prime(z + h) - 2.0 * psi_prime(z) + psi_prime(z - h)) / (h * h);
        // second difference of psi' approximates psi'''
        CHECK(std::abs(fd3 - psi_third(z)) <= 1e-6 + 1e-4 * std::abs(psi_third(z)));
    }
}

TEST_CASE("third derivative of the weight stays below a tenth of the first") {
    double worst = 0.0;
    for (double z = -100.0; z <= 100.0; z += 0.01)
        worst = std::max(worst, std::abs(psi_third(z)) / psi_prime(z));
    CHECK(worst <= 0.1); // closed form gives 1/36
    CHECK(worst >= 0.02);
}

TEST_CASE("weight evaluation on a grid matches the scalar forms") {
    Grid g = make_grid(-30.0, 0.1, 601);
    WeightEval we = psi_eval(g, 3.5);
    REQUIRE(we.psi.size() == static_cast<std::size_t>(g.n));
    for (std::int64_t i = 0; i < g.n; i += 97) {
        auto k = static_cast<std::size_t>(i);
        double z = g.x(i) - 3.5;
        CHECK(we.psi[k] == doctest::Approx(psi_value(z)).epsilon(1e-14));
        CHECK(we.dpsi[k] == doctest::Approx(psi_prime(z)).epsilon(1e-14));
        CHECK(we.d3psi[k] == doctest::Approx(psi_third(z)).epsilon(1e-14));
    }
}

TEST_CASE("discrete helmholtz certificate for the weight derivative") {
    // (I - D2) psi' >= 0.5 psi' - 1e-8 node-wise on a wide dedicated grid
    Grid g = make_grid(-150.0, 0.05, 6001);
    WeightEval we = psi_eval(g, 0.0);
    Field dpsi(g);
    for (std::size_t i = 0; i < dpsi.size(); ++i) dpsi[i] = we.dpsi[i];
    MomentumField lhs = momentum_density(dpsi);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        worst = std::min(worst, lhs[i] - 0.5 * dpsi[i]);
    CHECK(worst >= -1e-8);
}

TEST_CASE("helmholtz solver rejects mismatched sizes") {
    Grid g = wide_grid();
    std::vector<double> wrong(static_cast<std::size_t>(g.n) - 1, 1.0);
    CHECK_THROWS_AS(helmholtz_inverse(g, wrong), InvalidParameter);
}
