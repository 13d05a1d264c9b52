#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "novlab/errors.hpp"
#include "novlab/field_io.hpp"
#include "novlab/grid.hpp"
#include "novlab/nonlocal.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace novlab;

namespace {

Grid wide_grid(double dx = 0.05) {
    auto n = static_cast<std::int64_t>(std::llround(50.0 / dx)) + 1;
    return make_grid(-25.0, dx, n);
}

double sup_diff(const Field& a, const Field& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

Field gaussian_velocity(const Grid& g, double amp, double width) {
    Field u(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        double s = g.x(i) / width;
        u[static_cast<std::size_t>(i)] = amp * std::exp(-s * s);
    }
    return u;
}

MomentumField gaussian_momentum(const Grid& g, double amp, double width) {
    MomentumField y(g);
    for (std::int64_t i = 0; i < g.n; ++i) {
        double s = g.x(i) / width;
        y[static_cast<std::size_t>(i)] = amp * std::exp(-s * s);
    }
    return y;
}

} // namespace

TEST_CASE("grid validation rejects degenerate parameters") {
    CHECK_THROWS_AS(make_grid(0.0, 0.0, 11).validate(), InvalidParameter);
    CHECK_THROWS_AS(make_grid(0.0, -0.1, 11).validate(), InvalidParameter);
    CHECK_THROWS_AS(make_grid(0.0, 0.1, 2).validate(), InvalidParameter);
    // a 10-wide grid cannot satisfy a 20 half-width requirement
    CHECK_THROWS_AS(make_grid(-5.0, 0.1, 101).validate(20.0), InvalidParameter);
    CHECK_NOTHROW(wide_grid().validate(24.0));
}

TEST_CASE("grid nearest node clamps into range") {
    Grid g = make_grid(-1.0, 0.5, 5); // nodes -1,-0.5,0,0.5,1
    CHECK(g.nearest(-0.74) == 1);
    CHECK(g.nearest(0.24) == 2);
    CHECK(g.nearest(-100.0) == 0);
    CHECK(g.nearest(100.0) == 4);
    CHECK(g.x_right() == doctest::Approx(1.0));
}

TEST_CASE("peakon field samples the closed form") {
    Grid g = wide_grid();
    Field u = peakon_field({1.0, 0.0, +1}, 0.0, g);
    auto at = [&](double x) { return u[static_cast<std::size_t>(g.nearest(x))]; };
    CHECK(at(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(at(-3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

    // amplitude scales with sqrt(c); crest travels at speed c
    Field u4 = peakon_field({4.0, 0.0, +1}, 0.5, g);
    double sup = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < u4.size(); ++i)
        if (u4[i] > sup) { sup = u4[i]; arg = i; }
    CHECK(sup == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g.x(static_cast<std::int64_t>(arg)) == doctest::Approx(2.0)); // 0 + 4*0.5

    Field trough = peakon_field({1.0, 0.0, -1}, 0.0, g);
    CHECK(trough[static_cast<std::size_t>(g.nearest(0.0))] == doctest::Approx(-1.0));

    CHECK_THROWS_AS(peakon_field({-1.0, 0.0, +1}, 0.0, g), InvalidParameter);
}

TEST_CASE("single-entry superposition matches the peakon field") {
    Grid g = wide_grid();
    std::vector<double> q{2.5}, p{std::sqrt(3.0)};
    Field a = multipeakon_field(q, p, g);
    Field b = peakon_field({3.0, 2.5, +1}, 0.0, g);
    CHECK(sup_diff(a, b) <= 1e-12);
}

TEST_CASE("superposition rejects unordered positions") {
    Grid g = wide_grid();
    std::vector<double> q{1.0, -1.0}, p{1.0, 1.0};
    CHECK_THROWS_AS(multipeakon_field(q, p, g), PreconditionError);
    std::vector<double> q2{1.0}, p2{1.0, 2.0};
    CHECK_THROWS_AS(multipeakon_field(q2, p2, g), InvalidParameter);
}

TEST_CASE("momentum density is second order on smooth fields") {
    // (1 - d^2/dx^2) e^{-x^2} = (3 - 4x^2) e^{-x^2}
    double prev_err = 0.0;
    for (double dx : {0.05, 0.025}) {
        Grid g = wide_grid(dx);
        Field u = gaussian_velocity(g, 1.0, 1.0);
        MomentumField y = momentum_density(u);
        double err = 0.0;
        for (std::int64_t i = 1; i + 1 < g.n; ++i) {
            double x = g.x(i);
            double exact = (3.0 - 4.0 * x * x) * std::exp(-x * x);
            err = std::max(err, std::abs(y[static_cast<std::size_t>(i)] - exact));
        }
        CHECK(err <= 1.5 * dx * dx); // measured 0.999*dx^2
        if (prev_err > 0.0) {
            double ratio = prev_err / err;
            CHECK(ratio >= 3.0);
            CHECK(ratio <= 5.5);
        }
        prev_err = err;
    }
}

TEST_CASE("helmholtz inverse undoes momentum density to round-off") {
    Grid g = wide_grid();
    std::vector<double> q{-4.0, 1.0, 6.5}, p{0.9, 1.4, 0.3};
    Field u = multipeakon_field(q, p, g);
    Field back = helmholtz_inverse(momentum_density(u));
    double sup_u = norms(u).sup;
    CHECK(sup_diff(u, back) <= 1e-10 * sup_u);
}

TEST_CASE("discrete derivative stays dominated by admissible fields") {
    // |u_x| <= u holds in the continuum for nonnegative-momentum data; the
    // grid version keeps the defect within one first-order constant.
    Grid g = wide_grid();
    for (const Field& u : {helmholtz_inverse(peakon_momentum_spike({1.0, 0.0, +1}, 0.0, g)),
                           helmholtz_inverse(gaussian_momentum(g, 0.5, 2.0)),
                           peakon_field({2.0, -3.0, +1}, 0.0, g)}) {
        auto ux = diff1(u);
        double defect = -1.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            defect = std::max(defect, std::abs(ux[i]) - u[i]);
        CHECK(defect <= 1.0 * g.dx);
    }
}

TEST_CASE("peakon momentum spike carries the full mass on one node") {
    Grid g = wide_grid();
    MomentumField y = peakon_momentum_spike({2.25, 3.7, +1}, 0.0, g);
    CHECK(is_y_plus(y));
    int nonzero = 0;
    for (double v : y.values) nonzero += (v != 0.0);
    CHECK(nonzero == 1);
    // trapezoid weight dx * (2 sqrt(c)/dx) = 2 sqrt(c)
    CHECK(trapezoid(g, y.values) == doctest::Approx(3.0).epsilon(1e-13));

    // its velocity preimage is the discrete peakon, second-order close to the
    // sampled exponential (measured 0.125*dx^2)
    Field v = helmholtz_inverse(y);
    Field ref = peakon_field({2.25, 3.7, +1}, 0.0, g);
    CHECK(sup_diff(v, ref) <= 0.25 * g.dx * g.dx);
}

TEST_CASE("sampled peakon momentum is close to but not exactly sign-definite") {
    // The sampled exponential has no nonnegative discrete momentum: centred
    // curvature dips ~ -u dx^2/12 off the crest. The spike proxy exists for
    // exactly this reason.
    Grid g = wide_grid();
    MomentumField y = momentum_density(peakon_field({1.0, 0.0, +1}, 0.0, g));
    CHECK_FALSE(is_y_plus(y));
    double mn = 0.0;
    for (double v : y.values) mn = std::min(mn, v);
    CHECK(mn >= -1.0 * g.dx * g.dx); // measured -2e-4 at dx=0.05
    CHECK(trapezoid(g, y.values) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("sign classification tolerates round-off but not real dips") {
    Grid g = wide_grid();
    MomentumField y(g, 0.0);
    y[100] = 1.0;
    y[200] = 1e-11; // positive noise
    CHECK(is_y_plus(y));
    y[200] = -1e-11; // below 1e-10 relative: still admissible
    CHECK(is_y_plus(y));
    y[200] = -1e-9;
    CHECK_FALSE(is_y_plus(y));
    // gaussian velocity has genuine negative momentum lobes at |x| > sqrt(3)/2
    CHECK_FALSE(is_y_plus(momentum_density(gaussian_velocity(g, 1.0, 1.0))));
}

TEST_CASE("mollifier preserves mass and respects resolution") {
    Grid g = wide_grid();
    Field u = gaussian_velocity(g, 1.3, 2.0);
    double m0 = trapezoid(g, u.values);
    for (int n : {1, 2, 4, 8}) {
        Field s = mollify(u, n);
        CHECK(trapezoid(g, s.values) == doctest::Approx(m0).epsilon(1e-12));
        CHECK(norms(s).sup <= norms(u).sup * (1.0 + 1e-12));
    }
    // radius 1/40 = 0.025 does not span a 0.05 cell
    CHECK_THROWS_AS(mollify(u, 40), ResolutionError);
    CHECK_THROWS_AS(mollify(u, 0), InvalidParameter);
}

TEST_CASE("bump profile and its normalisation agree with quadrature") {
    CHECK(bump_profile(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(bump_profile(1.0) == 0.0);
    CHECK(bump_profile(-1.2) == 0.0);
    // Simpson on [-1,1] with 20000 panels, accurate far beyond 1e-10
    int m = 20000;
    double h = 2.0 / m, acc = 0.0;
    for (int i = 0; i < m; ++i) {
        double a = -1.0 + i * h;
        acc += h / 6.0 * (bump_profile(a) + 4.0 * bump_profile(a + 0.5 * h) + bump_profile(a + h));
    }
    CHECK(bump_normalization() == doctest::Approx(acc).epsilon(1e-10));
}

TEST_CASE("h1 norm grows when adding a disjoint bump") {
    Grid g = wide_grid();
    Field one = peakon_field({1.0, -10.0, +1}, 0.0, g);
    Field two = one;
    Field other = peakon_field({0.49, 10.0, +1}, 0.0, g);
    for (std::size_t i = 0; i < two.size(); ++i) two[i] += other[i];
    Norms n1 = norms(one), n2 = norms(two);
    CHECK(n2.h1 > n1.h1);
    CHECK(n2.l2 > n1.l2);
    // disjoint supports: squared norms nearly add (overlap e^{-20})
    double expect = n1.h1 * n1.h1 + norms(other).h1 * norms(other).h1;
    CHECK(n2.h1 * n2.h1 == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("trapezoid quadrature is exact on affine data") {
    Grid g = make_grid(0.0, 0.25, 9); // [0,2]
    std::vector<double> lin(9);
    for (int i = 0; i < 9; ++i) lin[static_cast<std::size_t>(i)] = 3.0 + 0.5 * g.x(i);
    CHECK(trapezoid(g, lin) == doctest::Approx(6.0 + 0.25 * 4.0).epsilon(1e-14));
}

TEST_CASE("field serialization round-trips bit-for-bit") {
    Grid g = make_grid(-2.0, 0.01, 401);
    Field u(g);
    for (std::int64_t i = 0; i < g.n; ++i)
        u[static_cast<std::size_t>(i)] = std::sin(1e3 * static_cast<double>(i) + 0.123456789);
    auto dir = std::filesystem::temp_directory_path();
    auto csv = (dir / "novlab_roundtrip.csv").string();
    auto bin = (dir / "novlab_roundtrip.bin").string();

    write_field_csv(u, csv);
    Field rc = read_field_csv(csv);
    REQUIRE(rc.grid == g);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(rc[i] == u[i]);

    write_field_binary(u, bin);
    Field rb = read_field_binary(bin);
    REQUIRE(rb.grid == g);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(rb[i] == u[i]);

    std::filesystem::remove(csv);
    std::filesystem::remove(bin);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 2e-17, -123456.789012345678, 0.73575888234288467}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
