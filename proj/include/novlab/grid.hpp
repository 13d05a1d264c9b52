#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace novlab {

// Uniform 1-D grid: x_i = x_left + i*dx, i = 0..n-1.
struct Grid {
    double x_left = 0.0;
    double dx = 0.0;
    std::int64_t n = 0;

    double x(std::int64_t i) const { return x_left + static_cast<double>(i) * dx; }
    double x_right() const { return x(n - 1); }
    double half_width() const { return 0.5 * (x_right() - x_left); }

    // Nearest node index, clamped into range.
    std::int64_t nearest(double xq) const;

    bool operator==(const Grid&) const = default;

    // Throws InvalidParameter unless dx > 0, n >= 3 and all quantities finite.
    void validate(double min_half_width = 0.0) const;
};

Grid make_grid(double x_left, double dx, std::int64_t n);

// Scalar samples on a grid.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(const Grid& g, double fill = 0.0) : grid(g), values(static_cast<std::size_t>(g.n), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

// Momentum-density samples; same layout as Field, separate type so sign-class
// bookkeeping does not mix with velocity fields.
struct MomentumField {
    Grid grid;
    std::vector<double> values;

    MomentumField() = default;
    explicit MomentumField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.n), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

struct PeakonParams {
    double c = 1.0;   // wave speed, must be > 0
    double x0 = 0.0;  // crest position at t = 0
    int sign = +1;    // +1 peak, -1 trough
};

// u(x) = sign*sqrt(c)*exp(-|x - c t - x0|) sampled on the grid.
Field peakon_field(const PeakonParams& p, double t, const Grid& g);

// u(x) = sum_i p_i exp(-|x - q_i|); q must be strictly increasing.
Field multipeakon_field(std::span<const double> q, std::span<const double> p, const Grid& g);

// Grid proxy for the peakon momentum measure 2*sqrt(c)*delta: a single node
// spike of height 2*sqrt(c)/dx at the node nearest the crest.  The sampled
// exponential profile has no exact nonnegative momentum density on a grid;
// experiments that need an exactly sign-definite peakon start from this spike
// (its Helmholtz preimage is the discrete peakon).
MomentumField peakon_momentum_spike(const PeakonParams& p, double t, const Grid& g);

// y_i = u_i - (u_{i+1} - 2 u_i + u_{i-1})/dx^2 with boundary neighbours
// copied from the boundary value; exact inverse of helmholtz_inverse.
MomentumField momentum_density(const Field& u);

struct Norms {
    double l2 = 0.0;   // sqrt(trapezoid u^2)
    double h1 = 0.0;   // sqrt(trapezoid u^2 + u_x^2)
    double sup = 0.0;  // max |u|
};

Norms norms(const Field& u);

// Discrete first derivative: centred in the interior, one-sided at the ends.
std::vector<double> diff1(const Field& u);
std::vector<double> diff1(const Grid& g, std::span<const double> v);

// Trapezoid quadrature of samples on the grid.
double trapezoid(const Grid& g, std::span<const double> v);

// Smoothing by the standard compactly-supported bump at scale 1/n_smooth.
// Discrete weights are renormalised to unit mass; throws ResolutionError when
// the smoothing radius does not reach past one grid cell.
Field mollify(const Field& u, int n_smooth);

// The bump profile exp(1/(s^2-1)) on (-1,1) and its normalisation constant
// (computed once by adaptive quadrature).
double bump_profile(double s);
double bump_normalization();

// true iff min(values) >= -1e-10 * max|values|.
bool is_y_plus(const MomentumField& y);

} // namespace novlab
