#pragma once

#include "novlab/grid.hpp"

namespace novlab {

// Solves (I - D2) v = f on the grid, D2 being the same three-point stencil
// used by momentum_density (boundary neighbours copied).  Direct tridiagonal
// elimination; a residual above 1e-12 * max|f| raises InternalError.
Field helmholtz_inverse(const Grid& g, std::span<const double> f);
Field helmholtz_inverse(const Field& f);
Field helmholtz_inverse(const MomentumField& f);

enum class Kernel {
    p,        // (I - D2)^{-1}, equal to the tridiagonal solve
    p_x,      // centred derivative of the p image
    p_plus,   // left one-sided exponential integral (e^{-x}/2) int_{-inf}^x e^z f
    p_minus,  // right one-sided exponential integral (e^x/2) int_x^inf e^{-z} f
};

// p_plus / p_minus are evaluated by prefix scans with the decay rate and node
// weight of the discrete Green function of (I - D2), so their sum reproduces
// the tridiagonal inverse to round-off (away from the domain ends).
Field conv_kernel(const Field& f, Kernel k);
Field conv_kernel(const Grid& g, std::span<const double> f, Kernel k);

// Per-cell decay factor mu and node weight alpha of the discrete Green
// function alpha * mu^{|i-j|}; mu = exp(-dx) + O(dx^3), alpha = dx/2 + O(dx^3).
struct GreenCoeffs {
    double mu;
    double alpha;
};
GreenCoeffs green_coeffs(double dx);

// Slowly-varying transport weight W(x) = (2/pi) atan(exp(x/6)) and its exact
// first and third derivatives (closed forms, never finite differences).
struct WeightEval {
    std::vector<double> psi;
    std::vector<double> dpsi;
    std::vector<double> d3psi;
};

WeightEval psi_eval(const Grid& g, double shift);

double psi_value(double z);    // (2/pi) atan(e^{z/6})
double psi_prime(double z);    // 1 / (6 pi cosh(z/6))
double psi_third(double z);    // closed form, |psi_third| <= psi_prime / 36

} // namespace novlab
