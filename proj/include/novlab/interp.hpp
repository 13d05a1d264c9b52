#pragma once

#include <span>
#include <vector>

namespace novlab {

// Shape-preserving piecewise-cubic interpolant on a uniform grid
// (Fritsch-Carlson slope limiting).  C^1, no overshoot between nodes,
// monotone on monotone data.  Evaluation outside the grid clamps to the
// boundary values.
class CubicInterp {
  public:
    CubicInterp() = default;
    CubicInterp(double x0, double dx, std::span<const double> values);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * static_cast<double>(v_.size() - 1); }

  private:
    double x0_ = 0.0;
    double dx_ = 1.0;
    std::vector<double> v_;
    std::vector<double> m_;  // limited node slopes

    void locate(double x, std::size_t& k, double& s) const;
};

} // namespace novlab
