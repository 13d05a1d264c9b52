#include "novlab/interp.hpp"

#include "novlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace novlab {

CubicInterp::CubicInterp(double x0, double dx, std::span<const double> values)
    : x0_(x0), dx_(dx), v_(values.begin(), values.end()) {
    if (v_.size() < 2 || !(dx > 0.0)) throw InvalidParameter("interp: need >= 2 nodes, dx > 0");
    const std::size_t n = v_.size();
    std::vector<double> d(n - 1);  // secant slopes
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (v_[i + 1] - v_[i]) / dx_;
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;  // local extremum: flat slope keeps the shape
        } else {
            // harmonic mean limiter (uniform spacing)
            m_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
        }
    }
    // clamp endpoint slopes (Fritsch-Carlson three-point rule simplified)
    for (std::size_t e : {std::size_t{0}, n - 1}) {
        const double ds = (e == 0) ? d[0] : d[n - 2];
        if (ds == 0.0)
            m_[e] = 0.0;
        else if (m_[e] * ds < 0.0)
            m_[e] = 0.0;
        else if (std::abs(m_[e]) > 3.0 * std::abs(ds))
            m_[e] = 3.0 * ds;
    }
}

void CubicInterp::locate(double x, std::size_t& k, double& s) const {
    const double r = (x - x0_) / dx_;
    const double nseg = static_cast<double>(v_.size() - 1);
    const double rc = std::clamp(r, 0.0, nseg);
    k = static_cast<std::size_t>(std::min(rc, nseg - 1.0));
    s = rc - static_cast<double>(k);
}

double CubicInterp::operator()(double x) const {
    std::size_t k;
    double s;
    locate(x, k, s);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * v_[k] + h10 * dx_ * m_[k] + h01 * v_[k + 1] + h11 * dx_ * m_[k + 1];
}

double CubicInterp::derivative(double x) const {
    std::size_t k;
    double s;
    locate(x, k, s);
    const double g00 = 6.0 * s * (s - 1.0);
    const double g10 = (1.0 - s) * (1.0 - 3.0 * s);
    const double g01 = -g00;
    const double g11 = s * (3.0 * s - 2.0);
    return g00 * v_[k] / dx_ + g10 * m_[k] + g01 * v_[k + 1] / dx_ + g11 * m_[k + 1];
}

} // namespace novlab
