#pragma once

// A concrete Yamada-Watanabe smoothing family. psi is a log-scale tent:
//
//   psi(u) = 2/(u ln Theta) * tri(s(u)),  s(u) = ln(u Theta / eps) / ln Theta,
//   tri(s) = max(0, 1 - |2s - 1|),
//
// supported on [eps/Theta, eps] and integrating to exactly 1. U is the
// double primitive of psi, a smooth surrogate for |x| with U'' = psi(|x|).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace temlab {

struct YWParams {
    double theta; ///< > 1
    double eps;   ///< in (0, 1)

    YWParams(double theta_, double eps_) : theta(theta_), eps(eps_) {
        if (!(theta > 1.0)) throw std::invalid_argument("YWParams: theta must exceed 1");
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("YWParams: eps outside (0,1)");
    }
    double support_lo() const { return eps / theta; }
    double support_hi() const { return eps; }
};

inline double yw_psi(const YWParams& p, double u) {
    if (u < 0.0) throw std::domain_error("yw_psi: u must be non-negative");
    if (u <= p.support_lo() || u >= p.support_hi()) return 0.0;
    const double ln_theta = std::log(p.theta);
    const double s = std::log(u / p.support_lo()) / ln_theta;
    const double tri = std::max(0.0, 1.0 - std::abs(2.0 * s - 1.0));
    return 2.0 / (u * ln_theta) * tri;
}

/// U'(y) for y >= 0: the psi mass below y, in closed form.
/// In tent coordinates s: 2s^2 on [0,1/2], 4s - 2s^2 - 1 on [1/2,1].
inline double yw_U_prime_abs(const YWParams& p, double y) {
    if (y <= p.support_lo()) return 0.0;
    if (y >= p.support_hi()) return 1.0;
    const double s = std::log(y / p.support_lo()) / std::log(p.theta);
    if (s <= 0.5) return 2.0 * s * s;
    return 4.0 * s - 2.0 * s * s - 1.0;
}

/// Signed U'(x).
inline double yw_U_prime(const YWParams& p, double x) {
    const double v = yw_U_prime_abs(p, std::abs(x));
    return x < 0.0 ? -v : v;
}

inline double yw_U_double_prime(const YWParams& p, double x) {
    return yw_psi(p, std::abs(x));
}

namespace detail {

// Adaptive Simpson to absolute tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

} // namespace detail

/// U(x) = int_0^{|x|} U'(y) dy. Zero below the support, linear with unit
/// slope above it; the middle piece is integrated adaptively to 1e-12,
/// split at the tent peak.
inline double yw_U(const YWParams& p, double x) {
    const double a = std::abs(x);
    if (a <= p.support_lo()) return 0.0;
    const double lo = p.support_lo();
    const double hi = p.support_hi();
    const double peak = lo * std::sqrt(p.theta); // s = 1/2
    auto uprime = [&p](double y) { return yw_U_prime_abs(p, y); };
    const double upper = std::min(a, hi);
    double val = detail::integrate(uprime, lo, std::min(upper, peak), 1e-12);
    if (upper > peak) val += detail::integrate(uprime, peak, upper, 1e-12);
    if (a > hi) val += a - hi;
    return val;
}

} // namespace temlab
