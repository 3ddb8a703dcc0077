#pragma once

// Delay-commensurate uniform time grid: Delta = tau_v/k_v = T/M_T = tau/M.
// Times are always derived as t_k = k*Delta from integer indices.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace temlab {

struct GridSpec {
    double delta = 0.0;
    double T = 0.0;
    std::int64_t M = 0;            ///< history steps, tau/Delta
    std::int64_t M_T = 0;          ///< forward steps, T/Delta
    std::vector<std::int64_t> offsets; ///< k_v = tau_v/Delta, offsets[0] == 0

    double time_at(std::int64_t k) const { return static_cast<double>(k) * delta; }
};

namespace detail {

inline std::int64_t commensurate_index(double value, double delta, const std::string& what) {
    const double q = value / delta;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-12 * std::max(1.0, std::abs(q)))
        throw std::invalid_argument("incommensurate step size: " + what + " is not an integer multiple of delta");
    return static_cast<std::int64_t>(r);
}

} // namespace detail

inline GridSpec build_grid(double T, const std::vector<double>& delays, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("build_grid: delta must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("build_grid: T must be positive");
    GridSpec g;
    g.delta = delta;
    g.T = T;
    g.M_T = detail::commensurate_index(T, delta, "horizon T=" + std::to_string(T));
    g.offsets.reserve(delays.size());
    for (double tau_v : delays)
        g.offsets.push_back(detail::commensurate_index(tau_v, delta, "delay " + std::to_string(tau_v)));
    g.M = g.offsets.back();
    return g;
}

} // namespace temlab
