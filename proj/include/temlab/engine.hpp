#pragma once

// One-path integrators: the partially truncated Euler-Maruyama scheme and
// the classical (untruncated) baseline. The delay history is a flat buffer
// indexed k = -M..M_T; delay lookups are pure integer-offset reads.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "temlab/grid.hpp"
#include "temlab/model.hpp"
#include "temlab/truncation.hpp"

namespace temlab {

enum class Scheme { truncated, classical };

/// Classical EM is declared exploded at the first non-finite value or
/// |x| > 1e12; remaining values are left as NaN.
inline constexpr double kExplosionThreshold = 1e12;

struct DiscretePath {
    GridSpec grid;
    Scheme scheme = Scheme::truncated;
    std::vector<double> values; ///< size M + M_T + 1, index shift M
    bool exploded = false;
    std::int64_t explosion_step = -1; ///< forward step k at which explosion was detected

    double at(std::int64_t k) const { return values[static_cast<std::size_t>(k + grid.M)]; }

    /// Step process: left-constant value at time t in [0, T]; t = T maps to M_T.
    double step_process_value(double t) const {
        if (!(t >= 0.0 && t <= grid.T))
            throw std::domain_error("step_process_value: t outside [0, T]");
        std::int64_t k = static_cast<std::int64_t>(std::floor(t / grid.delta));
        if (k > grid.M_T) k = grid.M_T;
        return at(k);
    }
};

struct SimulationFault : std::runtime_error {
    std::int64_t step;
    explicit SimulationFault(std::int64_t k)
        : std::runtime_error("truncated scheme produced a non-finite state at step " + std::to_string(k)),
          step(k) {}
};

namespace detail {

inline DiscretePath init_path(const ModelSpec& model, const GridSpec& grid, Scheme scheme) {
    DiscretePath p;
    p.grid = grid;
    p.scheme = scheme;
    p.values.assign(static_cast<std::size_t>(grid.M + grid.M_T + 1),
                    std::numeric_limits<double>::quiet_NaN());
    for (std::int64_t k = -grid.M; k <= 0; ++k)
        p.values[static_cast<std::size_t>(k + grid.M)] = model.initial_segment(grid.time_at(k));
    return p;
}

} // namespace detail

/// Partially truncated EM over the grid. A non-finite state is a fault (it
/// cannot happen for an admissible policy) and throws SimulationFault.
inline DiscretePath simulate_truncated(const ModelSpec& model, const TruncationPolicy& policy,
                                       const GridSpec& grid, std::span<const double> increments) {
    if (static_cast<std::int64_t>(increments.size()) != grid.M_T)
        throw std::invalid_argument("simulate_truncated: increment count != M_T");
    if (grid.offsets.size() != model.arity())
        throw std::invalid_argument("simulate_truncated: grid offsets do not match model delays");

    DiscretePath p = detail::init_path(model, grid, Scheme::truncated);
    const double radius = clamp_radius(policy, grid.delta);
    const std::size_t r = model.arity();
    std::vector<double> args(r);
    double* v = p.values.data() + grid.M;
    for (std::int64_t k = 0; k < grid.M_T; ++k) {
        const double z = v[k];
        for (std::size_t i = 0; i < r; ++i) args[i] = v[k - grid.offsets[i]];
        const double w = truncate(z, radius);
        const double drift = model.alpha1(w) + model.alpha2(w) + model.alpha3(args);
        const double diff = model.beta(w);
        const double next = z + drift * grid.delta + diff * increments[static_cast<std::size_t>(k)];
        if (!std::isfinite(next)) throw SimulationFault(k);
        v[k + 1] = next;
    }
    return p;
}

/// Classical EM baseline. Explosion is data, not an error: the path is
/// flagged at the first non-finite or threshold-crossing step and the
/// remaining values stay NaN.
inline DiscretePath simulate_classical(const ModelSpec& model, const GridSpec& grid,
                                       std::span<const double> increments) {
    if (static_cast<std::int64_t>(increments.size()) != grid.M_T)
        throw std::invalid_argument("simulate_classical: increment count != M_T");
    if (grid.offsets.size() != model.arity())
        throw std::invalid_argument("simulate_classical: grid offsets do not match model delays");

    DiscretePath p = detail::init_path(model, grid, Scheme::classical);
    const std::size_t r = model.arity();
    std::vector<double> args(r);
    double* v = p.values.data() + grid.M;
    for (std::int64_t k = 0; k < grid.M_T; ++k) {
        const double z = v[k];
        for (std::size_t i = 0; i < r; ++i) args[i] = v[k - grid.offsets[i]];
        const double next = z + model.drift(args) * grid.delta +
                            model.beta(z) * increments[static_cast<std::size_t>(k)];
        if (!std::isfinite(next) || std::abs(next) > kExplosionThreshold) {
            p.exploded = true;
            p.explosion_step = k;
            return p;
        }
        v[k + 1] = next;
    }
    return p;
}

} // namespace temlab
