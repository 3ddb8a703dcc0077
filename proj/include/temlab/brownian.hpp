#pragma once

// Per-path Brownian increment streams at a finest resolution, coarsened by
// block sums so every step size in a coupled experiment shares one Brownian
// path. Increments are snapped to the lattice k * 2^{-26}: all block sums of
// realistic experiment sizes are then exact in double precision, so any
// coarsening chain (and any summation grouping) yields identical bits.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "temlab/rng.hpp"

namespace temlab {

inline constexpr double kIncrementQuantum = 0x1p-26;
inline constexpr const char* kGeneratorName = "philox4x32-10/as241-icdf/q26";

struct BrownianDriver {
    std::uint64_t master_seed = 0;
    double delta_fine = 0.0;
    std::size_t n_fine = 0; ///< fine steps covering [0, T]

    BrownianDriver(std::uint64_t seed, double delta_fine_, std::size_t n_fine_)
        : master_seed(seed), delta_fine(delta_fine_), n_fine(n_fine_) {
        if (!(delta_fine > 0.0)) throw std::invalid_argument("BrownianDriver: delta_fine must be positive");
        if (n_fine == 0) throw std::invalid_argument("BrownianDriver: n_fine must be positive");
    }

    /// N(0, delta_fine) increments for one path, quantized to the lattice.
    std::vector<double> fine_increments(std::uint64_t path_index) const {
        NormalStream stream(master_seed, path_index);
        const double scale = std::sqrt(delta_fine);
        std::vector<double> out(n_fine);
        for (std::size_t i = 0; i < n_fine; ++i)
            out[i] = std::nearbyint(stream(i) * scale / kIncrementQuantum) * kIncrementQuantum;
        return out;
    }
};

/// Block sums in ascending index order: out[j] = sum of factor consecutive
/// inputs. On lattice increments every grouping is exact, so chained
/// coarsenings agree bitwise.
inline std::vector<double> coarsen(const std::vector<double>& increments, std::size_t factor) {
    if (factor == 0 || increments.size() % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide the increment count");
    std::vector<double> out(increments.size() / factor);
    std::size_t i = 0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < factor; ++k) s += increments[i++];
        out[j] = s;
    }
    return out;
}

} // namespace temlab
