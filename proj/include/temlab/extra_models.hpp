#pragma once

// Small auxiliary models used by experiments and tests: a pure cubic-drift
// model (classical EM explodes on it at coarse steps) and an
// additive-noise model whose coupled strong error vanishes exactly.

#include <cmath>
#include <span>

#include "temlab/model.hpp"

namespace temlab {

/// dz = -4 z^3 dt + |z|^{1/2} dB, no delays, xi == xi0.
inline ModelSpec builtin_cubic(double xi0 = 2.0) {
    ModelSpec m;
    m.name = "cubic";
    m.alpha1 = [](double) { return 0.0; };
    m.alpha2 = [](double z) { return -4.0 * z * z * z; };
    m.alpha3 = [](std::span<const double>) { return 0.0; };
    m.beta = [](double z) { return std::sqrt(std::abs(z)); };
    m.delays = {0.0};
    m.initial_segment = [xi0](double) { return xi0; };
    m.gamma = 1.0;
    m.eta = 0.5;
    m.sigma = 0.5;
    m.l1 = 1.0;
    m.l2 = 2.0;
    m.l3 = 1.0;
    m.p_check = 2.0;
    m.L1 = 1.0;
    m.L3 = 6.0;
    m.L4 = 1.0;
    m.Lbar2 = 1.0;
    return m;
}

/// dz = 1 dB, xi == 0. With block-sum coupling every strong-error metric
/// is exactly zero at every step size.
inline ModelSpec builtin_additive() {
    ModelSpec m;
    m.name = "additive";
    m.alpha1 = [](double) { return 0.0; };
    m.alpha2 = [](double) { return 0.0; };
    m.alpha3 = [](std::span<const double>) { return 0.0; };
    m.beta = [](double) { return 1.0; };
    m.delays = {0.0};
    m.initial_segment = [](double) { return 0.0; };
    m.gamma = 1.0;
    m.eta = 0.5;
    m.sigma = 0.5;
    m.l1 = 1.0;
    m.l2 = 1.0;
    m.l3 = 1.0;
    m.p_check = 2.0;
    m.L1 = 1.0;
    m.L3 = 1.0;
    m.L4 = 1.0;
    m.Lbar2 = 1.0;
    return m;
}

} // namespace temlab
