#pragma once

// Truncation pair (h, Gamma) with h(w) = L w^upsilon and
// Gamma(Delta) = Delta^{-epsilon}, the clamp mapping, and the partially
// truncated coefficient evaluations: alpha1, alpha2 and beta see the
// clamped current state, alpha3 sees the raw delay vector.

#include <cmath>
#include <span>
#include <stdexcept>

#include "temlab/model.hpp"

namespace temlab {

struct TruncationPolicy {
    double L = 1.0;       ///< scale of h
    double upsilon = 1.0; ///< exponent of h, >= 1
    double epsilon = 0.25;///< exponent of Gamma, in (0, 1/4]
    double L0 = 1.0;      ///< constraint Delta^{1/4} Gamma(Delta) <= L0

    void validate() const {
        if (!(L > 0.0)) throw std::invalid_argument("truncation policy: L must be positive");
        if (!(upsilon >= 1.0)) throw std::invalid_argument("truncation policy: upsilon must be >= 1");
        if (!(epsilon > 0.0 && epsilon <= 0.25))
            throw std::invalid_argument("truncation policy: epsilon outside (0, 1/4]");
        if (!(L0 >= 1.0)) throw std::invalid_argument("truncation policy: L0 must be >= 1");
    }
};

/// Default policy for a model: L = L1 + 2 L3 + |alpha1(0)| + |alpha2(0)| + |beta(0)|,
/// upsilon = max(l1, l2, l3) + 1, epsilon = 1/4, L0 = 1.
inline TruncationPolicy default_policy(const ModelSpec& model) {
    TruncationPolicy p;
    p.L = model.L1 + 2.0 * model.L3 + std::abs(model.alpha1(0.0)) +
          std::abs(model.alpha2(0.0)) + std::abs(model.beta(0.0));
    if (!(p.L > 0.0)) p.L = 1.0; // degenerate all-zero model
    p.upsilon = std::max({model.l1, model.l2, model.l3}) + 1.0;
    p.epsilon = 0.25;
    p.L0 = 1.0;
    return p;
}

/// Gamma(Delta) = Delta^{-epsilon}.
inline double gamma_of(const TruncationPolicy& policy, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("gamma_of: delta outside (0,1]");
    return std::pow(delta, -policy.epsilon);
}

/// Clamp radius h^{-1}(Gamma(Delta)) = (Gamma(Delta)/L)^{1/upsilon},
/// evaluated without the h-domain restriction. May fall below 1 for
/// coarse steps; see truncation_bound for the strict variant.
inline double clamp_radius(const TruncationPolicy& policy, double delta) {
    return std::pow(gamma_of(policy, delta) / policy.L, 1.0 / policy.upsilon);
}

/// Strict clamp radius: requires Gamma(Delta) >= h(1) = L so the radius is
/// in h's inverse domain [1, inf).
inline double truncation_bound(const TruncationPolicy& policy, double delta) {
    const double g = gamma_of(policy, delta);
    if (g < policy.L)
        throw std::domain_error("step size too large for truncation policy");
    return std::pow(g / policy.L, 1.0 / policy.upsilon);
}

/// pi_Delta: clamp x into [-bound, bound]; maps 0 to 0.
inline double truncate(double x, double bound) {
    if (x > bound) return bound;
    if (x < -bound) return -bound;
    return x;
}

/// Partially truncated drift: alpha1, alpha2 at the clamped current state,
/// alpha3 at the raw vector.
inline double eval_truncated_drift(const ModelSpec& model, const TruncationPolicy& policy,
                                   double delta, std::span<const double> m) {
    const double w = truncate(m[0], clamp_radius(policy, delta));
    return model.alpha1(w) + model.alpha2(w) + model.alpha3(m);
}

/// Truncated diffusion: beta at the clamped current state.
inline double eval_truncated_diffusion(const ModelSpec& model, const TruncationPolicy& policy,
                                       double delta, double m1) {
    return model.beta(truncate(m1, clamp_radius(policy, delta)));
}

/// Hypothesis Gamma(Delta) >= h((Delta^{1/2} Gamma(Delta))^{-1}) used by the
/// L1-rate theorem; reported per step size by the CLI.
inline bool rate_hypothesis_holds(const TruncationPolicy& policy, double delta) {
    const double g = gamma_of(policy, delta);
    const double w = 1.0 / (std::sqrt(delta) * g);
    return g >= policy.L * std::pow(w, policy.upsilon);
}

} // namespace temlab
