#pragma once

// Multiple-delay SDE model descriptions:
//
//   dz(t) = [ alpha1(z) + alpha2(z) + alpha3(z, z(t-tau_2), ..., z(t-tau_r)) ] dt
//           + beta(z) dB(t),   z(t) = xi(t) on [-tau, 0].
//
// alpha1 is the Hoelder-continuous superlinear part, alpha2 the one-sided
// Lipschitz superlinear part, alpha3 the globally Lipschitz delay part.
// Built-in models: the 3/2 volatility model, a three-delay benchmark, and
// a family with J equally spaced delays.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "temlab/rng.hpp"

namespace temlab {

struct ModelSpec {
    std::string name;

    std::function<double(double)> alpha1;
    std::function<double(double)> alpha2;
    std::function<double(std::span<const double>)> alpha3;
    std::function<double(double)> beta;

    /// Sorted, strictly increasing, delays[0] == 0. delays.back() == tau.
    std::vector<double> delays;

    /// Initial segment xi on [-tau, 0].
    std::function<double(double)> initial_segment;
    double gamma = 1.0; ///< Hoelder exponent of xi

    // Regularity metadata.
    double eta = 0.5;     ///< alpha1 Hoelder exponent, in (0,1)
    double sigma = 0.5;   ///< beta Hoelder exponent, in [1/2,1)
    double l1 = 1.0;
    double l2 = 1.0;
    double l3 = 1.0;
    double p_check = 2.0;

    // Declared assumption constants.
    double L1 = 1.0;
    double L3 = 1.0;
    double L4 = 1.0;
    double Lbar2 = 1.0;

    std::size_t arity() const { return delays.size(); }
    double tau() const { return delays.back(); }

    double drift(std::span<const double> m) const {
        return alpha1(m[0]) + alpha2(m[0]) + alpha3(m);
    }

    /// Structural sanity check; throws on a malformed spec.
    void validate() const {
        if (delays.empty() || delays.front() != 0.0)
            throw std::invalid_argument("model '" + name + "': delays must start at 0");
        for (std::size_t i = 1; i < delays.size(); ++i)
            if (!(delays[i] > delays[i - 1]))
                throw std::invalid_argument("model '" + name + "': delays must be strictly increasing");
        if (!(eta > 0.0 && eta < 1.0))
            throw std::invalid_argument("model '" + name + "': eta outside (0,1)");
        if (!(sigma >= 0.5 && sigma < 1.0))
            throw std::invalid_argument("model '" + name + "': sigma outside [1/2,1)");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("model '" + name + "': gamma outside (0,1]");
        if (!(p_check >= 2.0))
            throw std::invalid_argument("model '" + name + "': p_check < 2");
    }
};

/// Risk-neutral 3/2 volatility model
///   dV = (c4 V + c5 V|V| - lambda* k V|V|^{1/2}) dt + k |V|^{3/2} dB,
/// with V^2 extended as V|V| so the one-sided Lipschitz structure holds on
/// all of R. Delay-free (r = 1); the initial value is the constant v0.
inline ModelSpec builtin_vix32(double c4, double c5, double lambda_star, double k,
                               double v0 = 1.0) {
    if (k == 0.0) throw std::invalid_argument("vix32: k must be nonzero");
    ModelSpec m;
    m.name = "vix32";
    m.alpha1 = [lambda_star, k](double v) { return -lambda_star * k * v * std::sqrt(std::abs(v)); };
    m.alpha2 = [c4, c5](double v) { return c4 * v + c5 * v * std::abs(v); };
    m.alpha3 = [](std::span<const double>) { return 0.0; };
    m.beta = [k](double v) { return k * std::pow(std::abs(v), 1.5); };
    m.delays = {0.0};
    m.initial_segment = [v0](double) { return v0; };
    m.gamma = 1.0;
    m.eta = 0.5;
    m.sigma = 0.5;
    m.l1 = 1.0;
    m.l2 = 1.0;
    m.l3 = 1.0;
    m.p_check = 2.0;
    m.L1 = std::max({1.0, c4, 1.5 * std::abs(lambda_star * k)});
    m.L3 = std::max({1.0, std::abs(c4), std::abs(c5), 1.5 * std::abs(k)});
    m.L4 = 1.0;
    m.Lbar2 = std::max(1.0, std::abs(c4) + 1.0);
    return m;
}

/// Three-delay benchmark
///   dz = (-z|z|^{1/2} - 3z|z| - 4z^3 + 2z + 3z(t-0.25) + z(t-1)) dt
///        + |z|^{3/2} dB,   xi(t) = |t|^{1/2} + 2 on [-1,0].
inline ModelSpec builtin_vq2() {
    ModelSpec m;
    m.name = "vq2";
    m.alpha1 = [](double z) { return -z * std::sqrt(std::abs(z)); };
    m.alpha2 = [](double z) { return -3.0 * z * std::abs(z) - 4.0 * z * z * z; };
    // args: (z(t), z(t-0.25), z(t-1))
    m.alpha3 = [](std::span<const double> v) { return 2.0 * v[0] + 3.0 * v[1] + v[2]; };
    m.beta = [](double z) { return std::pow(std::abs(z), 1.5); };
    m.delays = {0.0, 0.25, 1.0};
    m.initial_segment = [](double t) { return std::sqrt(std::abs(t)) + 2.0; };
    m.gamma = 0.5;
    m.eta = 0.5;
    m.sigma = 0.5;
    m.l1 = 1.0;
    m.l2 = 2.0;
    m.l3 = 1.0;
    m.p_check = 2.0;
    m.L1 = 3.0;
    m.L3 = 9.0;
    m.L4 = 1.0;
    m.Lbar2 = 1.0;
    return m;
}

/// J-delay family
///   dz = (-4z^3 + z + sum_{j=1..J} z(t - j 2^{-9})) dt + |z|^{1/2} dB,
/// xi == 1 on [-J 2^{-9}, 0].
inline ModelSpec builtin_multi_delay(int J) {
    if (J < 1) throw std::invalid_argument("multi_delay: J must be >= 1");
    ModelSpec m;
    m.name = "mul" + std::to_string(J);
    m.alpha1 = [](double) { return 0.0; };
    m.alpha2 = [](double z) { return -4.0 * z * z * z; };
    m.alpha3 = [](std::span<const double> v) {
        double s = v[0];
        for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
        return s;
    };
    m.beta = [](double z) { return std::sqrt(std::abs(z)); };
    const double base = 0x1p-9;
    m.delays.resize(static_cast<std::size_t>(J) + 1);
    for (int j = 0; j <= J; ++j) m.delays[static_cast<std::size_t>(j)] = j * base;
    m.initial_segment = [](double) { return 1.0; };
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

/// Build a model from a CLI name: "vq2", "vix32", or "mulJ" (e.g. "mul512").
inline ModelSpec model_by_name(const std::string& name,
                               double c4 = 0.0, double c5 = 0.0,
                               double lambda_star = 0.0, double k = 1.0,
                               double v0 = 1.0) {
    if (name == "vq2") return builtin_vq2();
    if (name == "vix32") return builtin_vix32(c4, c5, lambda_star, k, v0);
    if (name.rfind("mul", 0) == 0) {
        const std::string num = name.substr(3);
        if (num.empty()) throw std::invalid_argument("model name 'mul' needs a delay count, e.g. mul512");
        return builtin_multi_delay(std::stoi(num));
    }
    throw std::invalid_argument("unknown model name: " + name);
}

// ---------------------------------------------------------------------------
// Sampling-based assumption checks
// ---------------------------------------------------------------------------

struct AssumptionRecord {
    std::string name;
    double max_violation = 0.0;          ///< max(0, lhs - rhs), worst over samples
    double fitted_constant = 0.0;        ///< smallest admissible constant seen
    std::vector<double> witness;         ///< arguments attaining max_violation
    std::size_t n_samples = 0;
};

struct AssumptionReport {
    std::vector<AssumptionRecord> records;

    double max_violation() const {
        double v = 0.0;
        for (const auto& r : records) v = std::max(v, r.max_violation);
        return v;
    }
    const AssumptionRecord& operator[](const std::string& n) const {
        for (const auto& r : records)
            if (r.name == n) return r;
        throw std::out_of_range("no assumption record named " + n);
    }
};

namespace detail {

// Track a single inequality lhs <= c * factor. A non-finite lhs or factor is
// recorded as an infinite violation with its witness.
struct IneqTracker {
    AssumptionRecord rec;
    double declared_c;

    IneqTracker(std::string name, double c) : declared_c(c) { rec.name = std::move(name); }

    void observe(double lhs, double factor, std::initializer_list<double> where) {
        ++rec.n_samples;
        if (!std::isfinite(lhs) || !std::isfinite(factor)) {
            if (!(rec.max_violation == std::numeric_limits<double>::infinity())) {
                rec.max_violation = std::numeric_limits<double>::infinity();
                rec.witness.assign(where);
            }
            return;
        }
        const double viol = std::max(0.0, lhs - declared_c * factor);
        if (viol > rec.max_violation) {
            rec.max_violation = viol;
            rec.witness.assign(where);
        }
        if (factor > 0.0) rec.fitted_constant = std::max(rec.fitted_constant, lhs / factor);
    }
};

} // namespace detail

/// Draw n_samples uniform points/pairs in [box_lo, box_hi] and report, for
/// each assumption inequality, the worst violation under the model's
/// declared constants plus the smallest constant the samples would admit.
inline AssumptionReport check_assumptions(const ModelSpec& model,
                                          double box_lo, double box_hi,
                                          std::size_t n_samples,
                                          std::uint64_t rng_seed) {
    if (!(box_hi > box_lo)) throw std::invalid_argument("check_assumptions: degenerate box");
    if (n_samples < 2) throw std::invalid_argument("check_assumptions: need n_samples >= 2");

    // Uniforms from a dedicated Philox stream keyed by the seed.
    std::uint64_t ctr = 0;
    auto uniform01 = [&ctr, rng_seed]() {
        const std::uint64_t i = ctr++;
        const std::array<std::uint32_t, 4> c = {
            static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), 0xA55A5AA5u, 0u};
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32)};
        const auto out = philox4x32(c, key);
        return uniform_from_bits(static_cast<std::uint64_t>(out[0]) << 32 | out[1]);
    };
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(); };

    const std::size_t r = model.arity();
    detail::IneqTracker a1_holder("alpha1_holder", model.L1);
    detail::IneqTracker a2_onesided("alpha2_one_sided", model.L1);
    detail::IneqTracker a3_lip("alpha3_sum_lipschitz", model.L1);
    detail::IneqTracker khas("khasminskii", model.Lbar2);
    detail::IneqTracker a2_poly("alpha2_poly_lipschitz", model.L3);
    detail::IneqTracker b_holder("beta_holder", model.L3);
    detail::IneqTracker xi_holder("xi_holder", model.L4);

    std::vector<double> mv(r), nv(r);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double m = draw(box_lo, box_hi);
        const double n = draw(box_lo, box_hi);
        const double dm = std::abs(m - n);

        a1_holder.observe(std::abs(model.alpha1(m) - model.alpha1(n)),
                          (1.0 + std::pow(std::abs(m), model.l1) + std::pow(std::abs(n), model.l1)) *
                              std::pow(dm, model.eta),
                          {m, n});
        a2_onesided.observe((m - n) * (model.alpha2(m) - model.alpha2(n)), dm * dm, {m, n});
        a2_poly.observe(std::abs(model.alpha2(m) - model.alpha2(n)),
                        (1.0 + std::pow(std::abs(m), model.l2) + std::pow(std::abs(n), model.l2)) * dm,
                        {m, n});
        b_holder.observe(std::abs(model.beta(m) - model.beta(n)),
                         (1.0 + std::pow(std::abs(m), model.l3) + std::pow(std::abs(n), model.l3)) *
                             std::pow(dm, model.sigma),
                         {m, n});
        khas.observe(m * (model.alpha1(m) + model.alpha2(m)) +
                         0.5 * (model.p_check - 1.0) * model.beta(m) * model.beta(m),
                     1.0 + m * m, {m});

        for (std::size_t i = 0; i < r; ++i) {
            mv[i] = draw(box_lo, box_hi);
            nv[i] = draw(box_lo, box_hi);
        }
        double sum_abs = 0.0;
        for (std::size_t i = 0; i < r; ++i) sum_abs += std::abs(mv[i] - nv[i]);
        a3_lip.observe(std::abs(model.alpha3(mv) - model.alpha3(nv)), sum_abs, {mv[0], nv[0]});

        if (model.tau() > 0.0) {
            const double t = draw(-model.tau(), 0.0);
            const double u = draw(-model.tau(), 0.0);
            xi_holder.observe(std::abs(model.initial_segment(t) - model.initial_segment(u)),
                              std::pow(std::abs(t - u), model.gamma), {t, u});
        } else {
            xi_holder.observe(0.0, 1.0, {0.0, 0.0});
        }
    }

    AssumptionReport rep;
    for (auto* t : {&a1_holder, &a2_onesided, &a3_lip, &khas, &a2_poly, &b_holder, &xi_holder})
        rep.records.push_back(t->rec);
    return rep;
}

} // namespace temlab
