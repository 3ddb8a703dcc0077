#pragma once

// Coupled Monte Carlo experiments: strong-error estimation across a chain
// of step sizes driven by one Brownian path per trajectory, log-log rate
// fits, moment/gap/exit-probability estimators.
//
// Determinism contract: every estimate is a pure function of its arguments.
// The strong-error estimator stores per-path contributions and reduces them
// in path order, so the worker count changes wall time only, never bits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "temlab/brownian.hpp"
#include "temlab/engine.hpp"
#include "temlab/grid.hpp"
#include "temlab/model.hpp"
#include "temlab/truncation.hpp"

namespace temlab {

enum class Metric { l1_terminal, l2_terminal, l1_sup, l2_sup };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::l1_terminal: return "l1_terminal";
        case Metric::l2_terminal: return "l2_terminal";
        case Metric::l1_sup: return "l1_sup";
        case Metric::l2_sup: return "l2_sup";
    }
    return "?";
}

inline Metric metric_from_name(const std::string& s) {
    if (s == "l1_terminal") return Metric::l1_terminal;
    if (s == "l2_terminal") return Metric::l2_terminal;
    if (s == "l1_sup") return Metric::l1_sup;
    if (s == "l2_sup") return Metric::l2_sup;
    throw std::invalid_argument("unknown metric: " + s);
}

struct RateFit {
    double log_c = 0.0;
    double p_star = 0.0;
};

struct ErrorPoint {
    double delta = 0.0;
    double error = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct ErrorReport {
    std::string model;
    Metric metric = Metric::l1_terminal;
    double delta_ref = 0.0;
    Scheme reference_scheme = Scheme::truncated;
    std::vector<ErrorPoint> points;
    std::optional<RateFit> fit; ///< absent when some error estimate is zero
    std::uint64_t master_seed = 0;
};

/// Ordinary least squares of log(error) on log(delta), natural logs.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [d, e] : points) {
        if (!(d > 0.0) || !(e > 0.0))
            throw std::invalid_argument(
                "fit_rate: non-positive error estimate; increase the number of paths");
        const double x = std::log(d), y = std::log(e);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    RateFit f;
    f.p_star = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.log_c = (sy - f.p_star * sx) / n;
    return f;
}

namespace detail {

template <typename Fn>
void for_each_path(std::size_t n_paths, unsigned workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_paths; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n_paths; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Strong error of the truncated scheme against a fine-step reference on the
/// same Brownian path. For each path the fine increments are drawn once at
/// delta_ref and block-summed for every coarser delta.
inline ErrorReport estimate_strong_error(const ModelSpec& model, const TruncationPolicy& policy,
                                         double T, std::vector<double> deltas, double delta_ref,
                                         std::size_t n_paths, std::uint64_t seed, Metric metric,
                                         Scheme reference_scheme = Scheme::truncated,
                                         unsigned workers = 1) {
    if (n_paths < 2) throw std::invalid_argument("estimate_strong_error: need n_paths >= 2");
    if (deltas.empty()) throw std::invalid_argument("estimate_strong_error: empty delta list");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());
    if (!(delta_ref < deltas.back()))
        throw std::invalid_argument("estimate_strong_error: delta_ref must be below every delta");

    const GridSpec ref_grid = build_grid(T, model.delays, delta_ref);
    std::vector<GridSpec> grids;
    std::vector<std::size_t> factors;
    for (double d : deltas) {
        grids.push_back(build_grid(T, model.delays, d));
        const double q = d / delta_ref;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-12 * q)
            throw std::invalid_argument("estimate_strong_error: delta_ref must divide every delta");
        factors.push_back(static_cast<std::size_t>(r));
    }

    const BrownianDriver driver(seed, delta_ref, static_cast<std::size_t>(ref_grid.M_T));

    // Per path and per delta: |diff at T| and sup over the coarse grid.
    struct PathStat { double abs_T, sup; };
    std::vector<std::vector<PathStat>> stats(deltas.size(),
                                             std::vector<PathStat>(n_paths));

    detail::for_each_path(n_paths, workers, [&](std::size_t i) {
        const std::vector<double> fine = driver.fine_increments(i);
        const DiscretePath ref =
            (reference_scheme == Scheme::truncated)
                ? simulate_truncated(model, policy, ref_grid, fine)
                : simulate_classical(model, ref_grid, fine);
        if (ref.exploded)
            throw SimulationFault(ref.explosion_step);
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            const std::vector<double> inc = coarsen(fine, factors[di]);
            const DiscretePath path = simulate_truncated(model, policy, grids[di], inc);
            double sup = 0.0;
            for (std::int64_t k = 0; k <= grids[di].M_T; ++k) {
                const double d = std::abs(ref.at(k * static_cast<std::int64_t>(factors[di])) - path.at(k));
                sup = std::max(sup, d);
            }
            stats[di][i] = {std::abs(ref.at(ref_grid.M_T) - path.at(grids[di].M_T)), sup};
        }
    });

    ErrorReport rep;
    rep.model = model.name;
    rep.metric = metric;
    rep.delta_ref = delta_ref;
    rep.reference_scheme = reference_scheme;
    rep.master_seed = seed;

    const bool squared = (metric == Metric::l2_terminal || metric == Metric::l2_sup);
    const bool sup_metric = (metric == Metric::l1_sup || metric == Metric::l2_sup);
    bool all_positive = true;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        // Path-order reduction: bitwise independent of the worker count.
        double mean = 0.0, m2 = 0.0;
        std::size_t n = 0;
        for (const PathStat& s : stats[di]) {
            double x = sup_metric ? s.sup : s.abs_T;
            if (squared) x *= x;
            ++n;
            const double delta_mean = x - mean;
            mean += delta_mean / static_cast<double>(n);
            m2 += delta_mean * (x - mean);
        }
        const double var = m2 / static_cast<double>(n - 1);
        const double se_mean = std::sqrt(var / static_cast<double>(n));
        ErrorPoint pt;
        pt.delta = deltas[di];
        pt.n_paths = n_paths;
        if (squared) {
            pt.error = std::sqrt(mean);
            pt.std_error = (pt.error > 0.0) ? se_mean / (2.0 * pt.error) : 0.0;
        } else {
            pt.error = mean;
            pt.std_error = se_mean;
        }
        if (!(pt.error > 0.0)) all_positive = false;
        rep.points.push_back(pt);
    }

    if (all_positive) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : rep.points) pts.emplace_back(p.delta, p.error);
        rep.fit = fit_rate(pts);
    }
    return rep;
}

struct MomentEstimate {
    std::vector<double> per_time; ///< sample mean of |chi(t_k)|^p, k = 0..M_T
    double max = 0.0;
};

/// Sample p-th absolute moment of the truncated scheme per grid time.
inline MomentEstimate estimate_moment(const ModelSpec& model, const TruncationPolicy& policy,
                                      const GridSpec& grid, std::size_t n_paths,
                                      std::uint64_t seed, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("estimate_moment: p must be >= 1");
    const BrownianDriver driver(seed, grid.delta, static_cast<std::size_t>(grid.M_T));
    MomentEstimate est;
    est.per_time.assign(static_cast<std::size_t>(grid.M_T) + 1, 0.0);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const DiscretePath path = simulate_truncated(model, policy, grid, driver.fine_increments(i));
        for (std::int64_t k = 0; k <= grid.M_T; ++k)
            est.per_time[static_cast<std::size_t>(k)] += std::pow(std::abs(path.at(k)), p);
    }
    for (double& v : est.per_time) {
        v /= static_cast<double>(n_paths);
        est.max = std::max(est.max, v);
    }
    return est;
}

/// Fraction of classical EM paths that explode before T.
inline double classical_explosion_fraction(const ModelSpec& model, const GridSpec& grid,
                                           std::size_t n_paths, std::uint64_t seed) {
    const BrownianDriver driver(seed, grid.delta, static_cast<std::size_t>(grid.M_T));
    std::size_t exploded = 0;
    for (std::size_t i = 0; i < n_paths; ++i)
        if (simulate_classical(model, grid, driver.fine_increments(i)).exploded) ++exploded;
    return static_cast<double>(exploded) / static_cast<double>(n_paths);
}

/// Max over step midpoints of the p-th mean gap between the within-step
/// continuous update and the step process. The half-step Brownian increment
/// comes from the same stream sampled at delta/2, whose pair sums are the
/// scheme increments.
inline double estimate_step_gap(const ModelSpec& model, const TruncationPolicy& policy,
                                double delta, double T, std::size_t n_paths,
                                std::uint64_t seed, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("estimate_step_gap: p must be >= 1");
    const GridSpec grid = build_grid(T, model.delays, delta);
    const BrownianDriver driver(seed, delta / 2.0, static_cast<std::size_t>(2 * grid.M_T));
    const double radius = clamp_radius(policy, delta);
    std::vector<double> acc(static_cast<std::size_t>(grid.M_T), 0.0);
    std::vector<double> args(model.arity());
    for (std::size_t i = 0; i < n_paths; ++i) {
        const std::vector<double> half = driver.fine_increments(i);
        const DiscretePath path = simulate_truncated(model, policy, grid, coarsen(half, 2));
        for (std::int64_t k = 0; k < grid.M_T; ++k) {
            for (std::size_t j = 0; j < model.arity(); ++j)
                args[j] = path.at(k - grid.offsets[j]);
            const double w = truncate(path.at(k), radius);
            const double drift = model.alpha1(w) + model.alpha2(w) + model.alpha3(args);
            const double gap = drift * (delta / 2.0) +
                               model.beta(w) * half[static_cast<std::size_t>(2 * k)];
            acc[static_cast<std::size_t>(k)] += std::pow(std::abs(gap), p);
        }
    }
    double worst = 0.0;
    for (double v : acc) worst = std::max(worst, v / static_cast<double>(n_paths));
    return worst;
}

/// Fraction of paths whose max |chi(t_k)| over the forward grid reaches K.
inline double estimate_exit_probability(const ModelSpec& model, const TruncationPolicy& policy,
                                        const GridSpec& grid, std::size_t n_paths,
                                        std::uint64_t seed, double K) {
    double xi_sup = 0.0;
    for (std::int64_t k = -grid.M; k <= 0; ++k)
        xi_sup = std::max(xi_sup, std::abs(model.initial_segment(grid.time_at(k))));
    if (!(K > xi_sup))
        throw std::invalid_argument("estimate_exit_probability: K must exceed sup|xi|");
    const BrownianDriver driver(seed, grid.delta, static_cast<std::size_t>(grid.M_T));
    std::size_t exits = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const DiscretePath path = simulate_truncated(model, policy, grid, driver.fine_increments(i));
        for (std::int64_t k = 0; k <= grid.M_T; ++k) {
            if (std::abs(path.at(k)) >= K) {
                ++exits;
                break;
            }
        }
    }
    return static_cast<double>(exits) / static_cast<double>(n_paths);
}

} // namespace temlab
