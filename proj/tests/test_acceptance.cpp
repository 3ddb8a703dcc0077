// Acceptance gate: one TEST_CASE per criterion, each printing a PASS/FAIL
// line. Tolerances are pinned here and nowhere else.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "temlab/extra_models.hpp"
#include "temlab/montecarlo.hpp"
#include "temlab/yamada_watanabe.hpp"

using namespace temlab;
namespace fs = std::filesystem;

namespace {

void verdict(int n, const std::string& what, bool ok) {
    std::printf("[acceptance] criterion %d (%s): %s\n", n, what.c_str(),
                ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", n, ": ", what);
}

unsigned workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 4u : std::min(hc, 8u);
}

TruncationPolicy policy(double L, double ups, double eps = 0.25) {
    TruncationPolicy p;
    p.L = L;
    p.upsilon = ups;
    p.epsilon = eps;
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TEMLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kScratch = "acceptance_scratch";

} // namespace

TEST_CASE("criterion 1: three-delay benchmark rate") {
    // The packaged convergence config: T = 2, deltas 2^-9..2^-12, reference
    // 2^-13, 500 coupled paths, l1 terminal error, h(w) = 8 w^3,
    // Gamma = Delta^{-1/4}. Fitted rate must land in [0.07, 0.20].
    const fs::path out = kScratch / "c1";
    fs::remove_all(out);
    fs::create_directories(out);
    const std::string cfg = std::string(TEMLAB_CONFIG_DIR) + "/vq2_fig1.json";
    const int rc = run_cli("converge --config " + cfg + " --out " + out.string() +
                           " --workers " + std::to_string(workers()));
    REQUIRE(rc == 0);
    const nlohmann::json summary = nlohmann::json::parse(slurp(out / "summary.json"));
    const double p_star = summary.at("fit").at("p_star").get<double>();
    std::printf("[acceptance]   fitted p* = %.6f\n", p_star);
    verdict(1, "fitted rate in [0.07, 0.20]", p_star >= 0.07 && p_star <= 0.20);
}

TEST_CASE("criterion 2: delay-count invariance of the rate") {
    // J in {1, 256, 512}, 200 paths, common seed, truncated reference at
    // 2^-13 with each model's default policy.
    const std::vector<double> deltas = {0x1p-9, 0x1p-10, 0x1p-11, 0x1p-12};
    std::vector<ErrorReport> reps;
    for (int J : {1, 256, 512}) {
        const ModelSpec m = builtin_multi_delay(J);
        reps.push_back(estimate_strong_error(m, default_policy(m), 2.0, deltas, 0x1p-13,
                                             200, 20260824, Metric::l1_terminal,
                                             Scheme::truncated, workers()));
    }
    bool ordered = true;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        for (std::size_t j = 0; j + 1 < reps.size(); ++j) {
            const ErrorPoint& lo = reps[j].points[d];
            const ErrorPoint& hi = reps[j + 1].points[d];
            if (lo.error > hi.error + lo.std_error + hi.std_error) ordered = false;
        }
    }
    verdict(2, "error increases with the delay count, up to one std-error", ordered);

    bool close = true;
    for (std::size_t a = 0; a < reps.size(); ++a) {
        std::printf("[acceptance]   %s p* = %.6f\n", reps[a].model.c_str(),
                    reps[a].fit ? reps[a].fit->p_star : std::nan(""));
        for (std::size_t b = a + 1; b < reps.size(); ++b) {
            REQUIRE(reps[a].fit.has_value());
            REQUIRE(reps[b].fit.has_value());
            if (std::abs(reps[a].fit->p_star - reps[b].fit->p_star) > 0.05) close = false;
        }
    }
    verdict(2, "pairwise fitted rates within 0.05", close);
}

TEST_CASE("criterion 3: exact coupling gives bitwise zero error") {
    const ModelSpec m = builtin_additive();
    const TruncationPolicy p = policy(1.0, 1.0);
    bool all_zero = true;
    for (Metric metric :
         {Metric::l1_terminal, Metric::l2_terminal, Metric::l1_sup, Metric::l2_sup}) {
        const ErrorReport rep = estimate_strong_error(
            m, p, 2.0, {0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8}, 0x1p-11, 64, 17, metric);
        for (const ErrorPoint& pt : rep.points)
            if (pt.error != 0.0 || pt.std_error != 0.0) all_zero = false;
        if (rep.fit.has_value()) all_zero = false;
    }
    verdict(3, "zero-drift unit-noise model couples to error exactly 0", all_zero);
}

TEST_CASE("criterion 4: truncated coefficients never exceed Gamma") {
    std::size_t violations = 0;
    for (const ModelSpec& m :
         {builtin_vq2(), builtin_vix32(2.0, -3.0, 1.0, 1.0), builtin_multi_delay(1)}) {
        const TruncationPolicy p = default_policy(m);
        for (int e = 4; e <= 13; ++e) {
            const double delta = std::ldexp(1.0, -e);
            const double g = gamma_of(p, delta);
            const double r = clamp_radius(p, delta);
            NormalStream s(777, static_cast<std::uint64_t>(e));
            for (std::uint64_t i = 0; i < 100000; ++i) {
                const double w = truncate(40.0 * s(i), r);
                if (std::abs(m.alpha1(w)) > g || std::abs(m.alpha2(w)) > g ||
                    std::abs(m.beta(w)) > g)
                    ++violations;
            }
        }
    }
    std::printf("[acceptance]   cap violations: %zu\n", violations);
    verdict(4, "coefficient cap |a1|,|a2|,|b| <= Gamma, zero violations", violations == 0);
}

TEST_CASE("criterion 5: within-step gap scales at least like sqrt(delta)") {
    const ModelSpec m = builtin_vq2();
    const TruncationPolicy p = policy(1.0, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (int e = 8; e <= 12; ++e) {
        const double d = std::ldexp(1.0, -e);
        pts.emplace_back(d, estimate_step_gap(m, p, d, 2.0, 200, 4242, 2.0));
    }
    const RateFit fit = fit_rate(pts);
    std::printf("[acceptance]   gap slope = %.6f\n", fit.p_star);
    verdict(5, "log-gap regression slope >= 0.45", fit.p_star >= 0.45);
}

TEST_CASE("criterion 6: moment stability against the classical contrast") {
    const ModelSpec m = builtin_vq2();
    const TruncationPolicy p = policy(1.0, 1.0);
    bool stable = true;
    for (int e = 6; e <= 13; ++e) {
        const double d = std::ldexp(1.0, -e);
        const GridSpec g = build_grid(2.0, m.delays, d);
        const MomentEstimate est = estimate_moment(m, p, g, 500, 314159, 2.0);
        for (double v : est.per_time)
            if (!std::isfinite(v)) stable = false;
        if (!(est.max <= 50.0)) stable = false;
        std::printf("[acceptance]   delta=2^-%d max E|chi|^2 = %.4f\n", e, est.max);
    }
    verdict(6, "second moment bounded by 50 on every grid", stable);

    const ModelSpec cubic = builtin_cubic(2.0);
    const GridSpec coarse = build_grid(2.0, cubic.delays, 0x1p-2);
    const double frac = classical_explosion_fraction(cubic, coarse, 500, 314159);
    std::printf("[acceptance]   classical explosion fraction = %.4f\n", frac);
    verdict(6, "classical EM explosion fraction >= 0.99 on the cubic model", frac >= 0.99);
}

TEST_CASE("criterion 7: exit-probability envelope") {
    const ModelSpec m = builtin_vq2();
    const TruncationPolicy p = policy(1.0, 1.0);
    const GridSpec g = build_grid(2.0, m.delays, 0x1p-8);
    std::vector<double> phat;
    for (double K : {4.0, 8.0, 16.0})
        phat.push_back(estimate_exit_probability(m, p, g, 2000, 2718, K));
    std::printf("[acceptance]   p_hat(4)=%.4f p_hat(8)=%.4f p_hat(16)=%.4f\n", phat[0],
                phat[1], phat[2]);
    const bool monotone = phat[0] >= phat[1] && phat[1] >= phat[2];
    verdict(7, "exit probability non-increasing in K", monotone);
    // Bounded-envelope check: K^2 p_hat never exceeds 4x the base level.
    const double base = 16.0 * phat[0];
    const bool envelope = (base > 0.0)
                              ? (64.0 * phat[1] <= 4.0 * base && 256.0 * phat[2] <= 4.0 * base)
                              : (phat[1] == 0.0 && phat[2] == 0.0);
    verdict(7, "K^2 p_hat within a factor 4 of the base threshold", envelope);
}

TEST_CASE("criterion 8: Yamada-Watanabe property suite") {
    double worst = 0.0;
    for (double th : {2.0, 10.0, std::pow(2.0, 1.5)}) {
        for (double ep : {0.1, 0.001}) {
            const YWParams p(th, ep);
            const double mass = detail::integrate(
                [&p](double u) { return yw_psi(p, u); }, p.support_lo(), p.support_hi(),
                1e-13);
            worst = std::max(worst, std::abs(mass - 1.0));
            const std::size_t n = 10000;
            NormalStream s(808, 1);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = 2.0 * s(i);
                const double up = yw_U_prime_abs(p, std::abs(x));
                worst = std::max(worst, std::max(-up, up - 1.0));
                if (x != 0.0) {
                    const double cap = 2.0 / (std::abs(x) * std::log(th));
                    worst = std::max(worst, yw_U_double_prime(p, x) - cap);
                }
                worst = std::max(worst, std::abs(x) - ep - yw_U(p, x));
            }
        }
    }
    std::printf("[acceptance]   worst violation = %.3e\n", worst);
    verdict(8, "psi mass and U bounds hold to 1e-10", worst <= 1e-10);
}

TEST_CASE("criterion 9: worker count never changes the artifact bytes") {
    const std::string cfg = std::string(TEMLAB_CONFIG_DIR) + "/vq2_fig1.json";
    std::vector<std::string> contents;
    for (unsigned w : {1u, 4u, 8u}) {
        const fs::path out = kScratch / ("c9_w" + std::to_string(w));
        fs::remove_all(out);
        fs::create_directories(out);
        const int rc = run_cli("converge --config " + cfg + " --out " + out.string() +
                               " --workers " + std::to_string(w));
        REQUIRE(rc == 0);
        contents.push_back(slurp(out / "errors.csv"));
    }
    verdict(9, "errors.csv identical for --workers 1/4/8",
            contents[0] == contents[1] && contents[0] == contents[2]);
}
