// temlab CLI: runs one experiment per invocation from a JSON config and
// writes CSV/JSON artifacts carrying a reproducibility manifest.
//
// Exit codes: 0 ok, 2 config error, 3 simulation fault, 4 validation failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "temlab/engine.hpp"
#include "temlab/extra_models.hpp"
#include "temlab/grid.hpp"
#include "temlab/model.hpp"
#include "temlab/montecarlo.hpp"
#include "temlab/report_io.hpp"
#include "temlab/truncation.hpp"
#include "temlab/yamada_watanabe.hpp"

namespace {

using nlohmann::json;

// Unknown keys are config errors: a silent typo in epsilon or seed would
// corrupt a reproduction.
void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw std::invalid_argument(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
    }
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return json::parse(in);
}

temlab::ModelSpec parse_model_obj(const json& m) {
    require_keys(m, "model", {"name", "c4", "c5", "lambda_star", "k", "v0", "xi0"});
    const std::string name = m.at("name").get<std::string>();
    if (name == "cubic") return temlab::builtin_cubic(m.value("xi0", 2.0));
    if (name == "additive") return temlab::builtin_additive();
    temlab::ModelSpec spec = temlab::model_by_name(
        name, m.value("c4", 0.0), m.value("c5", 0.0), m.value("lambda_star", 0.0),
        m.value("k", 1.0), m.value("v0", 1.0));
    spec.validate();
    return spec;
}

temlab::ModelSpec parse_model(const json& cfg) { return parse_model_obj(cfg.at("model")); }

temlab::TruncationPolicy parse_policy(const json& cfg, const temlab::ModelSpec& model) {
    temlab::TruncationPolicy p = temlab::default_policy(model);
    if (cfg.contains("policy")) {
        const json& j = cfg.at("policy");
        require_keys(j, "policy", {"L", "upsilon", "epsilon", "L0"});
        p.L = j.value("L", p.L);
        p.upsilon = j.value("upsilon", p.upsilon);
        p.epsilon = j.value("epsilon", p.epsilon);
        p.L0 = j.value("L0", p.L0);
    }
    p.validate();
    return p;
}

std::ofstream open_artifact(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
    open_artifact(path) << j.dump(2) << "\n";
}

int cmd_converge(const json& cfg, unsigned workers, const std::filesystem::path& out) {
    require_keys(cfg, "config",
                 {"model", "models", "policy", "T", "deltas", "delta_ref", "n_paths",
                  "seed", "metric", "reference_scheme"});
    if (cfg.contains("model") == cfg.contains("models"))
        throw std::invalid_argument("converge needs exactly one of 'model' or 'models'");
    std::vector<temlab::ModelSpec> models;
    if (cfg.contains("models"))
        for (const json& m : cfg.at("models")) models.push_back(parse_model_obj(m));
    else
        models.push_back(parse_model(cfg));
    const double T = cfg.at("T").get<double>();
    const std::vector<double> deltas = cfg.at("deltas").get<std::vector<double>>();
    const double delta_ref = cfg.at("delta_ref").get<double>();
    const std::size_t n_paths = cfg.at("n_paths").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const temlab::Metric metric = temlab::metric_from_name(cfg.at("metric").get<std::string>());
    temlab::Scheme ref_scheme = temlab::Scheme::truncated;
    if (cfg.contains("reference_scheme")) {
        const std::string s = cfg.at("reference_scheme").get<std::string>();
        if (s == "classical") ref_scheme = temlab::Scheme::classical;
        else if (s != "truncated")
            throw std::invalid_argument("reference_scheme must be truncated or classical");
    }

    const json manifest = temlab::make_manifest(seed, delta_ref, cfg);
    const bool multi = models.size() > 1;
    json runs = json::array();
    for (const temlab::ModelSpec& model : models) {
        const temlab::TruncationPolicy policy = parse_policy(cfg, model);
        const temlab::ErrorReport rep = temlab::estimate_strong_error(
            model, policy, T, deltas, delta_ref, n_paths, seed, metric, ref_scheme, workers);

        const std::string csv_name = multi ? "errors_" + model.name + ".csv" : "errors.csv";
        temlab::write_errors_csv((out / csv_name).string(), rep, manifest);

        json run = temlab::report_to_json(rep);
        json hyp = json::array();
        for (const auto& p : rep.points)
            hyp.push_back(
                {{"delta", p.delta},
                 {"rate_hypothesis_holds", temlab::rate_hypothesis_holds(policy, p.delta)}});
        run["rate_hypothesis"] = hyp;
        runs.push_back(run);

        std::cout << "model " << rep.model << ", metric " << temlab::metric_name(metric) << "\n";
        for (const auto& p : rep.points)
            std::cout << "  delta=" << temlab::format_double(p.delta)
                      << " error=" << temlab::format_double(p.error)
                      << " stderr=" << temlab::format_double(p.std_error)
                      << " rate_hypothesis="
                      << (temlab::rate_hypothesis_holds(policy, p.delta) ? "holds" : "fails")
                      << "\n";
        if (rep.fit)
            std::cout << "  fit: p*=" << temlab::format_double(rep.fit->p_star)
                      << " logC=" << temlab::format_double(rep.fit->log_c) << "\n";
        else
            std::cout << "  fit: skipped (zero error estimate)\n";
    }

    json summary = multi ? json{{"runs", runs}} : runs[0];
    summary["manifest"] = manifest;
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_simulate(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config",
                 {"model", "policy", "T", "delta", "n_paths", "seed", "scheme"});
    const temlab::ModelSpec model = parse_model(cfg);
    const temlab::TruncationPolicy policy = parse_policy(cfg, model);
    const double T = cfg.at("T").get<double>();
    const double delta = cfg.at("delta").get<double>();
    const std::size_t n_paths = cfg.at("n_paths").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const std::string scheme = cfg.value("scheme", std::string("truncated"));
    if (scheme != "truncated" && scheme != "classical")
        throw std::invalid_argument("scheme must be truncated or classical");

    const temlab::GridSpec grid = temlab::build_grid(T, model.delays, delta);
    const temlab::BrownianDriver driver(seed, delta, static_cast<std::size_t>(grid.M_T));

    auto csv = open_artifact(out / "paths.csv");
    csv << "# manifest " << temlab::make_manifest(seed, delta, cfg).dump() << "\n";
    csv << "path,k,t,value,exploded\n";
    for (std::size_t i = 0; i < n_paths; ++i) {
        const std::vector<double> inc = driver.fine_increments(i);
        const temlab::DiscretePath path =
            (scheme == "truncated") ? temlab::simulate_truncated(model, policy, grid, inc)
                                    : temlab::simulate_classical(model, grid, inc);
        for (std::int64_t k = 0; k <= grid.M_T; ++k)
            csv << i << ',' << k << ',' << temlab::format_double(grid.time_at(k)) << ','
                << temlab::format_double(path.at(k)) << ',' << (path.exploded ? 1 : 0) << "\n";
    }
    std::cout << "wrote " << n_paths << " paths, " << (grid.M_T + 1) << " rows each\n";
    return 0;
}

int cmd_validate(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config", {"model", "box", "n_samples", "seed"});
    const temlab::ModelSpec model = parse_model(cfg);
    const std::vector<double> box = cfg.at("box").get<std::vector<double>>();
    if (box.size() != 2)
        throw std::invalid_argument("box must be [lo, hi]");
    const std::size_t n_samples = cfg.at("n_samples").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

    const temlab::AssumptionReport rep =
        temlab::check_assumptions(model, box[0], box[1], n_samples, seed);

    json records = json::array();
    for (const auto& r : rep.records) {
        records.push_back({{"name", r.name},
                           {"max_violation", r.max_violation},
                           {"fitted_constant", r.fitted_constant},
                           {"witness", r.witness},
                           {"n_samples", r.n_samples}});
        std::cout << "  " << r.name << ": max_violation="
                  << temlab::format_double(r.max_violation)
                  << " fitted_constant=" << temlab::format_double(r.fitted_constant) << "\n";
    }
    write_json(out / "validation.json",
               {{"model", model.name},
                {"records", records},
                {"manifest", temlab::make_manifest(seed, 0.0, cfg)}});
    if (rep.max_violation() > 1e-9) {
        std::cerr << "assumption violation exceeds 1e-9\n";
        return 4;
    }
    return 0;
}

int cmd_moments(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config", {"model", "policy", "T", "delta", "n_paths", "seed", "p"});
    const temlab::ModelSpec model = parse_model(cfg);
    const temlab::TruncationPolicy policy = parse_policy(cfg, model);
    const double T = cfg.at("T").get<double>();
    const double delta = cfg.at("delta").get<double>();
    const std::size_t n_paths = cfg.at("n_paths").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const double p = cfg.at("p").get<double>();

    const temlab::GridSpec grid = temlab::build_grid(T, model.delays, delta);
    const temlab::MomentEstimate est =
        temlab::estimate_moment(model, policy, grid, n_paths, seed, p);

    const json manifest = temlab::make_manifest(seed, delta, cfg);
    auto csv = open_artifact(out / "moments.csv");
    csv << "# manifest " << manifest.dump() << "\n";
    csv << "k,t,moment\n";
    for (std::size_t k = 0; k < est.per_time.size(); ++k)
        csv << k << ',' << temlab::format_double(grid.time_at(static_cast<std::int64_t>(k)))
            << ',' << temlab::format_double(est.per_time[k]) << "\n";
    write_json(out / "moments.json",
               {{"model", model.name}, {"p", p}, {"max", est.max}, {"manifest", manifest}});
    std::cout << "max sample moment: " << temlab::format_double(est.max) << "\n";
    return 0;
}

int cmd_gap(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config", {"model", "policy", "T", "deltas", "n_paths", "seed", "p"});
    const temlab::ModelSpec model = parse_model(cfg);
    const temlab::TruncationPolicy policy = parse_policy(cfg, model);
    const double T = cfg.at("T").get<double>();
    const std::vector<double> deltas = cfg.at("deltas").get<std::vector<double>>();
    const std::size_t n_paths = cfg.at("n_paths").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const double p = cfg.at("p").get<double>();
    if (deltas.empty()) throw std::invalid_argument("deltas must be non-empty");

    const json manifest = temlab::make_manifest(seed, deltas.back() / 2.0, cfg);
    auto csv = open_artifact(out / "gap.csv");
    csv << "# manifest " << manifest.dump() << "\n";
    csv << "delta,gap\n";
    std::vector<std::pair<double, double>> pts;
    for (double d : deltas) {
        const double g = temlab::estimate_step_gap(model, policy, d, T, n_paths, seed, p);
        csv << temlab::format_double(d) << ',' << temlab::format_double(g) << "\n";
        pts.emplace_back(d, g);
        std::cout << "  delta=" << temlab::format_double(d)
                  << " gap=" << temlab::format_double(g) << "\n";
    }
    json summary = {{"model", model.name}, {"p", p}, {"manifest", manifest}};
    if (pts.size() >= 2) {
        const temlab::RateFit fit = temlab::fit_rate(pts);
        summary["fit"] = {{"log_c", fit.log_c}, {"p_star", fit.p_star}};
        std::cout << "  slope: " << temlab::format_double(fit.p_star) << "\n";
    }
    write_json(out / "gap.json", summary);
    return 0;
}

int cmd_exit_prob(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config",
                 {"model", "policy", "T", "delta", "n_paths", "seed", "thresholds"});
    const temlab::ModelSpec model = parse_model(cfg);
    const temlab::TruncationPolicy policy = parse_policy(cfg, model);
    const double T = cfg.at("T").get<double>();
    const double delta = cfg.at("delta").get<double>();
    const std::size_t n_paths = cfg.at("n_paths").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const std::vector<double> thresholds = cfg.at("thresholds").get<std::vector<double>>();

    const temlab::GridSpec grid = temlab::build_grid(T, model.delays, delta);
    json points = json::array();
    for (double K : thresholds) {
        const double ph = temlab::estimate_exit_probability(model, policy, grid, n_paths, seed, K);
        points.push_back({{"K", K}, {"p_hat", ph}, {"K2_p_hat", K * K * ph}});
        std::cout << "  K=" << temlab::format_double(K)
                  << " p_hat=" << temlab::format_double(ph)
                  << " K^2*p_hat=" << temlab::format_double(K * K * ph) << "\n";
    }
    write_json(out / "exit.json",
               {{"model", model.name},
                {"points", points},
                {"manifest", temlab::make_manifest(seed, delta, cfg)}});
    return 0;
}

int cmd_yw_check(const json& cfg, unsigned, const std::filesystem::path& out) {
    require_keys(cfg, "config", {"thetas", "epsilons", "n_samples"});
    const std::vector<double> thetas = cfg.at("thetas").get<std::vector<double>>();
    const std::vector<double> epsilons = cfg.at("epsilons").get<std::vector<double>>();
    const std::size_t n = cfg.value("n_samples", std::size_t{10000});
    if (thetas.empty() || epsilons.empty() || n < 2)
        throw std::invalid_argument("yw-check needs thetas, epsilons, n_samples >= 2");

    json grid = json::array();
    double worst = 0.0;
    for (double th : thetas) {
        for (double ep : epsilons) {
            const temlab::YWParams p(th, ep);
            const double mass = temlab::detail::integrate(
                [&p](double u) { return temlab::yw_psi(p, u); }, p.support_lo(), p.support_hi(),
                1e-13);
            const double mass_err = std::abs(mass - 1.0);
            // Half the samples sweep [-2, 2] uniformly, half sweep the
            // support band geometrically where the bounds are tight.
            double v_uprime = 0.0, v_usecond = 0.0, v_abs = 0.0;
            auto probe = [&](double x) {
                const double up = temlab::yw_U_prime_abs(p, std::abs(x));
                v_uprime = std::max(v_uprime, std::max(-up, up - 1.0));
                const double cap = 2.0 / (std::abs(x) * std::log(th));
                v_usecond = std::max(v_usecond, temlab::yw_U_double_prime(p, x) - cap);
                v_abs = std::max(v_abs, std::abs(x) - ep - temlab::yw_U(p, x));
            };
            const std::size_t half = n / 2;
            for (std::size_t i = 0; i < half; ++i)
                probe(-2.0 + 4.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(half));
            const double lo = 0.5 * p.support_lo(), hi = 2.0 * p.support_hi();
            for (std::size_t i = 0; i < n - half; ++i) {
                const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(n - half);
                probe(lo * std::pow(hi / lo, s));
            }
            const double vmax = std::max({mass_err, v_uprime, v_usecond, v_abs});
            worst = std::max(worst, vmax);
            grid.push_back({{"theta", th},
                            {"eps", ep},
                            {"integral_error", mass_err},
                            {"u_prime_violation", v_uprime},
                            {"u_second_violation", v_usecond},
                            {"abs_bound_violation", v_abs}});
            std::cout << "  theta=" << temlab::format_double(th)
                      << " eps=" << temlab::format_double(ep)
                      << " max_violation=" << temlab::format_double(vmax) << "\n";
        }
    }
    write_json(out / "yw.json",
               {{"grid", grid}, {"manifest", temlab::make_manifest(0, 0.0, cfg)}});
    if (worst > 1e-10) {
        std::cerr << "Yamada-Watanabe property violation exceeds 1e-10\n";
        return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"temlab: truncated Euler-Maruyama lab for multiple-delay SDEs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    unsigned workers = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "artifact output directory");
    app.add_option("--workers", workers, "worker threads (never changes outputs)")
        ->check(CLI::Range(1u, 256u));

    int (*run)(const json&, unsigned, const std::filesystem::path&) = nullptr;
    auto add = [&](const char* name, const char* desc,
                   int (*fn)(const json&, unsigned, const std::filesystem::path&)) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough(); // --config etc. may follow the subcommand
        sub->callback([&run, fn] { run = fn; });
    };
    add("converge", "coupled strong-error estimate and rate fit", cmd_converge);
    add("simulate", "write raw paths at one step size", cmd_simulate);
    add("moments", "sample p-th moment per grid time", cmd_moments);
    add("gap", "within-step gap of the step process", cmd_gap);
    add("exit-prob", "exit probability over thresholds", cmd_exit_prob);
    add("validate", "sampling check of model assumptions", cmd_validate);
    add("yw-check", "Yamada-Watanabe smoothing properties", cmd_yw_check);

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path);
        const std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);
        return run(cfg, workers, out);
    } catch (const temlab::SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
