#pragma once

// Artifact serialization: CSV tables (header row, '.' decimal, ','
// delimiter, shortest round-trip floats) and JSON summaries, each carrying
// a run manifest (seed, generator, config hash, artifact version).

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "temlab/brownian.hpp"
#include "temlab/montecarlo.hpp"

namespace temlab {

inline constexpr const char* kArtifactVersion = "1";

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// FNV-1a over a canonical config dump.
inline std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::json make_manifest(std::uint64_t seed, double delta_fine,
                                    const nlohmann::json& config) {
    return {{"seed", seed},
            {"generator", kGeneratorName},
            {"delta_fine", delta_fine},
            {"config_hash", config_hash(config)},
            {"artifact_version", kArtifactVersion}};
}

/// errors.csv: one manifest comment line, then header + rows.
inline void write_errors_csv(const std::string& path, const ErrorReport& rep,
                             const nlohmann::json& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "# manifest " << manifest.dump() << "\n";
    out << "delta,error,stderr,n_paths\n";
    for (const auto& p : rep.points)
        out << format_double(p.delta) << ',' << format_double(p.error) << ','
            << format_double(p.std_error) << ',' << p.n_paths << "\n";
}

inline nlohmann::json report_to_json(const ErrorReport& rep) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : rep.points)
        points.push_back({{"delta", p.delta},
                          {"error", p.error},
                          {"stderr", p.std_error},
                          {"n_paths", p.n_paths}});
    nlohmann::json j = {{"model", rep.model},
                        {"metric", metric_name(rep.metric)},
                        {"delta_ref", rep.delta_ref},
                        {"reference_scheme",
                         rep.reference_scheme == Scheme::truncated ? "truncated" : "classical"},
                        {"seed", rep.master_seed},
                        {"points", points}};
    if (rep.fit)
        j["fit"] = {{"log_c", rep.fit->log_c}, {"p_star", rep.fit->p_star}};
    else
        j["fit"] = nullptr;
    return j;
}

} // namespace temlab
