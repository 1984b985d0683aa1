#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfmc/estimators.hpp"
#include "vfmc/version.hpp"

namespace vfmc {

/// Shortest round-trip decimal form; identical for identical doubles, which
/// is what the byte-level reproducibility contract needs.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ArtifactMeta {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string command;

    std::string hash_hex() const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(config_hash));
        return buf;
    }
};

/// Comment header: everything a rerun needs, plus a timestamp line that is
/// explicitly excluded from the byte-identity contract.
inline void write_csv_header(std::ostream& os, const ArtifactMeta& meta) {
    os << "# vfmc " << kVersion << "\n";
    os << "# command=" << meta.command << "\n";
    os << "# config_hash=" << meta.hash_hex() << "\n";
    os << "# seed=" << meta.seed << "\n";
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "# generated=" << buf << "\n";
}

inline void write_structure_csv(std::ostream& os, const ArtifactMeta& meta,
                                const std::vector<StructureFunctionEstimate>& estimates) {
    write_csv_header(os, meta);
    os << "estimator,kind,p,epsilon,mean,stderr,n\n";
    for (const auto& est : estimates) {
        for (const auto& pt : est.grid) {
            os << to_string(est.estimator) << ',' << to_string(est.kind) << ',' << est.p << ','
               << format_double(pt.eps) << ',' << format_double(pt.mean) << ','
               << format_double(pt.std_error) << ',' << pt.n << "\n";
        }
    }
}

inline void write_occupation_csv(std::ostream& os, const ArtifactMeta& meta,
                                 const OccupationReport& report) {
    write_csv_header(os, meta);
    os << "ell,T,p,R0,mean,stderr,n\n";
    for (const auto& row : report.rows) {
        os << format_double(row.ell) << ',' << format_double(row.horizon) << ',' << row.p << ','
           << format_double(row.r0) << ',' << format_double(row.estimate.mean) << ','
           << format_double(row.estimate.std_error) << ',' << row.estimate.n << "\n";
    }
}

inline nlohmann::json meta_json(const ArtifactMeta& meta, const nlohmann::json& config_echo) {
    return nlohmann::json{{"version", kVersion},
                          {"command", meta.command},
                          {"config_hash", meta.hash_hex()},
                          {"seed", meta.seed},
                          {"config", config_echo}};
}

inline nlohmann::json fit_json(int p, const ScalingFit& fit, double zeta_theory) {
    return nlohmann::json{{"p", p},
                          {"zeta_hat", fit.zeta_hat},
                          {"stderr", fit.std_error},
                          {"r2", fit.r_squared},
                          {"fit_range", {fit.fit_min, fit.fit_max}},
                          {"points", fit.points},
                          {"zeta_theory", zeta_theory}};
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

}  // namespace vfmc
