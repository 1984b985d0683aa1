#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfmc/ensemble.hpp"
#include "vfmc/errors.hpp"
#include "vfmc/estimators.hpp"
#include "vfmc/gamma.hpp"
#include "vfmc/mollifier.hpp"

namespace vfmc {

using nlohmann::json;

inline json default_config() {
    return json{
        {"gamma", {{"preset", "k41"}, {"l_max", 1.0}, {"eta", 0.01}}},
        {"mollifier", {{"kind", "indicator"}, {"table", json::array()}}},
        {"window", {{"eta", 0.1}, {"R", "auto"}, {"max_expected_count", 1e6}}},
        {"mc",
         {{"seed", 20260809},
          {"budget", 200000},
          {"realizations", 20000},
          {"nu_budget", 200000},
          {"batches", 16},
          {"workers", 1},
          {"dt_resolution_scale", 8.0},
          {"dt_min", 1e-6},
          {"r0_margin", 4.0}}},
        {"probes",
         {{"x", {0.0, 0.0, 0.0}},
          {"e", {1.0, 0.0, 0.0}},
          {"eps_min", 0.02},
          {"eps_max", 0.3},
          {"eps_points", 8},
          {"p_list", {2}},
          {"kind", "longitudinal"}}},
        {"fit", {{"eps_min", "auto"}, {"eps_max", "auto"}}},
        {"estimator", "single_filament"},
        {"occupation",
         {{"pairs", {{0.1, 0.5}, {0.05, 0.25}}},
          {"ell_scan", {{"T", 0.5}, {"ell", {0.03, 0.0655, 0.1405, 0.3}}}},
          {"t_scan", {{"ell", 0.2}, {"T", {0.001, 0.002, 0.004, 0.008}}}},
          {"p_list", {2, 4}},
          {"budget", 150000},
          {"pair_budget", 1000000},
          {"R0", "auto"}}},
        {"phi", {{"x", {0.0, 0.0, 0.0}}, {"component", 0}, {"clip", 10.0}, {"absolute", false},
                 {"p_max", 4}}},
        {"symmetry", {{"x_shift", {0.3, 0.2, 0.1}}, {"rotation_angle", 1.2}}},
        {"output", {{"dir", "out"}}},
    };
}

namespace detail {

inline void deep_merge(json& base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            deep_merge(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

inline Vec3 vec3_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError(std::string(what) + ": expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// Validated experiment configuration: defaults, overlaid by an optional
/// JSON file, overlaid by dotted-path --set overrides. Every artifact echoes
/// the merged document plus its hash so runs are reproducible from the
/// output alone.
class ExperimentConfig {
  public:
    ExperimentConfig() : doc_(default_config()) {}

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        json overlay;
        try {
            in >> overlay;
        } catch (const json::exception& e) {
            throw ConfigError("config parse error in " + path + ": " + e.what());
        }
        ExperimentConfig cfg;
        detail::deep_merge(cfg.doc_, overlay);
        return cfg;
    }

    /// Apply a "dotted.path=value" override; the value is parsed as JSON when
    /// possible and kept as a string otherwise.
    void apply_override(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override must look like key.path=value: " + assignment);
        }
        const std::string path = assignment.substr(0, eq);
        const std::string raw = assignment.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            value = raw;
        }
        json* node = &doc_;
        std::stringstream ss(path);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        if (parts.empty()) throw ConfigError("empty override path");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
        (*node)[parts.back()] = value;
    }

    void set_seed(std::uint64_t seed) { doc_["mc"]["seed"] = seed; }
    void set_workers(int workers) { doc_["mc"]["workers"] = workers; }
    void set_output_dir(const std::string& dir) { doc_["output"]["dir"] = dir; }

    const json& raw() const { return doc_; }

    /// FNV-1a 64 over the canonical dump (nlohmann emits sorted keys).
    std::uint64_t hash() const {
        const std::string s = doc_.dump();
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    MultifractalMeasure gamma() const {
        const json& g = doc_.at("gamma");
        const double l_max = g.value("l_max", 1.0);
        if (g.contains("atoms") && !g["atoms"].empty()) {
            std::vector<MultifractalAtom> atoms;
            for (const auto& a : g["atoms"]) {
                atoms.push_back({a.at("h").get<double>(), a.at("weight").get<double>(),
                                 a.at("a").get<double>(), a.at("b").get<double>()});
            }
            return MultifractalMeasure(std::move(atoms), l_max);
        }
        const std::string preset = g.value("preset", "k41");
        if (preset == "k41") return MultifractalMeasure({{1.0 / 3.0, 1.0, 2.0, 4.0}}, l_max);
        if (preset == "k41_thin") return MultifractalMeasure({{1.0 / 3.0, 1.0, 0.0, 2.0}}, l_max);
        throw ConfigError("unknown gamma.preset: " + preset);
    }

    double gamma_eta() const { return doc_.at("gamma").at("eta").get<double>(); }

    MollifierSpec mollifier() const {
        const json& m = doc_.at("mollifier");
        const std::string kind = m.value("kind", "indicator");
        if (kind == "indicator") return MollifierSpec::indicator();
        if (kind == "zero_charge_quadratic") return MollifierSpec::zero_charge_quadratic();
        if (kind == "tabulated") {
            std::vector<std::pair<double, double>> table;
            for (const auto& row : m.at("table")) {
                if (!row.is_array() || row.size() != 2) {
                    throw ConfigError("mollifier.table rows must be [r, rho] pairs");
                }
                table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            return MollifierSpec::tabulated(std::move(table));
        }
        throw ConfigError("unknown mollifier.kind: " + kind);
    }

    McOptions mc_options() const {
        const json& m = doc_.at("mc");
        McOptions mc;
        mc.seed = m.at("seed").get<std::uint64_t>();
        mc.batches = m.at("batches").get<int>();
        mc.workers = m.at("workers").get<int>();
        mc.step.resolution_scale = m.at("dt_resolution_scale").get<double>();
        mc.step.dt_min = m.at("dt_min").get<double>();
        mc.r0_margin = m.at("r0_margin").get<double>();
        if (mc.batches < 2) throw ConfigError("mc.batches must be >= 2");
        if (mc.workers < 0) throw ConfigError("mc.workers must be >= 0");
        if (mc.workers == 0) mc.workers = resolve_workers(0);
        if (!(mc.step.resolution_scale >= 1.0)) {
            throw ConfigError("mc.dt_resolution_scale must be >= 1");
        }
        if (!(mc.step.dt_min > 0.0)) throw ConfigError("mc.dt_min must be positive");
        if (!(mc.r0_margin >= 1.0)) throw ConfigError("mc.r0_margin must be >= 1");
        return mc;
    }

    std::int64_t budget() const { return doc_.at("mc").at("budget").get<std::int64_t>(); }
    std::int64_t realizations() const {
        return doc_.at("mc").at("realizations").get<std::int64_t>();
    }
    std::int64_t nu_budget() const { return doc_.at("mc").at("nu_budget").get<std::int64_t>(); }

    ProbeSpec probe_spec() const {
        const json& p = doc_.at("probes");
        ProbeSpec probe;
        probe.x = detail::vec3_from(p.at("x"), "probes.x");
        probe.e = detail::vec3_from(p.at("e"), "probes.e");
        const double n = norm(probe.e);
        if (n == 0.0) throw ConfigError("probes.e must be nonzero");
        probe.e = probe.e / n;
        if (p.contains("eps_grid") && p["eps_grid"].is_array() && !p["eps_grid"].empty()) {
            for (const auto& v : p["eps_grid"]) probe.eps_grid.push_back(v.get<double>());
        } else {
            const double lo = p.at("eps_min").get<double>();
            const double hi = p.at("eps_max").get<double>();
            const int pts = p.at("eps_points").get<int>();
            if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("probes: need 0 < eps_min < eps_max");
            if (pts < 2) throw ConfigError("probes.eps_points must be >= 2");
            for (int i = 0; i < pts; ++i) {
                probe.eps_grid.push_back(
                    lo * std::pow(hi / lo, static_cast<double>(i) / (pts - 1)));
            }
        }
        for (double eps : probe.eps_grid) {
            if (!(eps > 0.0)) throw ConfigError("probes: eps values must be positive");
        }
        return probe;
    }

    std::vector<int> p_list() const {
        std::vector<int> out;
        for (const auto& v : doc_.at("probes").at("p_list")) out.push_back(v.get<int>());
        if (out.empty()) throw ConfigError("probes.p_list must not be empty");
        return out;
    }

    IncrementKind increment_kind() const {
        const std::string k = doc_.at("probes").at("kind").get<std::string>();
        if (k == "longitudinal") return IncrementKind::longitudinal;
        if (k == "nondirectional") return IncrementKind::nondirectional;
        throw ConfigError("probes.kind must be longitudinal or nondirectional");
    }

    LocalizationWindow window(const MultifractalMeasure& gamma, const ProbeSpec& probe) const {
        const json& w = doc_.at("window");
        LocalizationWindow win;
        win.eta = w.at("eta").get<double>();
        win.max_expected_count = w.at("max_expected_count").get<double>();
        const json& radius = w.at("R");
        if (radius.is_string() && radius.get<std::string>() == "auto") {
            win.radius = auto_window_radius(gamma, probe, mc_options().r0_margin);
        } else {
            win.radius = radius.get<double>();
        }
        win.validate();
        return win;
    }

    /// Default fit range: drop eps <= 2 eta (cutoff contamination) and
    /// eps >= l_max/2 (outer scale), then keep the central decade.
    std::pair<double, double> fit_range(const ProbeSpec& probe, double eta, double l_max) const {
        const json& f = doc_.at("fit");
        double lo = 0.0, hi = 0.0;
        const bool auto_lo = f.at("eps_min").is_string();
        const bool auto_hi = f.at("eps_max").is_string();
        if (!auto_lo) lo = f.at("eps_min").get<double>();
        if (!auto_hi) hi = f.at("eps_max").get<double>();
        if (auto_lo || auto_hi) {
            double glo = probe.eps_grid.front(), ghi = probe.eps_grid.front();
            for (double e : probe.eps_grid) {
                glo = std::min(glo, e);
                ghi = std::max(ghi, e);
            }
            double alo = std::max(glo, 2.0 * eta);
            double ahi = std::min(ghi, 0.5 * l_max);
            if (!(ahi > alo)) {
                alo = glo;
                ahi = ghi;
            }
            if (ahi / alo > 10.0) {  // central decade
                const double mid = std::sqrt(alo * ahi);
                alo = mid / std::sqrt(10.0);
                ahi = mid * std::sqrt(10.0);
            }
            if (auto_lo) lo = alo;
            if (auto_hi) hi = ahi;
        }
        if (!(hi > lo)) throw ConfigError("fit: need eps_min < eps_max");
        return {lo, hi};
    }

    PhiSpec phi_spec() const {
        const json& p = doc_.at("phi");
        PhiSpec phi;
        phi.x = detail::vec3_from(p.at("x"), "phi.x");
        phi.component = p.at("component").get<int>();
        phi.clip = p.at("clip").get<double>();
        phi.absolute = p.at("absolute").get<bool>();
        if (phi.component < 0 || phi.component > 2) throw ConfigError("phi.component must be 0..2");
        if (!(phi.clip > 0.0)) throw ConfigError("phi.clip must be positive");
        return phi;
    }

    int phi_p_max() const { return doc_.at("phi").at("p_max").get<int>(); }

    std::string output_dir() const { return doc_.at("output").at("dir").get<std::string>(); }

  private:
    json doc_;
};

}  // namespace vfmc
