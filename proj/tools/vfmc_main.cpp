// vfmc: Monte-Carlo statistics of a Poisson ensemble of Brownian vortex
// filaments. Subcommands estimate structure functions and scaling exponents,
// validate the Poisson moment identities, scan Brownian occupation moments
// and check the kernel identities and field symmetries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vfmc/config.hpp"
#include "vfmc/estimators.hpp"
#include "vfmc/io.hpp"
#include "vfmc/kernel_checks.hpp"
#include "vfmc/symmetry.hpp"
#include "vfmc/version.hpp"

using namespace vfmc;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    std::string out_dir;
    int workers = -1;
};

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg =
        args.config_path.empty() ? ExperimentConfig() : ExperimentConfig::from_file(args.config_path);
    for (const auto& ov : args.overrides) cfg.apply_override(ov);
    if (args.seed >= 0) cfg.set_seed(static_cast<std::uint64_t>(args.seed));
    if (args.workers >= 0) cfg.set_workers(args.workers);
    if (!args.out_dir.empty()) cfg.set_output_dir(args.out_dir);
    return cfg;
}

ArtifactMeta make_meta(const ExperimentConfig& cfg, const std::string& command) {
    ArtifactMeta meta;
    meta.config_hash = cfg.hash();
    meta.seed = cfg.mc_options().seed;
    meta.command = command;
    return meta;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    const std::string dir = cfg.output_dir();
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--set", args.overrides, "dotted-path override key=value")->take_all();
    cmd->add_option("--seed", args.seed, "master seed (64-bit)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--workers", args.workers, "worker threads (0 = hardware)");
}

json grid_json(const StructureFunctionEstimate& est) {
    json rows = json::array();
    for (const auto& pt : est.grid) {
        rows.push_back({{"epsilon", pt.eps},
                        {"mean", pt.mean},
                        {"stderr", pt.std_error},
                        {"n", pt.n}});
    }
    return {{"estimator", to_string(est.estimator)},
            {"kind", to_string(est.kind)},
            {"p", est.p},
            {"grid", rows},
            {"warnings", est.warnings}};
}

int cmd_analytic(const ExperimentConfig& cfg) {
    const auto gamma = cfg.gamma();
    const auto probe = cfg.probe_spec();
    const auto meta = make_meta(cfg, "analytic");

    json table = json::array();
    std::printf("p      zeta_p        active_atom\n");
    for (int p : cfg.p_list()) {
        const double z = gamma.zeta(p);
        const auto atom = gamma.active_atom(p);
        std::printf("%-6d %-13.10f %zu\n", p, z, atom);
        json moments = json::array();
        for (double eps : probe.eps_grid) {
            moments.push_back({{"epsilon", eps},
                               {"lower", gamma.moment_lower(p, eps)},
                               {"upper", gamma.moment_upper(p, eps)}});
        }
        table.push_back({{"p", p},
                         {"zeta", z},
                         {"active_atom", atom},
                         {"moments", moments}});
    }
    json doc = {{"meta", meta_json(meta, cfg.raw())}, {"zeta_table", table}};
    write_text_file(out_path(cfg, "analytic.json"), doc.dump(2) + "\n");
    return 0;
}

int cmd_kernel_check(const ExperimentConfig& cfg) {
    const auto spec = cfg.mollifier();
    const auto report = kernel_check_suite(spec, cfg.mc_options().seed);
    json checks = json::array();
    bool all = true;
    for (const auto& c : report.checks) {
        std::printf("%-38s observed=%-12.3e bound=%-12.3e %s\n", c.name.c_str(), c.observed,
                    c.bound, c.pass ? "PASS" : "FAIL");
        checks.push_back({{"name", c.name},
                          {"observed", c.observed},
                          {"bound", c.bound},
                          {"pass", c.pass}});
        all = all && c.pass;
    }
    json doc = {{"meta", meta_json(make_meta(cfg, "kernel-check"), cfg.raw())},
                {"mollifier", spec.name()},
                {"checks", checks},
                {"all_pass", all}};
    write_text_file(out_path(cfg, "kernel_check.json"), doc.dump(2) + "\n");
    return all ? 0 : 1;
}

json fits_for(const ExperimentConfig& cfg, const MultifractalMeasure& gamma,
              const ProbeSpec& probe, const std::vector<StructureFunctionEstimate>& estimates) {
    const auto [flo, fhi] = cfg.fit_range(probe, cfg.gamma_eta(), gamma.l_max());
    json fits = json::array();
    for (const auto& est : estimates) {
        std::vector<FitPoint> pts;
        for (const auto& g : est.grid) pts.push_back({g.eps, g.mean, g.std_error});
        const ScalingFit fit = fit_zeta(pts, flo, fhi);
        json f = fit_json(est.p, fit, gamma.zeta(est.p));
        f["estimator"] = to_string(est.estimator);
        f["kind"] = to_string(est.kind);
        fits.push_back(f);
        std::printf("fit: %s p=%d zeta_hat=%.4f +- %.4f (theory %.4f, R2=%.4f)\n",
                    to_string(est.estimator), est.p, fit.zeta_hat, fit.std_error,
                    gamma.zeta(est.p), fit.r_squared);
    }
    return fits;
}

int cmd_structure(const ExperimentConfig& cfg) {
    const auto gamma = cfg.gamma();
    const auto spec = cfg.mollifier();
    const auto probe = cfg.probe_spec();
    const auto mc = cfg.mc_options();
    const auto kind = cfg.increment_kind();
    const std::string which = cfg.raw().at("estimator").get<std::string>();
    if (which != "single_filament" && which != "full_field" && which != "both") {
        throw ConfigError("estimator must be single_filament, full_field or both");
    }
    if ((which != "full_field") && cfg.budget() < 100) {
        throw ConfigError("mc.budget must be >= 100 for the single-filament estimator");
    }
    if ((which != "single_filament") && cfg.realizations() < 1) {
        throw ConfigError("mc.realizations must be >= 1 for the full-field estimator");
    }

    std::vector<StructureFunctionEstimate> estimates;
    if (which == "single_filament" || which == "both") {
        for (int p : cfg.p_list()) {
            estimates.push_back(single_filament_structure_function(
                gamma, cfg.gamma_eta(), spec, probe, p, kind, cfg.budget(), mc));
        }
    }
    if (which == "full_field" || which == "both") {
        const auto window = cfg.window(gamma, probe);
        auto full = ensemble_structure_function(gamma, window, spec, probe, cfg.p_list(), kind,
                                                cfg.realizations(), mc);
        for (auto& est : full) estimates.push_back(std::move(est));
    }

    const auto meta = make_meta(cfg, "structure");
    std::ostringstream csv;
    write_structure_csv(csv, meta, estimates);
    write_text_file(out_path(cfg, "structure.csv"), csv.str());

    json doc = {{"meta", meta_json(meta, cfg.raw())},
                {"estimates", json::array()},
                {"fits", fits_for(cfg, gamma, probe, estimates)}};
    for (const auto& est : estimates) doc["estimates"].push_back(grid_json(est));
    write_text_file(out_path(cfg, "structure_fits.json"), doc.dump(2) + "\n");
    std::printf("wrote %s and structure_fits.json\n", out_path(cfg, "structure.csv").c_str());
    return 0;
}

int cmd_zeta(const ExperimentConfig& cfg) {
    const auto gamma = cfg.gamma();
    const auto spec = cfg.mollifier();
    const auto probe = cfg.probe_spec();
    const auto mc = cfg.mc_options();
    if (cfg.budget() < 100) throw ConfigError("mc.budget must be >= 100");

    std::vector<StructureFunctionEstimate> estimates;
    for (int p : cfg.p_list()) {
        estimates.push_back(single_filament_structure_function(
            gamma, cfg.gamma_eta(), spec, probe, p, cfg.increment_kind(), cfg.budget(), mc));
    }
    json theory = json::array();
    for (int p : cfg.p_list()) {
        theory.push_back({{"p", p}, {"zeta", gamma.zeta(p)}, {"active_atom", gamma.active_atom(p)}});
    }
    const auto meta = make_meta(cfg, "zeta");
    json doc = {{"meta", meta_json(meta, cfg.raw())},
                {"zeta_theory", theory},
                {"fits", fits_for(cfg, gamma, probe, estimates)}};
    write_text_file(out_path(cfg, "zeta.json"), doc.dump(2) + "\n");
    return 0;
}

int cmd_occupation(const ExperimentConfig& cfg) {
    const auto& occ = cfg.raw().at("occupation");
    const auto mc = cfg.mc_options();
    const std::int64_t budget = occ.at("budget").get<std::int64_t>();
    const std::int64_t pair_budget = occ.value("pair_budget", budget);
    if (budget < 100 || pair_budget < 100) throw ConfigError("occupation budgets must be >= 100");
    std::vector<int> p_list;
    for (const auto& p : occ.at("p_list")) p_list.push_back(p.get<int>());
    double r0 = 0.0;
    if (!occ.at("R0").is_string()) r0 = occ.at("R0").get<double>();

    // exact-mean pairs at p = 2, then the two scaling scans
    std::vector<OccupationPointSpec> pairs;
    for (const auto& pr : occ.at("pairs")) {
        pairs.push_back({pr[0].get<double>(), pr[1].get<double>()});
    }
    OccupationReport pair_report = occupation_moment_scan(pairs, {2}, r0, pair_budget, mc);

    std::vector<OccupationPointSpec> scan_points;
    const auto& ell_scan = occ.at("ell_scan");
    for (const auto& ell : ell_scan.at("ell")) {
        scan_points.push_back({ell.get<double>(), ell_scan.at("T").get<double>()});
    }
    const auto& t_scan = occ.at("t_scan");
    for (const auto& t : t_scan.at("T")) {
        scan_points.push_back({t_scan.at("ell").get<double>(), t.get<double>()});
    }
    OccupationReport scan_report = occupation_moment_scan(scan_points, p_list, r0, budget, mc);

    OccupationReport merged;
    merged.rows = pair_report.rows;
    merged.rows.insert(merged.rows.end(), scan_report.rows.begin(), scan_report.rows.end());
    merged.fits = scan_report.fits;

    const auto meta = make_meta(cfg, "occupation");
    std::ostringstream csv;
    write_occupation_csv(csv, meta, merged);
    write_text_file(out_path(cfg, "occupation.csv"), csv.str());

    json rows = json::array();
    for (const auto& row : merged.rows) {
        json r = {{"ell", row.ell},       {"T", row.horizon},
                  {"p", row.p},           {"R0", row.r0},
                  {"mean", row.estimate.mean}, {"stderr", row.estimate.std_error},
                  {"n", row.estimate.n}};
        if (row.p == 2) {
            r["exact_mean"] = row.exact_mean;
            r["rel_error"] = row.rel_error;
            std::printf("pair ell=%.3f T=%.3f: mean=%.4e exact=%.4e rel=%.3f%%\n", row.ell,
                        row.horizon, row.estimate.mean, row.exact_mean, 100.0 * row.rel_error);
        }
        rows.push_back(r);
    }
    json fits = json::array();
    for (const auto& f : merged.fits) {
        std::printf("fit vs %s (p=%d, fixed=%.3f, %s): exponent %.3f +- %.3f (expect %.1f)\n",
                    f.axis.c_str(), f.p, f.fixed, f.regime.c_str(), f.fit.zeta_hat,
                    f.fit.std_error, f.expected);
        fits.push_back({{"p", f.p},
                        {"axis", f.axis},
                        {"fixed", f.fixed},
                        {"regime", f.regime},
                        {"exponent", f.fit.zeta_hat},
                        {"stderr", f.fit.std_error},
                        {"r2", f.fit.r_squared},
                        {"expected", f.expected}});
    }
    json doc = {{"meta", meta_json(meta, cfg.raw())},
                {"poisson_inversion_threshold", kPoissonInversionThreshold},
                {"rows", rows},
                {"fits", fits}};
    write_text_file(out_path(cfg, "occupation.json"), doc.dump(2) + "\n");
    return 0;
}

int cmd_validate_moments(const ExperimentConfig& cfg) {
    const auto gamma = cfg.gamma();
    const auto spec = cfg.mollifier();
    const auto probe = cfg.probe_spec();
    const auto mc = cfg.mc_options();
    const auto window = cfg.window(gamma, probe);
    const auto report = poisson_moment_check(gamma, window, spec, cfg.phi_spec(), cfg.phi_p_max(),
                                             cfg.realizations(), cfg.nu_budget(), mc);
    json nu = json::array();
    for (std::size_t k = 0; k < report.nu_powers.size(); ++k) {
        nu.push_back({{"k", k + 1},
                      {"mean", report.nu_powers[k].mean},
                      {"stderr", report.nu_powers[k].std_error}});
    }
    json rows = json::array();
    bool ok = true;
    for (const auto& row : report.rows) {
        std::printf("p=%d measured=%.5e predicted=%.5e z=%+.2f bound(e p^p nu)=%.3e\n", row.p,
                    row.measured.mean, row.predicted.mean, row.z, row.upper_bound);
        rows.push_back({{"p", row.p},
                        {"measured", row.measured.mean},
                        {"measured_stderr", row.measured.std_error},
                        {"predicted", row.predicted.mean},
                        {"predicted_stderr", row.predicted.std_error},
                        {"z", row.z},
                        {"lower_bound", row.lower_bound},
                        {"upper_bound", row.upper_bound}});
        ok = ok && std::abs(row.z) <= 3.0;
    }
    json doc = {{"meta", meta_json(make_meta(cfg, "validate-moments"), cfg.raw())},
                {"intensity_mass", report.intensity_mass},
                {"poisson_inversion_threshold", kPoissonInversionThreshold},
                {"nu_powers", nu},
                {"rows", rows},
                {"all_within_3z", ok}};
    write_text_file(out_path(cfg, "moments.json"), doc.dump(2) + "\n");
    return 0;
}

int cmd_symmetry(const ExperimentConfig& cfg) {
    const auto gamma = cfg.gamma();
    const auto spec = cfg.mollifier();
    const auto mc = cfg.mc_options();
    const auto& sym = cfg.raw().at("symmetry");
    SymmetryProbes probes;
    probes.x_shift = detail::vec3_from(sym.at("x_shift"), "symmetry.x_shift");
    probes.rotation_angle = sym.at("rotation_angle").get<double>();
    ProbeSpec margin_probe;
    margin_probe.x = probes.x_shift;
    margin_probe.eps_grid = {0.0};
    const auto window = cfg.window(gamma, margin_probe);
    const auto report =
        symmetry_suite(gamma, window, spec, probes, cfg.realizations(), mc);
    json checks = json::array();
    for (const auto& c : report.checks) {
        std::printf("%-52s %s=%.3f %s\n", c.name.c_str(), c.kind.c_str(), c.z,
                    c.pass ? "PASS" : "FAIL");
        checks.push_back({{"name", c.name},
                          {"kind", c.kind},
                          {"value", c.value},
                          {"stderr", c.std_error},
                          {"z", c.z},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
    }
    json doc = {{"meta", meta_json(make_meta(cfg, "symmetry"), cfg.raw())},
                {"realizations", report.realizations},
                {"checks", checks},
                {"all_pass", report.all_pass()}};
    write_text_file(out_path(cfg, "symmetry.json"), doc.dump(2) + "\n");
    return report.all_pass() ? 0 : 1;
}

void emit_error(int code, const std::string& reason) {
    json err = {{"error", {{"code", code}, {"reason", reason}}}};
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vortex filament Monte Carlo"};
    app.set_version_flag("--version", std::string("vfmc ") + kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::string command;
    for (const char* name : {"structure", "zeta", "occupation", "validate-moments", "symmetry",
                             "kernel-check", "analytic"}) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, args);
        sub->callback([&command, name] { command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = load_config(args);
        if (command == "analytic") return cmd_analytic(cfg);
        if (command == "kernel-check") return cmd_kernel_check(cfg);
        if (command == "structure") return cmd_structure(cfg);
        if (command == "zeta") return cmd_zeta(cfg);
        if (command == "occupation") return cmd_occupation(cfg);
        if (command == "validate-moments") return cmd_validate_moments(cfg);
        if (command == "symmetry") return cmd_symmetry(cfg);
        emit_error(2, "unknown subcommand");
        return 2;
    } catch (const BudgetExceededError& e) {
        emit_error(3, e.what());
        return 3;
    } catch (const FitDomainError& e) {
        emit_error(4, e.what());
        return 4;
    } catch (const ConfigError& e) {
        emit_error(2, e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error(2, e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error(1, e.what());
        return 1;
    }
}
