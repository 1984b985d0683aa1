#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "vfmc/ensemble.hpp"
#include "vfmc/filament.hpp"
#include "vfmc/gamma.hpp"
#include "vfmc/parallel.hpp"
#include "vfmc/stats.hpp"

namespace vfmc {

enum class IncrementKind { longitudinal, nondirectional };
enum class EstimatorKind { single_filament, full_field };

inline const char* to_string(IncrementKind k) {
    return k == IncrementKind::longitudinal ? "longitudinal" : "nondirectional";
}
inline const char* to_string(EstimatorKind k) {
    return k == EstimatorKind::single_filament ? "single_filament" : "full_field";
}

/// Monte-Carlo driver options shared by the estimators.
struct McOptions {
    std::uint64_t seed = 20260809;
    int batches = 16;
    int workers = 1;
    StepPolicy step;
    double r0_margin = 4.0;  ///< start-ball margin, in units of sqrt(T)
    std::int64_t chunk_size = kDefaultChunkSize;
};

struct GridPointEstimate {
    double eps = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

struct StructureFunctionEstimate {
    int p = 2;
    IncrementKind kind = IncrementKind::longitudinal;
    EstimatorKind estimator = EstimatorKind::single_filament;
    std::vector<GridPointEstimate> grid;
    std::vector<std::string> warnings;
};

namespace detail {

inline double int_power(double x, int p) {
    double out = 1.0;
    for (int i = 0; i < p; ++i) out *= x;
    return out;
}

inline double ball_volume(double r) {
    return (4.0 * std::numbers::pi / 3.0) * r * r * r;
}

}  // namespace detail

/// Importance estimator of gamma[S_p(eps)] = int dgamma int dx0 W_x0[(increment)^p]
/// restricted to ell > eta:
///   draw (U, ell, T) from the normalized truncated gamma, draw x0 uniformly
///   in B(x, R0) with R0 = eps + ell + margin*sqrt(T), run one path, weight
///   the observed increment power by Z(eta) * |B(0, R0)|.
/// The margin makes the ball cover everything a path can reach with the
/// kernel; what is cut off is controlled by the Gaussian tail.
inline GridPointEstimate single_filament_moment(const MultifractalMeasure& gamma, double eta,
                                                const MollifierSpec& spec, int p, double eps,
                                                const Vec3& x, const Vec3& e, IncrementKind kind,
                                                std::int64_t budget, const McOptions& mc,
                                                std::uint64_t salt = 0,
                                                std::vector<std::string>* warnings = nullptr) {
    if (budget < 100) throw ConfigError("single_filament_moment: budget must be >= 100");
    if (p <= 0) throw ConfigError("single_filament_moment: p must be positive");
    if (std::abs(norm(e) - 1.0) > 1e-9) {
        throw ConfigError("single_filament_moment: direction must be a unit vector");
    }
    if (warnings && (eps <= eta || eps >= gamma.l_max())) {
        warnings->push_back("eps=" + std::to_string(eps) +
                            " outside the recommended window (eta, l_max); cutoff or outer-scale "
                            "contamination likely");
    }
    const double z_mass = gamma.total_mass(eta);
    StepPolicy policy = mc.step;
    if (eps > 0.0) policy.probe_scale = eps;

    const std::size_t n_chunks = chunk_count(budget, mc.chunk_size);
    std::vector<BatchAccumulator> partials(n_chunks, BatchAccumulator(mc.batches));
    run_chunked(budget, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
        BatchAccumulator acc(mc.batches);
        FilamentParams f;
        for (std::int64_t i = chunk.begin; i < chunk.end; ++i) {
            RngStream rng(mc.seed, StreamKind::single_filament, salt,
                          static_cast<std::uint64_t>(i));
            const SampledParams sp = gamma.sample(eta, rng);
            const double r0 = eps + sp.thickness + mc.r0_margin * std::sqrt(sp.length);
            const Vec3 x0 = x + rng.uniform_ball(r0);
            f.intensity = sp.intensity;
            f.thickness = sp.thickness;
            f.length = sp.length;
            sample_path_into(f.path, x0, sp.length, policy.dt_for(sp.thickness, sp.length), rng);
            RadialKernel kernel(spec, sp.thickness);
            const Vec3 delta = velocity_increment(f, kernel, x, e, eps);
            const double obs = kind == IncrementKind::longitudinal
                                   ? detail::int_power(dot(delta, e), p)
                                   : detail::int_power(norm(delta), p);
            acc.add(BatchAccumulator::batch_of(i, budget, mc.batches),
                    z_mass * detail::ball_volume(r0) * obs);
        }
        partials[chunk.index] = acc;
    });
    BatchAccumulator total(mc.batches);
    for (const auto& part : partials) total.merge(part);
    return {eps, total.mean(), total.std_error(), total.count()};
}

struct ProbeSpec {
    Vec3 x{0.0, 0.0, 0.0};
    Vec3 e{1.0, 0.0, 0.0};
    std::vector<double> eps_grid;
};

inline StructureFunctionEstimate single_filament_structure_function(
    const MultifractalMeasure& gamma, double eta, const MollifierSpec& spec,
    const ProbeSpec& probe, int p, IncrementKind kind, std::int64_t budget,
    const McOptions& mc) {
    StructureFunctionEstimate est;
    est.p = p;
    est.kind = kind;
    est.estimator = EstimatorKind::single_filament;
    for (std::size_t j = 0; j < probe.eps_grid.size(); ++j) {
        est.grid.push_back(single_filament_moment(gamma, eta, spec, p, probe.eps_grid[j], probe.x,
                                                  probe.e, kind, budget, mc,
                                                  static_cast<std::uint64_t>(j), &est.warnings));
    }
    return est;
}

/// Safety margin a probe needs from the window boundary: kernel reach plus
/// the Gaussian excursion of a path.
inline double window_margin(const MultifractalMeasure& gamma, double r0_margin) {
    return gamma.l_max() + r0_margin * std::sqrt(gamma.max_length());
}

/// Window sizing rule: every probe stays `window_margin` inside R.
inline double auto_window_radius(const MultifractalMeasure& gamma, const ProbeSpec& probe,
                                 double r0_margin) {
    double probe_reach = norm(probe.x);
    for (double eps : probe.eps_grid) probe_reach = std::max(probe_reach, norm(probe.x) + eps);
    return probe_reach + window_margin(gamma, r0_margin);
}

inline void check_probe_margin(const MultifractalMeasure& gamma, const LocalizationWindow& window,
                               const ProbeSpec& probe, double r0_margin) {
    double reach = norm(probe.x);
    for (double eps : probe.eps_grid) reach = std::max(reach, norm(probe.x) + eps);
    const double margin = window_margin(gamma, r0_margin);
    if (reach > window.radius - margin) {
        throw MarginViolationError(
            "probe reach " + std::to_string(reach) + " too close to the window boundary R=" +
            std::to_string(window.radius) + " (needs margin " + std::to_string(margin) + ")");
    }
}

/// Full-field estimator: average of (field increment)^p over independent
/// realizations of the localized Poisson ensemble.
inline std::vector<StructureFunctionEstimate> ensemble_structure_function(
    const MultifractalMeasure& gamma, const LocalizationWindow& window,
    const MollifierSpec& spec, const ProbeSpec& probe, const std::vector<int>& p_list,
    IncrementKind kind, std::int64_t realizations, const McOptions& mc) {
    if (realizations < 1) throw ConfigError("ensemble_structure_function: needs realizations >= 1");
    if (probe.eps_grid.empty()) throw ConfigError("ensemble_structure_function: empty eps grid");
    check_probe_margin(gamma, window, probe, mc.r0_margin);
    // fail fast on over-cap windows before spending any work
    if (intensity_mass(gamma, window) > window.max_expected_count) {
        throw BudgetExceededError("expected filament count exceeds cap; raise window.eta or shrink window.R");
    }

    StepPolicy policy = mc.step;
    policy.probe_scale = *std::min_element(probe.eps_grid.begin(), probe.eps_grid.end());

    const std::size_t n_eps = probe.eps_grid.size();
    std::vector<Vec3> points(n_eps + 1);
    points[0] = probe.x;
    for (std::size_t j = 0; j < n_eps; ++j) points[j + 1] = probe.x + probe.eps_grid[j] * probe.e;

    const std::size_t n_stats = p_list.size() * n_eps;
    const std::size_t n_chunks = chunk_count(realizations, mc.chunk_size);
    std::vector<std::vector<BatchAccumulator>> partials(
        n_chunks, std::vector<BatchAccumulator>(n_stats, BatchAccumulator(mc.batches)));

    run_chunked(realizations, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
        auto& accs = partials[chunk.index];
        std::vector<Vec3> field(points.size());
        std::vector<Vec3> scratch;
        for (std::int64_t r = chunk.begin; r < chunk.end; ++r) {
            const EnsembleRealization real =
                sample_ensemble(gamma, window, policy, mc.seed, static_cast<std::uint64_t>(r));
            field_at_many(real, spec, points.data(), points.size(), field.data(), scratch);
            const int batch = BatchAccumulator::batch_of(r, realizations, mc.batches);
            for (std::size_t j = 0; j < n_eps; ++j) {
                const Vec3 delta = field[j + 1] - field[0];
                for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
                    const double obs = kind == IncrementKind::longitudinal
                                           ? detail::int_power(dot(delta, probe.e), p_list[ip])
                                           : detail::int_power(norm(delta), p_list[ip]);
                    accs[ip * n_eps + j].add(batch, obs);
                }
            }
        }
    });

    std::vector<StructureFunctionEstimate> out;
    for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
        StructureFunctionEstimate est;
        est.p = p_list[ip];
        est.kind = kind;
        est.estimator = EstimatorKind::full_field;
        for (std::size_t j = 0; j < n_eps; ++j) {
            BatchAccumulator total(mc.batches);
            for (const auto& part : partials) total.merge(part[ip * n_eps + j]);
            est.grid.push_back(
                {probe.eps_grid[j], total.mean(), total.std_error(), total.count()});
        }
        out.push_back(std::move(est));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Poisson moment identity
// ---------------------------------------------------------------------------

/// Bounded cylinder functional phi used in the moment checks: one velocity
/// component of a single filament at a probe, clipped to [-clip, clip]
/// (or its absolute value, for the nonnegative branch of the lemma).
struct PhiSpec {
    Vec3 x{0.0, 0.0, 0.0};
    int component = 0;
    double clip = 10.0;
    bool absolute = false;

    double operator()(const FilamentParams& f, const RadialKernel& kernel) const {
        const Vec3 u = velocity_at(f, kernel, x);
        double v = component == 0 ? u.x : (component == 1 ? u.y : u.z);
        if (absolute) v = std::abs(v);
        return std::clamp(v, -clip, clip);
    }
};

/// E[mu(phi)^p] expanded over compositions of p with the multinomial weights
/// p! / (n! k_1! ... k_n!), in terms of the intensity moments nu(phi^k).
inline double poisson_moment_from_intensity(int p, const std::vector<double>& nu_pow) {
    // nu_pow[k] = nu(phi^k), k = 1..p
    std::vector<double> factorial(static_cast<std::size_t>(p) + 1, 1.0);
    for (int i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * i;
    double total = 0.0;
    std::vector<int> parts;
    auto recurse = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            const int n = static_cast<int>(parts.size());
            double term = factorial[static_cast<std::size_t>(p)] / factorial[n];
            for (int k : parts) {
                term /= factorial[static_cast<std::size_t>(k)];
                term *= nu_pow[static_cast<std::size_t>(k)];
            }
            total += term;
            return;
        }
        for (int k = 1; k <= remaining; ++k) {
            parts.push_back(k);
            self(self, remaining - k);
            parts.pop_back();
        }
    };
    recurse(recurse, p);
    return total;
}

struct MomentCheckRow {
    int p = 0;
    PointEstimate measured;    ///< E[mu(phi)^p] from ensemble realizations
    PointEstimate predicted;   ///< composition formula with MC nu(phi^k)
    double z = 0.0;            ///< joint z of measured vs predicted
    double upper_bound = 0.0;  ///< e p^p nu(phi^p)
    double lower_bound = 0.0;  ///< nu(phi^p)
};

struct MomentCheckReport {
    double intensity_mass = 0.0;
    std::vector<PointEstimate> nu_powers;  ///< nu(phi^k), k = 1..p_max
    std::vector<MomentCheckRow> rows;      ///< even p up to p_max
};

inline MomentCheckReport poisson_moment_check(const MultifractalMeasure& gamma,
                                              const LocalizationWindow& window,
                                              const MollifierSpec& spec, const PhiSpec& phi,
                                              int p_max, std::int64_t realizations,
                                              std::int64_t nu_budget, const McOptions& mc) {
    if (p_max < 2 || p_max > 6 || p_max % 2 != 0) {
        throw ConfigError("poisson_moment_check: p_max must be 2, 4 or 6");
    }
    // no probe-margin requirement here: the moment identity compares mu and
    // nu over the same localized set, whatever that set is
    const double mass = intensity_mass(gamma, window);
    if (mass > window.max_expected_count) {
        throw BudgetExceededError("expected filament count exceeds cap; raise window.eta or shrink window.R");
    }

    // LHS: moments of mu(phi) over realizations
    std::vector<BatchAccumulator> lhs(static_cast<std::size_t>(p_max),
                                      BatchAccumulator(mc.batches));
    {
        const std::size_t n_chunks = chunk_count(realizations, mc.chunk_size);
        std::vector<std::vector<BatchAccumulator>> partials(
            n_chunks,
            std::vector<BatchAccumulator>(static_cast<std::size_t>(p_max),
                                          BatchAccumulator(mc.batches)));
        run_chunked(realizations, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
            auto& accs = partials[chunk.index];
            for (std::int64_t r = chunk.begin; r < chunk.end; ++r) {
                const EnsembleRealization real =
                    sample_ensemble(gamma, window, mc.step, mc.seed, static_cast<std::uint64_t>(r));
                double mu_phi = 0.0;
                for (const auto& f : real.filaments) {
                    mu_phi += phi(f, RadialKernel(spec, f.thickness));
                }
                const int batch = BatchAccumulator::batch_of(r, realizations, mc.batches);
                double pow_val = 1.0;
                for (int p = 1; p <= p_max; ++p) {
                    pow_val *= mu_phi;
                    accs[static_cast<std::size_t>(p - 1)].add(batch, pow_val);
                }
            }
        });
        for (const auto& part : partials) {
            for (int p = 0; p < p_max; ++p) lhs[static_cast<std::size_t>(p)].merge(part[p]);
        }
    }

    // RHS ingredients: nu(phi^k) = mass * E_{nu~}[phi^k] from independent
    // single-filament draws
    std::vector<BatchAccumulator> nu_acc(static_cast<std::size_t>(p_max),
                                         BatchAccumulator(mc.batches));
    {
        const std::size_t n_chunks = chunk_count(nu_budget, mc.chunk_size);
        std::vector<std::vector<BatchAccumulator>> partials(
            n_chunks,
            std::vector<BatchAccumulator>(static_cast<std::size_t>(p_max),
                                          BatchAccumulator(mc.batches)));
        run_chunked(nu_budget, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
            auto& accs = partials[chunk.index];
            FilamentParams f;
            for (std::int64_t i = chunk.begin; i < chunk.end; ++i) {
                RngStream rng(mc.seed, StreamKind::nu_sample, 0, static_cast<std::uint64_t>(i));
                const SampledParams sp = gamma.sample(window.eta, rng);
                const Vec3 x0 = rng.uniform_ball(window.radius);
                f.intensity = sp.intensity;
                f.thickness = sp.thickness;
                f.length = sp.length;
                sample_path_into(f.path, x0, sp.length, mc.step.dt_for(sp.thickness, sp.length),
                                 rng);
                const double v = phi(f, RadialKernel(spec, sp.thickness));
                const int batch = BatchAccumulator::batch_of(i, nu_budget, mc.batches);
                double pow_val = 1.0;
                for (int p = 1; p <= p_max; ++p) {
                    pow_val *= v;
                    accs[static_cast<std::size_t>(p - 1)].add(batch, mass * pow_val);
                }
            }
        });
        for (const auto& part : partials) {
            for (int p = 0; p < p_max; ++p) nu_acc[static_cast<std::size_t>(p)].merge(part[p]);
        }
    }

    MomentCheckReport report;
    report.intensity_mass = mass;
    std::vector<double> nu_pow(static_cast<std::size_t>(p_max) + 1, 0.0);
    for (int k = 1; k <= p_max; ++k) {
        const auto& acc = nu_acc[static_cast<std::size_t>(k - 1)];
        report.nu_powers.push_back({acc.mean(), acc.std_error(), acc.count()});
        nu_pow[static_cast<std::size_t>(k)] = acc.mean();
    }
    for (int p = 2; p <= p_max; p += 2) {
        MomentCheckRow row;
        row.p = p;
        const auto& acc = lhs[static_cast<std::size_t>(p - 1)];
        row.measured = {acc.mean(), acc.std_error(), acc.count()};
        row.predicted.mean = poisson_moment_from_intensity(p, nu_pow);
        // delta-method error: perturb each nu(phi^k) by its standard error
        double var = 0.0;
        for (int k = 1; k <= p; ++k) {
            std::vector<double> bumped = nu_pow;
            const double se = report.nu_powers[static_cast<std::size_t>(k - 1)].std_error;
            bumped[static_cast<std::size_t>(k)] += se;
            const double d = poisson_moment_from_intensity(p, bumped) - row.predicted.mean;
            var += d * d;
        }
        row.predicted.std_error = std::sqrt(var);
        row.predicted.n = nu_budget;
        row.z = joint_z(row.measured, row.predicted);
        row.lower_bound = nu_pow[static_cast<std::size_t>(p)];
        row.upper_bound = std::numbers::e * std::pow(static_cast<double>(p), p) *
                          nu_pow[static_cast<std::size_t>(p)];
        report.rows.push_back(row);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Occupation-measure scan
// ---------------------------------------------------------------------------

struct OccupationPointSpec {
    double ell = 0.1;
    double horizon = 0.5;
};

struct OccupationRow {
    double ell = 0.0;
    double horizon = 0.0;
    int p = 0;
    double r0 = 0.0;
    PointEstimate estimate;      ///< space-integrated W[(L_B)^{p/2}]
    double exact_mean = 0.0;     ///< (4 pi/3) ell^3 T, only meaningful at p = 2
    double rel_error = 0.0;      ///< (mean - exact)/exact at p = 2
};

struct OccupationFit {
    int p = 0;
    std::string axis;     ///< "ell" or "T"
    double fixed = 0.0;   ///< the held-fixed parameter value
    ScalingFit fit;
    double expected = 0.0;
    std::string regime;   ///< "diffusive" (T >= ell^2) or "short-time"
};

struct OccupationReport {
    std::vector<OccupationRow> rows;
    std::vector<OccupationFit> fits;
};

/// MC estimate of W[(L_{B(0,ell)}^T)^{p/2}] = int dx0 E_x0[(L)^{p/2}]:
/// x0 uniform in B(0, R0), volume-weighted. R0 must leave at least a
/// 4 sqrt(T) margin beyond the ball. Paths are abandoned once they are
/// provably (up to an exp(-12.5) tail) unable to return to the ball.
inline OccupationReport occupation_moment_scan(const std::vector<OccupationPointSpec>& points,
                                               const std::vector<int>& p_list, double r0,
                                               std::int64_t budget, const McOptions& mc) {
    for (int p : p_list) {
        if (p <= 0 || p % 2 != 0) throw ConfigError("occupation scan: p must be even positive");
    }
    OccupationReport report;
    std::map<std::pair<int, double>, std::vector<FitPoint>> by_horizon;  // fit vs ell
    std::map<std::pair<int, double>, std::vector<FitPoint>> by_ell;      // fit vs T

    for (std::size_t ipt = 0; ipt < points.size(); ++ipt) {
        const double ell = points[ipt].ell;
        const double horizon = points[ipt].horizon;
        if (!(ell > 0.0) || ell > 1.0 || !(horizon > 0.0) || horizon > 1.0) {
            throw ConfigError("occupation scan: need ell, T in (0, 1]");
        }
        const double sqrt_t = std::sqrt(horizon);
        const double ball_r0 = r0 > 0.0 ? r0 : ell + mc.r0_margin * sqrt_t;
        if (ball_r0 < ell + 4.0 * sqrt_t) {
            throw MarginViolationError("occupation scan: R0 margin below 4 sqrt(T)");
        }
        const double dt0 = mc.step.dt_for(std::min(ell, sqrt_t), horizon);
        const std::int64_t n_steps = path_step_count(horizon, dt0);
        const double vol = detail::ball_volume(ball_r0);

        // stop radius per step: a path beyond ell + 5 sqrt(T - t) cannot
        // come back (tail below exp(-12.5)), so stop integrating it
        std::vector<double> stop_r2(static_cast<std::size_t>(n_steps) + 1);
        for (std::int64_t k = 0; k <= n_steps; ++k) {
            const double t = std::min(static_cast<double>(k) * dt0, horizon);
            const double r_stop = ell + 5.0 * std::sqrt(std::max(horizon - t, 0.0));
            stop_r2[static_cast<std::size_t>(k)] = r_stop * r_stop;
        }

        const std::size_t n_chunks = chunk_count(budget, mc.chunk_size);
        std::vector<std::vector<BatchAccumulator>> partials(
            n_chunks,
            std::vector<BatchAccumulator>(p_list.size(), BatchAccumulator(mc.batches)));
        run_chunked(budget, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
            auto& accs = partials[chunk.index];
            const double ell2 = ell * ell;
            for (std::int64_t i = chunk.begin; i < chunk.end; ++i) {
                RngStream rng(mc.seed, StreamKind::occupation, static_cast<std::uint64_t>(ipt),
                              static_cast<std::uint64_t>(i));
                Vec3 x = rng.uniform_ball(ball_r0);
                double occ = 0.0;
                for (std::int64_t k = 0; k < n_steps; ++k) {
                    const double d2 = norm2(x);
                    const double t_here = static_cast<double>(k) * dt0;
                    const double t_next = std::min(t_here + dt0, horizon);
                    if (d2 < ell2) {
                        occ += t_next - t_here;
                    } else if (d2 > stop_r2[static_cast<std::size_t>(k)]) {
                        break;
                    }
                    x += rng.normal3() * std::sqrt(t_next - t_here);
                }
                const int batch = BatchAccumulator::batch_of(i, budget, mc.batches);
                for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
                    accs[ip].add(batch, vol * detail::int_power(occ, p_list[ip] / 2));
                }
            }
        });

        for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
            BatchAccumulator total(mc.batches);
            for (const auto& part : partials) total.merge(part[ip]);
            OccupationRow row;
            row.ell = ell;
            row.horizon = horizon;
            row.p = p_list[ip];
            row.r0 = ball_r0;
            row.estimate = {total.mean(), total.std_error(), total.count()};
            if (row.p == 2) {
                row.exact_mean = detail::ball_volume(ell) * horizon;
                row.rel_error = (row.estimate.mean - row.exact_mean) / row.exact_mean;
            }
            report.rows.push_back(row);
            by_horizon[{row.p, horizon}].push_back({ell, row.estimate.mean,
                                                    row.estimate.std_error});
            by_ell[{row.p, ell}].push_back({horizon, row.estimate.mean,
                                            row.estimate.std_error});
        }
    }

    auto add_fits = [&](const auto& groups, const char* axis) {
        for (const auto& [key, pts] : groups) {
            if (pts.size() < 3) continue;
            auto sorted = pts;
            std::sort(sorted.begin(), sorted.end(),
                      [](const FitPoint& a, const FitPoint& b) { return a.eps < b.eps; });
            OccupationFit f;
            f.p = key.first;
            f.axis = axis;
            f.fixed = key.second;
            f.fit = fit_zeta(sorted, sorted.front().eps, sorted.back().eps);
            bool diffusive = true, short_time = true;
            for (const auto& pt : sorted) {
                const double ell = f.axis == "ell" ? pt.eps : f.fixed;
                const double horizon = f.axis == "ell" ? f.fixed : pt.eps;
                if (horizon < ell * ell) diffusive = false;
                if (horizon > 0.25 * ell * ell) short_time = false;
            }
            f.regime = diffusive ? "diffusive" : (short_time ? "short-time" : "mixed");
            if (f.axis == "ell") {
                f.expected = diffusive ? f.p + 1.0 : 3.0;
            } else {
                f.expected = diffusive ? 1.0 : f.p / 2.0;
            }
            report.fits.push_back(std::move(f));
        }
    };
    add_fits(by_horizon, "ell");
    add_fits(by_ell, "T");
    return report;
}

}  // namespace vfmc
