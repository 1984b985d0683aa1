#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "vfmc/brownian.hpp"
#include "vfmc/errors.hpp"
#include "vfmc/filament.hpp"
#include "vfmc/gamma.hpp"
#include "vfmc/rng.hpp"

namespace vfmc {

/// Localization A_{eta,R}: keep filaments with thickness above eta whose
/// path starts inside B(0, R). Makes the Poisson intensity finite.
struct LocalizationWindow {
    double eta = 0.1;
    double radius = 2.0;
    double max_expected_count = 1e6;

    void validate() const {
        if (!(eta > 0.0) || eta >= 1.0) throw ConfigError("window: need 0 < eta < 1");
        if (!(radius > 0.0)) throw ConfigError("window: need R > 0");
    }
};

/// nu(A_{eta,R}) = Z(eta) * |B(0,R)|; the Wiener factor contributes the
/// Lebesgue volume of admissible starting points.
inline double intensity_mass(const MultifractalMeasure& gamma, const LocalizationWindow& window) {
    window.validate();
    const double vol = (4.0 * std::numbers::pi / 3.0) * window.radius * window.radius *
                       window.radius;
    return gamma.total_mass(window.eta) * vol;
}

/// Mean below which the Poisson count is drawn by inversion; above it a
/// normal approximation with continuity correction is used.
inline constexpr double kPoissonInversionThreshold = 30.0;

inline std::int64_t sample_poisson(double mean, RngStream& rng) {
    if (mean <= 0.0) return 0;
    if (mean < kPoissonInversionThreshold) {
        const double target = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        while (target > cdf && k < 10000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    const double g = rng.normal();
    const double v = std::floor(mean + std::sqrt(mean) * g + 0.5);
    return v < 0.0 ? 0 : static_cast<std::int64_t>(v);
}

/// One draw of the localized Poisson field mu_{eta,R}.
struct EnsembleRealization {
    LocalizationWindow window;
    std::vector<FilamentParams> filaments;
    std::uint64_t seed = 0;    ///< master seed the draw derives from
    std::uint64_t index = 0;   ///< realization counter under that seed
};

/// N ~ Poisson(nu(A)); each filament gets (U, ell, T) from the truncated
/// gamma, a uniform start in B(0, R) and a Brownian path. Parameter draws
/// use one stream per realization; each path gets its own substream keyed
/// by (realization, filament), so layouts never change the draw sequence.
inline EnsembleRealization sample_ensemble(const MultifractalMeasure& gamma,
                                           const LocalizationWindow& window,
                                           const StepPolicy& policy, std::uint64_t seed,
                                           std::uint64_t realization_index) {
    window.validate();
    const double mass = intensity_mass(gamma, window);
    if (mass > window.max_expected_count) {
        throw BudgetExceededError(
            "expected filament count " + std::to_string(mass) + " exceeds cap " +
            std::to_string(window.max_expected_count) + "; raise window.eta or shrink window.R");
    }
    RngStream params_rng(seed, StreamKind::ensemble_params, realization_index, 0);
    EnsembleRealization real;
    real.window = window;
    real.seed = seed;
    real.index = realization_index;
    const std::int64_t n = sample_poisson(mass, params_rng);
    real.filaments.reserve(n);
    for (std::int64_t alpha = 0; alpha < n; ++alpha) {
        const SampledParams sp = gamma.sample(window.eta, params_rng);
        const Vec3 x0 = params_rng.uniform_ball(window.radius);
        FilamentParams f;
        f.intensity = sp.intensity;
        f.thickness = sp.thickness;
        f.length = sp.length;
        RngStream path_rng(seed, StreamKind::ensemble_path, realization_index,
                           static_cast<std::uint64_t>(alpha));
        sample_path_into(f.path, x0, sp.length, policy.dt_for(sp.thickness, sp.length), path_rng);
        real.filaments.push_back(std::move(f));
    }
    return real;
}

/// u_{eta,R}(x): sum of the single-filament fields in filament-index order
/// (fixed order is part of the reproducibility contract).
inline Vec3 field_at(const EnsembleRealization& real, const MollifierSpec& spec, const Vec3& x) {
    Vec3 acc{};
    for (const auto& f : real.filaments) {
        acc += velocity_at(f, RadialKernel(spec, f.thickness), x);
    }
    return acc;
}

/// Field at several probes, one kernel per filament, one path pass each.
inline void field_at_many(const EnsembleRealization& real, const MollifierSpec& spec,
                          const Vec3* points, std::size_t n_points, Vec3* out,
                          std::vector<Vec3>& scratch) {
    for (std::size_t j = 0; j < n_points; ++j) out[j] = Vec3{};
    scratch.resize(n_points);
    for (const auto& f : real.filaments) {
        RadialKernel kernel(spec, f.thickness);
        velocity_at_many(f, kernel, points, n_points, scratch.data());
        for (std::size_t j = 0; j < n_points; ++j) out[j] += scratch[j];
    }
}

}  // namespace vfmc
