#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vfmc/errors.hpp"
#include "vfmc/rng.hpp"
#include "vfmc/vec.hpp"

namespace vfmc {

struct Ball {
    Vec3 center;
    double radius = 0.0;

    bool contains(const Vec3& p) const { return norm2(p - center) < radius * radius; }
};

/// Discretized 3d Brownian motion on [0, T]: positions at times
/// 0, dt, 2 dt, ..., T, with the last step allowed to be shorter than dt.
/// Increments are independent Gaussians with per-component variance equal
/// to the step length.
struct BrownianPath {
    Vec3 origin;
    double horizon = 0.0;
    double dt = 0.0;
    std::vector<Vec3> positions;

    std::int64_t steps() const { return static_cast<std::int64_t>(positions.size()) - 1; }

    double time_at(std::int64_t k) const { return std::min(static_cast<double>(k) * dt, horizon); }
};

/// Step-size rule: dt = min(ell, probe_scale)^2 / resolution_scale^2,
/// floored at dt_min. Brownian motion moves sqrt(dt) per step, so this
/// resolves both the kernel thickness and the increment separation.
struct StepPolicy {
    double resolution_scale = 8.0;
    double dt_min = 1e-6;
    double probe_scale = 1e300;  // smallest epsilon probed, if any

    double dt_for(double ell, double horizon) const {
        const double s = std::min(ell, probe_scale);
        double dt = (s * s) / (resolution_scale * resolution_scale);
        dt = std::max(dt, dt_min);
        return std::min(dt, horizon);
    }
};

inline std::int64_t path_step_count(double horizon, double dt) {
    const auto n = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
    return n < 1 ? 1 : n;
}

/// Sample into an existing path object (reuses the positions buffer).
inline void sample_path_into(BrownianPath& path, const Vec3& x0, double horizon, double dt,
                             RngStream& rng) {
    if (!(dt > 0.0) || !(horizon > 0.0)) {
        throw ConfigError("sample_path: dt and T must be positive");
    }
    if (dt > horizon || horizon > 1.0) {
        throw ConfigError("sample_path: need 0 < dt <= T <= 1");
    }
    const std::int64_t n = path_step_count(horizon, dt);
    path.origin = x0;
    path.horizon = horizon;
    path.dt = dt;
    path.positions.resize(n + 1);
    path.positions[0] = x0;
    Vec3 x = x0;
    const double sigma = std::sqrt(dt);
    for (std::int64_t k = 1; k < n; ++k) {
        x += rng.normal3() * sigma;
        path.positions[k] = x;
    }
    const double last = horizon - static_cast<double>(n - 1) * dt;
    x += rng.normal3() * std::sqrt(last);
    path.positions[n] = x;
}

inline BrownianPath sample_path(const Vec3& x0, double horizon, double dt, RngStream& rng) {
    BrownianPath path;
    sample_path_into(path, x0, horizon, dt, rng);
    return path;
}

/// Left-point (Ito) cross-product line integral: sum_k f(X_k) ^ (X_{k+1} - X_k).
template <typename F>
Vec3 ito_cross_integral(const BrownianPath& path, const F& f) {
    Vec3 acc{};
    for (std::int64_t k = 0; k < path.steps(); ++k) {
        acc += cross(f(path.positions[k]), path.positions[k + 1] - path.positions[k]);
    }
    return acc;
}

/// Midpoint (Stratonovich) rule on the chord midpoints.
template <typename F>
Vec3 stratonovich_cross_integral(const BrownianPath& path, const F& f) {
    Vec3 acc{};
    for (std::int64_t k = 0; k < path.steps(); ++k) {
        const Vec3 mid = 0.5 * (path.positions[k] + path.positions[k + 1]);
        acc += cross(f(mid), path.positions[k + 1] - path.positions[k]);
    }
    return acc;
}

/// Occupation time L_B^T by the left-point Riemann rule, matching the Ito
/// convention of the line integrals.
inline double occupation_time(const BrownianPath& path, const Ball& ball) {
    double acc = 0.0;
    const std::int64_t n = path.steps();
    for (std::int64_t k = 0; k < n; ++k) {
        if (ball.contains(path.positions[k])) {
            acc += path.time_at(k + 1) - path.time_at(k);
        }
    }
    return acc;
}

/// First grid time with X_t in the ball, if any.
inline std::optional<double> entrance_time(const BrownianPath& path, const Ball& ball) {
    const std::int64_t n = path.steps();
    for (std::int64_t k = 0; k <= n; ++k) {
        if (ball.contains(path.positions[k])) return path.time_at(k);
    }
    return std::nullopt;
}

}  // namespace vfmc
