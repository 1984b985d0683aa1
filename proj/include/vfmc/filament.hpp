#pragma once

#include <cmath>
#include <vector>

#include "vfmc/brownian.hpp"
#include "vfmc/errors.hpp"
#include "vfmc/kernel.hpp"

namespace vfmc {

/// One vortex filament: intensity U, thickness ell, length parameter T and
/// the Brownian backbone. Lives on the parameter space 0 < ell <= sqrt(T) <= 1.
struct FilamentParams {
    double intensity = 1.0;  ///< U
    double thickness = 0.1;  ///< ell
    double length = 0.1;     ///< T
    BrownianPath path;

    void validate() const {
        if (!(thickness > 0.0) || thickness * thickness > length * (1.0 + 1e-12) ||
            length > 1.0 + 1e-12) {
            throw ConfigError("filament: need 0 < ell <= sqrt(T) <= 1");
        }
        if (std::abs(path.horizon - length) > 1e-12) {
            throw ConfigError("filament: path horizon must equal T");
        }
    }
};

/// u_single(x) = (U/ell^2) int_0^T K_ell(x - X_t) ^ dX_t, Ito discretization.
/// The Stratonovich and Ito integrals coincide because K_ell is a gradient.
inline Vec3 velocity_at(const FilamentParams& f, const RadialKernel& kernel, const Vec3& x) {
    f.validate();
    const Vec3 acc = ito_cross_integral(f.path, [&](const Vec3& p) { return kernel(x - p); });
    return acc * (f.intensity / (f.thickness * f.thickness));
}

/// Same field at several probes from one traversal of the path. Each probe
/// accumulates in path order, so results are bitwise equal to velocity_at.
inline void velocity_at_many(const FilamentParams& f, const RadialKernel& kernel,
                             const Vec3* points, std::size_t n_points, Vec3* out) {
    f.validate();
    for (std::size_t j = 0; j < n_points; ++j) out[j] = Vec3{};
    const auto& pos = f.path.positions;
    const std::int64_t n = f.path.steps();
    for (std::int64_t k = 0; k < n; ++k) {
        const Vec3 step = pos[k + 1] - pos[k];
        for (std::size_t j = 0; j < n_points; ++j) {
            out[j] += cross(kernel(points[j] - pos[k]), step);
        }
    }
    const double pref = f.intensity / (f.thickness * f.thickness);
    for (std::size_t j = 0; j < n_points; ++j) out[j] *= pref;
}

inline std::vector<Vec3> velocity_at_many(const FilamentParams& f, const RadialKernel& kernel,
                                          const std::vector<Vec3>& points) {
    std::vector<Vec3> out(points.size());
    velocity_at_many(f, kernel, points.data(), points.size(), out.data());
    return out;
}

/// delta_eps u = u(x + eps e) - u(x) from a single path pass; the two probes
/// share the path, which is what produces the eps^p cancellation.
inline Vec3 velocity_increment(const FilamentParams& f, const RadialKernel& kernel, const Vec3& x,
                               const Vec3& e, double eps) {
    const Vec3 pts[2] = {x + eps * e, x};
    Vec3 u[2];
    velocity_at_many(f, kernel, pts, 2, u);
    return u[0] - u[1];
}

/// <delta_eps u, e> for a unit direction e.
inline double longitudinal_increment(const FilamentParams& f, const RadialKernel& kernel,
                                     const Vec3& x, const Vec3& e, double eps) {
    if (std::abs(norm(e) - 1.0) > 1e-9) {
        throw ConfigError("longitudinal_increment: direction must be a unit vector");
    }
    if (eps < 0.0) throw ConfigError("longitudinal_increment: eps must be >= 0");
    return dot(velocity_increment(f, kernel, x, e, eps), e);
}

}  // namespace vfmc
