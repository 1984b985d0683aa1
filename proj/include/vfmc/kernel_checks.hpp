#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vfmc/kernel.hpp"
#include "vfmc/rng.hpp"

namespace vfmc {

struct KernelCheck {
    std::string name;
    double observed = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct KernelCheckReport {
    std::vector<KernelCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

namespace detail {

inline Vec3 fd_gradient(const RadialKernel& k, const Vec3& x, double h) {
    const Vec3 ex{h, 0, 0}, ey{0, h, 0}, ez{0, 0, h};
    return {(k.potential(x + ex) - k.potential(x - ex)) / (2 * h),
            (k.potential(x + ey) - k.potential(x - ey)) / (2 * h),
            (k.potential(x + ez) - k.potential(x - ez)) / (2 * h)};
}

inline Vec3 fd_curl(const RadialKernel& k, const Vec3& x, double h) {
    const Vec3 ex{h, 0, 0}, ey{0, h, 0}, ez{0, 0, h};
    const Vec3 dx = (k(x + ex) - k(x - ex)) / (2 * h);
    const Vec3 dy = (k(x + ey) - k(x - ey)) / (2 * h);
    const Vec3 dz = (k(x + ez) - k(x - ez)) / (2 * h);
    return {dy.z - dz.y, dz.x - dx.z, dx.y - dy.x};
}

inline double fd_divergence(const RadialKernel& k, const Vec3& x, double h) {
    const Vec3 ex{h, 0, 0}, ey{0, h, 0}, ez{0, 0, h};
    return (k(x + ex).x - k(x - ex).x + k(x + ey).y - k(x - ey).y + k(x + ez).z -
            k(x - ez).z) /
           (2 * h);
}

}  // namespace detail

/// Runs the kernel identity suite for one mollifier: rotation equivariance,
/// grad V = K, curl K = 0, div K = rho_ell, the near-field bound uniform in
/// ell and the Lipschitz bound on K_1.
inline KernelCheckReport kernel_check_suite(const MollifierSpec& spec, std::uint64_t seed) {
    KernelCheckReport report;
    RngStream rng(seed, StreamKind::kernel_check, 0, 0);

    {  // rotation equivariance: R K(x) == K(R x)
        RadialKernel k(spec, 0.3);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec3 x = rng.uniform_ball(0.6);
            const Vec3 axis = normalized(rng.normal3());
            const Mat3 rot = rotation_about(axis, 2.0 * rng.uniform() * 3.14159);
            worst = std::max(worst, norm(rot * k(x) - k(rot * x)));
        }
        report.checks.push_back({"rotation equivariance", worst, 1e-12, worst <= 1e-12});
    }
    {  // gradient consistency: FD grad of V matches K to 1e-6 relative
        RadialKernel k(spec, 0.4);
        double worst = 0.0;
        const Vec3 base{0.3, 0.1, 0.0};
        for (int i = 0; i < 24; ++i) {
            const Vec3 x = i == 0 ? base : rng.uniform_ball(0.8);
            if (norm(x) < 0.05) continue;
            const Vec3 g = detail::fd_gradient(k, x, 1e-5);
            const Vec3 v = k(x);
            const double scale = std::max(norm(v), 1e-8);
            worst = std::max(worst, norm(g - v) / scale);
        }
        report.checks.push_back({"gradient consistency (grad V = K)", worst, 1e-6, worst <= 1e-6});
    }
    {  // curl-free at 100 random points
        RadialKernel k(spec, 0.3);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec3 x = rng.uniform_ball(0.6);
            worst = std::max(worst, norm(detail::fd_curl(k, x, 1e-4)));
        }
        report.checks.push_back({"curl-free", worst, 1e-4, worst <= 1e-4});
    }
    {  // div K = rho_ell away from discontinuities of rho
        RadialKernel k(spec, 0.5);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const Vec3 x = rng.uniform_ball(0.9);
            const double r = norm(x) / 0.5;
            if (std::abs(r - 1.0) < 0.02) continue;  // support edge
            const double expected = spec.rho(r);
            worst = std::max(worst, std::abs(detail::fd_divergence(k, x, 1e-4) - expected));
        }
        report.checks.push_back({"divergence = rho_ell", worst, 1e-3, worst <= 1e-3});
    }
    {  // near-field bound sup_{|y|<=ell} |K_ell(y)| <= C ell, uniform in ell
        double worst = 0.0;
        for (double ell : {0.01, 0.1, 1.0}) {
            RadialKernel k(spec, ell);
            for (int i = 0; i < 64; ++i) {
                const Vec3 y = rng.uniform_ball(ell);
                worst = std::max(worst, norm(k(y)) / ell);
            }
        }
        const double bound = std::max(1.0, spec.sup_norm());
        report.checks.push_back({"near-field bound |K_ell|/ell", worst, bound, worst <= bound});
    }
    {  // Lipschitz: finite-difference |grad K_1| bounded by C ||rho||_inf
        RadialKernel k(spec, 1.0);
        double worst = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < 200; ++i) {
            const Vec3 x = rng.uniform_ball(2.0);
            for (const Vec3 dir : {Vec3{h, 0, 0}, Vec3{0, h, 0}, Vec3{0, 0, h}}) {
                worst = std::max(worst, norm(k(x + dir) - k(x - dir)) / (2 * h));
            }
        }
        const double bound = 10.0 * std::max(spec.sup_norm(), 1.0);
        report.checks.push_back({"Lipschitz bound on K_1", worst, bound, worst <= bound});
    }
    return report;
}

}  // namespace vfmc
