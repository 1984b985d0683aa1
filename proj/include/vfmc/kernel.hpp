#pragma once

#include <cmath>
#include <numbers>

#include "vfmc/mollifier.hpp"
#include "vfmc/quadrature.hpp"
#include "vfmc/vec.hpp"

namespace vfmc {

/// Radial Biot-Savart kernel K_ell = grad V_ell for a mollifier rho_ell,
/// where Delta V_ell = rho_ell and rho_ell(x) = rho(x/ell).
///
/// With Q(r) the cumulative charge of rho, Gauss's theorem gives the closed
/// form
///     K_ell(x) = Q(|x|/ell) * ell^3 * x / (4*pi*|x|^3) = g(|x|/ell) * x,
///     g(r) = Q(r) / (4*pi*r^3),   g(0) = rho(0)/3,
/// which satisfies the scaling identity K_ell(y) = ell * K_1(y/ell) and is
/// constant-charge (hence ~|x|^-2) outside B(0, ell). Short-range profiles
/// (Q = 0) make the kernel vanish identically outside B(0, ell).
class RadialKernel {
  public:
    RadialKernel(MollifierSpec spec, double ell) : spec_(std::move(spec)), ell_(ell) {
        if (!(ell > 0.0) || ell > 1.0) {
            throw ConfigError("RadialKernel: thickness ell must be in (0, 1]");
        }
        inv_ell_ = 1.0 / ell;
        total_charge_ = spec_.total_charge();
        short_range_ = spec_.short_range();
        rho0_third_ = spec_.rho(0.0) / 3.0;
    }

    const MollifierSpec& spec() const { return spec_; }
    double ell() const { return ell_; }
    bool short_range() const { return short_range_; }

    /// g(r) = Q(r)/(4 pi r^3); the kernel is K_ell(x) = g(|x|/ell) x.
    double radial_factor(double r) const {
        if (r >= 1.0) {
            if (short_range_) return 0.0;
            return total_charge_ / (4.0 * std::numbers::pi * r * r * r);
        }
        if (r < 1e-6) return rho0_third_;
        return spec_.charge(r) / (4.0 * std::numbers::pi * r * r * r);
    }

    Vec3 operator()(const Vec3& x) const {
        const double d2 = norm2(x);
        if (d2 == 0.0) return {0.0, 0.0, 0.0};
        if (short_range_ && d2 >= ell_ * ell_) return {0.0, 0.0, 0.0};
        const double r = std::sqrt(d2) * inv_ell_;
        return x * radial_factor(r);
    }

    /// Newtonian potential V_ell(x) with V(inf) = 0; grad V_ell = K_ell.
    /// Shell decomposition of the radial Poisson solution:
    ///   V(s) = -[ ell^3 Q(s/ell) / (4 pi s) + int_s^ell rho(u/ell) u du ].
    /// Used as the differentiation oracle for the kernel.
    double potential(const Vec3& x) const {
        const double s = norm(x);
        const double lo = std::min(s, ell_);
        const double shell =
            integrate([&](double u) { return spec_.rho(u * inv_ell_) * u; }, lo, ell_, 1e-12);
        double inner = 0.0;
        if (s > 0.0) {
            inner = ell_ * ell_ * ell_ * spec_.charge(s * inv_ell_) /
                    (4.0 * std::numbers::pi * s);
        }
        return -(inner + shell);
    }

  private:
    MollifierSpec spec_;
    double ell_;
    double inv_ell_;
    double total_charge_;
    double rho0_third_;
    bool short_range_;
};

inline Vec3 kernel_eval(const RadialKernel& kernel, const Vec3& x) { return kernel(x); }

inline double potential_eval(const RadialKernel& kernel, const Vec3& x) {
    return kernel.potential(x);
}

}  // namespace vfmc
