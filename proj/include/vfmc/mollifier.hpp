#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "vfmc/errors.hpp"

namespace vfmc {

enum class ProfileKind { indicator, zero_charge_quadratic, tabulated_radial };

/// Radial mollifier profile rho(r), bounded, supported in the unit ball.
/// The total charge Q = Q(1) decides the kernel regime: Q != 0 gives the
/// long-range far field, Q = 0 gives a kernel vanishing outside B(0, ell).
///
/// Built-ins:
///   indicator               rho = 1 on [0,1],            Q = 4*pi/3
///   zero_charge_quadratic   rho(r) = 1 - (5/3) r^2,      Q = 0
/// Tabulated profiles are resampled on a uniform radial grid and their
/// cumulative charge is interpolated with a monotone (Fritsch-Carlson)
/// cubic, which is cheap because Q is smooth and piecewise monotone.
class MollifierSpec {
  public:
    static MollifierSpec indicator() { return MollifierSpec(ProfileKind::indicator); }

    static MollifierSpec zero_charge_quadratic() {
        return MollifierSpec(ProfileKind::zero_charge_quadratic);
    }

    /// `table` holds (r, rho(r)) pairs with r in [0, 1].
    static MollifierSpec tabulated(std::vector<std::pair<double, double>> table) {
        MollifierSpec spec(ProfileKind::tabulated_radial);
        if (table.size() < 2) {
            throw ConfigError("mollifier table needs at least 2 points");
        }
        for (const auto& [r, v] : table) {
            if (!std::isfinite(r) || !std::isfinite(v)) {
                throw ConfigError("mollifier table contains non-finite values");
            }
            if (r < 0.0 || r > 1.0) {
                throw ConfigError("mollifier table radius outside [0, 1]");
            }
        }
        std::sort(table.begin(), table.end());
        spec.table_ = std::move(table);
        spec.build_charge_table();
        spec.sup_norm_ = 0.0;
        for (const auto& [r, v] : spec.table_) {
            spec.sup_norm_ = std::max(spec.sup_norm_, std::abs(v));
        }
        return spec;
    }

    ProfileKind kind() const { return kind_; }

    /// rho(r); zero for r > 1 (compact support).
    double rho(double r) const {
        if (r > 1.0) return 0.0;
        switch (kind_) {
            case ProfileKind::indicator:
                return 1.0;
            case ProfileKind::zero_charge_quadratic:
                return 1.0 - (5.0 / 3.0) * r * r;
            case ProfileKind::tabulated_radial:
                return rho_tabulated(r);
        }
        return 0.0;
    }

    double sup_norm() const { return sup_norm_; }

    /// Cumulative charge Q(r) = integral of rho over B(0, min(r, 1)).
    /// Closed form for the built-ins, interpolated table otherwise.
    double charge(double r) const {
        if (r <= 0.0) return 0.0;
        const double rc = std::min(r, 1.0);
        switch (kind_) {
            case ProfileKind::indicator:
                return (4.0 * std::numbers::pi / 3.0) * rc * rc * rc;
            case ProfileKind::zero_charge_quadratic:
                // 4*pi * int_0^r (1 - (5/3)s^2) s^2 ds = (4*pi/3) r^3 (1 - r^2)
                return (4.0 * std::numbers::pi / 3.0) * rc * rc * rc * (1.0 - rc * rc);
            case ProfileKind::tabulated_radial:
                return charge_tabulated(rc);
        }
        return 0.0;
    }

    double total_charge() const { return charge(1.0); }

    bool short_range() const { return std::abs(total_charge()) < 1e-12; }

    std::string name() const {
        switch (kind_) {
            case ProfileKind::indicator: return "indicator";
            case ProfileKind::zero_charge_quadratic: return "zero_charge_quadratic";
            case ProfileKind::tabulated_radial: return "tabulated";
        }
        return "?";
    }

  private:
    explicit MollifierSpec(ProfileKind kind) : kind_(kind) {}

    double rho_tabulated(double r) const {
        // linear interpolation of the user table, constant extrapolation at the ends
        if (r <= table_.front().first) return table_.front().second;
        if (r >= table_.back().first) return table_.back().second;
        auto it = std::upper_bound(table_.begin(), table_.end(), std::make_pair(r, 1e300));
        const auto& [r1, v1] = *it;
        const auto& [r0, v0] = *(it - 1);
        const double w = (r - r0) / (r1 - r0);
        return v0 + w * (v1 - v0);
    }

    void build_charge_table() {
        // cumulative Simpson of 4*pi*rho(s)*s^2 on the uniform grid
        grid_q_.assign(kGridSize, 0.0);
        const double h = 1.0 / (kGridSize - 1);
        auto f = [&](double s) { return 4.0 * std::numbers::pi * rho_tabulated(s) * s * s; };
        for (int i = 1; i < kGridSize; ++i) {
            const double a = (i - 1) * h, b = i * h;
            grid_q_[i] = grid_q_[i - 1] + (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        // Fritsch-Carlson derivatives keep the interpolant monotone on
        // monotone stretches of Q
        grid_d_.assign(kGridSize, 0.0);
        std::vector<double> slope(kGridSize - 1);
        for (int i = 0; i + 1 < kGridSize; ++i) slope[i] = (grid_q_[i + 1] - grid_q_[i]) / h;
        grid_d_[0] = 0.0;  // Q'(0) = 0 since rho is bounded
        grid_d_[kGridSize - 1] = slope[kGridSize - 2];
        for (int i = 1; i + 1 < kGridSize; ++i) {
            if (slope[i - 1] * slope[i] <= 0.0) {
                grid_d_[i] = 0.0;
            } else {
                grid_d_[i] = 2.0 * slope[i - 1] * slope[i] / (slope[i - 1] + slope[i]);
            }
        }
    }

    double charge_tabulated(double r) const {
        const double h = 1.0 / (kGridSize - 1);
        const int i = std::min(static_cast<int>(r / h), kGridSize - 2);
        const double t = (r - i * h) / h;
        const double q0 = grid_q_[i], q1 = grid_q_[i + 1];
        const double d0 = grid_d_[i] * h, d1 = grid_d_[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * q0 + (t3 - 2 * t2 + t) * d0 +
               (-2 * t3 + 3 * t2) * q1 + (t3 - t2) * d1;
    }

    static constexpr int kGridSize = 1024;

    ProfileKind kind_;
    double sup_norm_ = 1.0;
    std::vector<std::pair<double, double>> table_;
    std::vector<double> grid_q_;
    std::vector<double> grid_d_;
};

/// Q(r) as a free operation on a spec.
inline double charge_profile(const MollifierSpec& spec, double r) {
    if (r < 0.0) throw ConfigError("charge_profile: radius must be >= 0");
    return spec.charge(r);
}

}  // namespace vfmc
