#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vfmc/errors.hpp"
#include "vfmc/rng.hpp"

namespace vfmc {

/// One atom of the multifractal parameter measure: on this atom
/// U = ell^h, T = ell^a and ell carries the density ell^-b on (0, l_max].
struct MultifractalAtom {
    double h = 0.0;       ///< scaling exponent of the intensity
    double weight = 1.0;  ///< theta-mass
    double a = 2.0;       ///< T = ell^a, a <= 2 keeps ell^2 <= T
    double b = 4.0;       ///< ell-density exponent
};

/// Parameters drawn from the truncated measure; U and T are exact powers
/// of the sampled ell.
struct SampledParams {
    double intensity = 0.0;  ///< U = ell^h
    double thickness = 0.0;  ///< ell
    double length = 0.0;     ///< T = ell^a
    double h = 0.0;
    double importance_weight = 1.0;
};

namespace detail {
/// int_a^b t^(s-1) dt with the logarithmic branch at s = 0.
inline double power_integral(double s, double a, double b) {
    if (std::abs(s) < 1e-9) return std::log(b / a);
    return (std::pow(b, s) - std::pow(a, s)) / s;
}
}  // namespace detail

/// The measure gamma(dU, dl, dT) = sum_atoms w [delta_{l^h}(U) delta_{l^a}(T) l^-b dl]
/// restricted to l in (0, l_max]. Finitely many atoms: the scaling exponents
/// reduce to a minimum over atoms and every moment has a closed form.
class MultifractalMeasure {
  public:
    MultifractalMeasure(std::vector<MultifractalAtom> atoms, double l_max = 1.0)
        : atoms_(std::move(atoms)), l_max_(l_max) {
        if (atoms_.empty()) throw ConfigError("gamma: needs at least one atom");
        if (!(l_max_ > 0.0) || l_max_ > 1.0) throw ConfigError("gamma: l_max must be in (0, 1]");
        double wsum = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const auto& at = atoms_[i];
            if (!(at.weight > 0.0)) throw ConfigError("gamma: atom weight must be positive");
            if (!(at.h > 0.0)) throw ConfigError("gamma: atom h must be positive");
            if (at.a < 0.0 || at.a > 2.0) throw ConfigError("gamma: need 0 <= a <= 2");
            if (at.b < 0.0) throw ConfigError("gamma: need b >= 0");
            wsum += at.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-6) {
            throw ConfigError("gamma: atom weights must sum to 1");
        }
    }

    static MultifractalMeasure k41() { return MultifractalMeasure({{1.0 / 3.0, 1.0, 2.0, 4.0}}); }

    /// K41 scaling from thin filaments of unit length instead of blobs.
    static MultifractalMeasure k41_thin() {
        return MultifractalMeasure({{1.0 / 3.0, 1.0, 0.0, 2.0}});
    }

    const std::vector<MultifractalAtom>& atoms() const { return atoms_; }
    double l_max() const { return l_max_; }

    /// Largest filament length the measure can produce.
    double max_length() const {
        double t = 0.0;
        for (const auto& at : atoms_) t = std::max(t, std::pow(l_max_, at.a));
        return t;
    }

    /// Z(eta) = gamma(ell > eta), finite for every positive cutoff.
    double total_mass(double eta) const {
        check_eta(eta);
        double z = 0.0;
        for (const auto& at : atoms_) {
            z += at.weight * detail::power_integral(1.0 - at.b, eta, l_max_);
        }
        return z;
    }

    /// Draw (U, ell, T) from the normalized restriction to ell > eta:
    /// atom by its truncated mass, ell by inverse CDF of the power law.
    SampledParams sample(double eta, RngStream& rng) const {
        check_eta(eta);
        double masses_total = 0.0;
        double masses[kMaxAtomsOnStack];
        std::vector<double> masses_heap;
        double* m = masses;
        if (atoms_.size() > kMaxAtomsOnStack) {
            masses_heap.resize(atoms_.size());
            m = masses_heap.data();
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            m[i] = atoms_[i].weight * detail::power_integral(1.0 - atoms_[i].b, eta, l_max_);
            masses_total += m[i];
        }
        double u = rng.uniform() * masses_total;
        std::size_t pick = atoms_.size() - 1;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (u < m[i]) {
                pick = i;
                break;
            }
            u -= m[i];
        }
        const auto& at = atoms_[pick];
        const double v = rng.uniform();
        double ell;
        const double s = 1.0 - at.b;
        if (std::abs(s) < 1e-9) {
            ell = eta * std::pow(l_max_ / eta, v);
        } else {
            const double lo = std::pow(eta, s), hi = std::pow(l_max_, s);
            ell = std::pow(lo + v * (hi - lo), 1.0 / s);
        }
        SampledParams out;
        out.thickness = ell;
        out.intensity = std::pow(ell, at.h);
        out.length = std::pow(ell, at.a);
        out.h = at.h;
        out.importance_weight = 1.0;
        return out;
    }

    /// Exponent of atom i in the small-epsilon moment: h p + 2 + a - b.
    double moment_exponent(std::size_t i, int p) const {
        const auto& at = atoms_[i];
        return at.h * p + 2.0 + at.a - at.b;
    }

    /// gamma[U^p ell T 1_{ell < eps}], exact. Throws DivergentMomentError if
    /// some atom is not integrable at 0, naming the atom.
    double moment_lower(int p, double eps) const {
        check_even_p(p);
        if (!(eps > 0.0) || eps > l_max_ + 1e-15) {
            throw ConfigError("moment_lower: need 0 < eps <= l_max");
        }
        const double ec = std::min(eps, l_max_);
        double out = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const double e = moment_exponent(i, p);
            require_integrable(i, p, e);
            out += atoms_[i].weight * std::pow(ec, e) / e;
        }
        return out;
    }

    /// gamma[U^p ((ell ^ eps)/ell)^p ell T]: the small-ell piece equals the
    /// lower moment and the tail carries the eps^p cap.
    double moment_upper(int p, double eps) const {
        check_even_p(p);
        if (!(eps > 0.0)) throw ConfigError("moment_upper: eps must be positive");
        const double ec = std::min(eps, l_max_);
        double out = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const double e = moment_exponent(i, p);
            require_integrable(i, p, e);
            out += atoms_[i].weight * std::pow(ec, e) / e;
            if (ec < l_max_) {
                const double s = e - p;  // (h-1)p + 2 + a - b
                out += atoms_[i].weight * std::pow(eps, p) *
                       detail::power_integral(s, ec, l_max_);
            }
        }
        return out;
    }

    /// zeta_p = min over atoms of (h p + 2 + a - b) = min_h [h p + 3 - D(h)]
    /// with D = b - a + 1.
    double zeta(int p) const { return moment_exponent(active_atom(p), p); }

    std::size_t active_atom(int p) const {
        std::size_t best = 0;
        double val = moment_exponent(0, p);
        for (std::size_t i = 1; i < atoms_.size(); ++i) {
            const double e = moment_exponent(i, p);
            if (e < val) {
                val = e;
                best = i;
            }
        }
        return best;
    }

  private:
    static constexpr std::size_t kMaxAtomsOnStack = 8;

    void check_eta(double eta) const {
        if (!(eta > 0.0) || eta >= l_max_) {
            throw ConfigError("gamma: cutoff eta must satisfy 0 < eta < l_max");
        }
    }

    static void check_even_p(int p) {
        if (p <= 0 || p % 2 != 0) throw ConfigError("gamma moments: p must be a positive even integer");
    }

    void require_integrable(std::size_t i, int p, double e) const {
        if (e < 1e-9) {
            throw DivergentMomentError(
                "gamma[U^p ell T] diverges at ell -> 0 for atom " + std::to_string(i) +
                " (h=" + std::to_string(atoms_[i].h) + ", a=" + std::to_string(atoms_[i].a) +
                ", b=" + std::to_string(atoms_[i].b) + ") at p=" + std::to_string(p) +
                ": exponent " + std::to_string(e) + " <= 0");
        }
    }

    std::vector<MultifractalAtom> atoms_;
    double l_max_;
};

}  // namespace vfmc
