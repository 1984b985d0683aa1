#pragma once

#include <cstdint>
#include <cmath>

#include "vfmc/vec.hpp"

namespace vfmc {

/// SplitMix64 step; used only to derive stream states from (seed, kind, index)
/// keys so that every Monte-Carlo work unit owns an independent generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace detail {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace detail

/// Identifies which estimator / driver a stream belongs to, so that two
/// different tasks never consume the same substream of the master seed.
enum class StreamKind : std::uint64_t {
    generic = 0,
    brownian = 1,
    single_filament = 2,
    ensemble_params = 3,
    ensemble_path = 4,
    nu_sample = 5,
    occupation = 6,
    kernel_check = 7,
    symmetry = 8,
};

/// Counter-based stream: the state is a pure function of
/// (seed, kind, salt, index), never of how other streams were used.
/// Draw order inside one stream is whatever the work unit does sequentially.
class RngStream {
  public:
    RngStream(std::uint64_t seed, StreamKind kind, std::uint64_t salt, std::uint64_t index) {
        std::uint64_t key = seed;
        splitmix64(key);
        key ^= 0x6a09e667f3bcc909ull + static_cast<std::uint64_t>(kind);
        splitmix64(key);
        key ^= 0xbb67ae8584caa73bull + salt;
        splitmix64(key);
        key ^= 0x3c6ef372fe94f82bull + index;
        s_[0] = splitmix64(key);
        s_[1] = splitmix64(key);
        s_[2] = splitmix64(key);
        s_[3] = splitmix64(key);
    }

    /// xoshiro256++ step.
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; handy when a logarithm follows.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Marsaglia's polar method (one spare cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    Vec3 normal3() {
        const double a = normal();
        const double b = normal();
        const double c = normal();
        return {a, b, c};
    }

    /// Uniform point in the closed ball B(0, radius).
    Vec3 uniform_ball(double radius) {
        Vec3 dir = normal3();
        double n = norm(dir);
        while (n == 0.0) {  // probability zero, but keep it total
            dir = normal3();
            n = norm(dir);
        }
        const double r = radius * std::cbrt(uniform());
        return dir * (r / n);
    }

  private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace vfmc
