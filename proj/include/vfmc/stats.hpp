#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vfmc/errors.hpp"

namespace vfmc {

/// Batch-means accumulator: sample i of n goes to batch floor(i*B/n).
/// The standard error comes from the spread of batch means, which stays
/// honest for heavy-tailed high-order moments.
class BatchAccumulator {
  public:
    explicit BatchAccumulator(int n_batches = 16)
        : sums_(static_cast<std::size_t>(n_batches), 0.0),
          counts_(static_cast<std::size_t>(n_batches), 0) {}

    static int batch_of(std::int64_t i, std::int64_t n, int n_batches) {
        return static_cast<int>((i * n_batches) / n);
    }

    void add(int batch, double value) {
        sums_[static_cast<std::size_t>(batch)] += value;
        counts_[static_cast<std::size_t>(batch)] += 1;
    }

    /// Merge partials in a fixed caller-controlled order.
    void merge(const BatchAccumulator& other) {
        for (std::size_t b = 0; b < sums_.size(); ++b) {
            sums_[b] += other.sums_[b];
            counts_[b] += other.counts_[b];
        }
    }

    std::int64_t count() const {
        std::int64_t n = 0;
        for (auto c : counts_) n += c;
        return n;
    }

    double mean() const {
        double s = 0.0;
        for (auto v : sums_) s += v;
        const std::int64_t n = count();
        return n > 0 ? s / static_cast<double>(n) : 0.0;
    }

    /// Standard error of the mean from batch means.
    double std_error() const {
        const double m = mean();
        int used = 0;
        double ss = 0.0;
        for (std::size_t b = 0; b < sums_.size(); ++b) {
            if (counts_[b] == 0) continue;
            const double bm = sums_[b] / static_cast<double>(counts_[b]);
            ss += (bm - m) * (bm - m);
            ++used;
        }
        if (used < 2) return 0.0;
        return std::sqrt(ss / static_cast<double>(used) / static_cast<double>(used - 1));
    }

  private:
    std::vector<double> sums_;
    std::vector<std::int64_t> counts_;
};

struct PointEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

inline double z_score(const PointEstimate& est, double reference) {
    if (est.std_error <= 0.0) return est.mean == reference ? 0.0 : 1e300;
    return (est.mean - reference) / est.std_error;
}

inline double joint_z(const PointEstimate& a, const PointEstimate& b) {
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    if (se <= 0.0) return a.mean == b.mean ? 0.0 : 1e300;
    return (a.mean - b.mean) / se;
}

struct ScalingFit {
    double zeta_hat = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double fit_min = 0.0;
    double fit_max = 0.0;
    int points = 0;
};

struct FitPoint {
    double eps = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Weighted least squares of log(mean) on log(eps). Weights come from the
/// relative standard errors (delta method); exact inputs get unit weights.
/// Requires at least 3 usable points with positive means inside the range.
inline ScalingFit fit_zeta(const std::vector<FitPoint>& grid, double eps_min, double eps_max) {
    std::vector<double> xs, ys, ws;
    for (const auto& pt : grid) {
        if (pt.eps < eps_min * (1.0 - 1e-12) || pt.eps > eps_max * (1.0 + 1e-12)) continue;
        if (!(pt.mean > 0.0)) {
            throw FitDomainError("fit_zeta: non-positive mean at eps=" + std::to_string(pt.eps) +
                                 "; increase the sample budget");
        }
        xs.push_back(std::log(pt.eps));
        ys.push_back(std::log(pt.mean));
        const double rel = pt.std_error > 0.0 ? pt.std_error / pt.mean : 0.0;
        ws.push_back(rel > 0.0 ? 1.0 / (rel * rel) : -1.0);
    }
    if (xs.size() < 3) {
        throw FitDomainError("fit_zeta: fewer than 3 grid points in [" + std::to_string(eps_min) +
                             ", " + std::to_string(eps_max) + "]");
    }
    // unit weights when any point lacks an error bar
    bool weighted = true;
    for (double w : ws) {
        if (w <= 0.0) weighted = false;
    }
    if (!weighted) std::fill(ws.begin(), ws.end(), 1.0);

    double W = 0.0, Sx = 0.0, Sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        W += ws[i];
        Sx += ws[i] * xs[i];
        Sy += ws[i] * ys[i];
    }
    const double xbar = Sx / W, ybar = Sy / W;
    double Sxx = 0.0, Sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        Sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
    }
    ScalingFit fit;
    fit.zeta_hat = Sxy / Sxx;
    fit.intercept = ybar - fit.zeta_hat * xbar;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.zeta_hat * xs[i]);
        ss_res += ws[i] * r * r;
        ss_tot += ws[i] * (ys[i] - ybar) * (ys[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    if (weighted) {
        fit.std_error = std::sqrt(1.0 / Sxx);
    } else {
        const auto dof = static_cast<double>(xs.size()) - 2.0;
        fit.std_error = dof > 0.0 ? std::sqrt((ss_res / dof) / Sxx) : 0.0;
    }
    fit.fit_min = eps_min;
    fit.fit_max = eps_max;
    fit.points = static_cast<int>(xs.size());
    return fit;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

/// Scaled KS statistic sqrt(nm/(n+m)) * D; under equality it follows the
/// Kolmogorov distribution (95% quantile 1.36, 99.9% about 1.95).
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
    return std::sqrt(n * m / (n + m)) * ks_distance(a, b);
}

}  // namespace vfmc
