#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vfmc/ensemble.hpp"
#include "vfmc/estimators.hpp"
#include "vfmc/stats.hpp"

namespace vfmc {

struct SymmetryCheck {
    std::string name;
    double value = 0.0;      ///< the tested statistic (difference or moment)
    double std_error = 0.0;
    double z = 0.0;          ///< value / std_error for z-type rows
    double threshold = 3.0;
    bool pass = false;
    std::string kind = "z";  ///< "z" or "ks"
};

struct SymmetryReport {
    std::vector<SymmetryCheck> checks;
    std::int64_t realizations = 0;

    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

struct SymmetryProbes {
    Vec3 x_center{0.0, 0.0, 0.0};
    Vec3 x_shift{0.3, 0.2, 0.1};
    Vec3 e{1.0, 0.0, 0.0};
    double rotation_angle = 1.2;           ///< about the z axis
};

/// Matched two-sample tests of the field symmetries on one set of ensemble
/// realizations: homogeneity (translated probe), isotropy (rotated probe and
/// the covariance of u at a centered probe) and the reflection symmetry that
/// kills odd longitudinal moments.
inline SymmetryReport symmetry_suite(const MultifractalMeasure& gamma,
                                     const LocalizationWindow& window, const MollifierSpec& spec,
                                     const SymmetryProbes& probes, std::int64_t realizations,
                                     const McOptions& mc, double z_threshold = 3.0) {
    const Mat3 rot = rotation_about({0.0, 0.0, 1.0}, probes.rotation_angle);
    const Vec3 re = rot * probes.e;
    const Vec3 rx = rot * probes.x_shift;

    ProbeSpec margin_probe;
    margin_probe.x = probes.x_shift;
    margin_probe.eps_grid = {0.0};
    check_probe_margin(gamma, window, margin_probe, mc.r0_margin);

    // probes: center, shifted, rotated-shifted
    const Vec3 points[3] = {probes.x_center, probes.x_shift, rx};

    enum Stat {
        kHomDiff = 0,     // <u(xA),e>^2 - <u(xB),e>^2
        kRotDiff,         // <u(xB),e>^2 - <u(R xB),Re>^2
        kMean1,           // <u(xA),e>
        kMean3,           // <u(xA),e>^3
        kCovXY,
        kCovXZ,
        kCovYZ,
        kVarXmY,          // u_x^2 - u_y^2
        kVarYmZ,          // u_y^2 - u_z^2
        kStatCount
    };
    const std::size_t n_chunks = chunk_count(realizations, mc.chunk_size);
    std::vector<std::vector<BatchAccumulator>> partials(
        n_chunks, std::vector<BatchAccumulator>(kStatCount, BatchAccumulator(mc.batches)));
    // per-half samples for the KS row (split by parity of the realization)
    std::vector<std::vector<double>> ks_a(n_chunks), ks_b(n_chunks);

    run_chunked(realizations, mc.chunk_size, mc.workers, [&](const ChunkRange& chunk) {
        auto& accs = partials[chunk.index];
        std::vector<Vec3> field(3);
        std::vector<Vec3> scratch;
        for (std::int64_t r = chunk.begin; r < chunk.end; ++r) {
            const EnsembleRealization real =
                sample_ensemble(gamma, window, mc.step, mc.seed, static_cast<std::uint64_t>(r));
            field_at_many(real, spec, points, 3, field.data(), scratch);
            const Vec3 ua = field[0], ub = field[1], ur = field[2];
            const double la = dot(ua, probes.e);
            const double lb = dot(ub, probes.e);
            const double lr = dot(ur, re);
            const int batch = BatchAccumulator::batch_of(r, realizations, mc.batches);
            accs[kHomDiff].add(batch, la * la - lb * lb);
            accs[kRotDiff].add(batch, lb * lb - lr * lr);
            accs[kMean1].add(batch, la);
            accs[kMean3].add(batch, la * la * la);
            accs[kCovXY].add(batch, ua.x * ua.y);
            accs[kCovXZ].add(batch, ua.x * ua.z);
            accs[kCovYZ].add(batch, ua.y * ua.z);
            accs[kVarXmY].add(batch, ua.x * ua.x - ua.y * ua.y);
            accs[kVarYmZ].add(batch, ua.y * ua.y - ua.z * ua.z);
            if (r % 2 == 0) {
                ks_a[chunk.index].push_back(lb);
            } else {
                ks_b[chunk.index].push_back(lr);
            }
        }
    });

    std::vector<BatchAccumulator> totals(kStatCount, BatchAccumulator(mc.batches));
    for (const auto& part : partials) {
        for (int s = 0; s < kStatCount; ++s) totals[static_cast<std::size_t>(s)].merge(part[s]);
    }
    std::vector<double> sample_a, sample_b;
    for (const auto& v : ks_a) sample_a.insert(sample_a.end(), v.begin(), v.end());
    for (const auto& v : ks_b) sample_b.insert(sample_b.end(), v.begin(), v.end());

    SymmetryReport report;
    report.realizations = realizations;
    auto add_z = [&](const std::string& name, Stat s) {
        const auto& acc = totals[static_cast<std::size_t>(s)];
        SymmetryCheck c;
        c.name = name;
        c.value = acc.mean();
        c.std_error = acc.std_error();
        c.z = c.std_error > 0.0 ? c.value / c.std_error : 0.0;
        c.threshold = z_threshold;
        c.pass = std::abs(c.z) <= c.threshold;
        report.checks.push_back(c);
    };
    add_z("homogeneity: second moment, center vs shifted", kHomDiff);
    add_z("isotropy: second moment, probe vs rotated probe", kRotDiff);
    add_z("reflection: first longitudinal moment", kMean1);
    add_z("reflection: third longitudinal moment", kMean3);
    add_z("isotropy: covariance xy", kCovXY);
    add_z("isotropy: covariance xz", kCovXZ);
    add_z("isotropy: covariance yz", kCovYZ);
    add_z("isotropy: variance x vs y", kVarXmY);
    add_z("isotropy: variance y vs z", kVarYmZ);

    SymmetryCheck ks;
    ks.name = "isotropy: KS of <u,e> vs rotated (split halves)";
    ks.kind = "ks";
    ks.value = ks_statistic(sample_a, sample_b);
    ks.std_error = 0.0;
    ks.z = ks.value;
    ks.threshold = 1.95;  // Kolmogorov 99.9% quantile
    ks.pass = ks.value <= ks.threshold;
    report.checks.push_back(ks);
    return report;
}

}  // namespace vfmc
