#include "forge/kinematics.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <cmath>

namespace forge {

namespace {

constexpr double kZeroVelocity = 1e-9;

double median_of(std::vector<double> values) {
    const size_t n = values.size();
    const size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    double m = values[mid];
    if (n % 2 == 0) {
        std::nth_element(values.begin(), values.begin() + static_cast<long>(mid) - 1,
                         values.begin() + static_cast<long>(mid));
        m = 0.5 * (m + values[mid - 1]);
    }
    return m;
}

} // namespace

KinematicReport kinematics(const CameraTrajectory& traj) {
    const size_t t = traj.size();
    if (t < 4)
        throw TooFewFrames("kinematics needs at least 4 frames, got " + std::to_string(t));

    KinematicReport report;
    report.velocity.reserve(t - 1);
    for (size_t i = 0; i + 1 < t; ++i)
        report.velocity.push_back(traj.frames[i + 1].center - traj.frames[i].center);

    report.acceleration.reserve(t - 2);
    for (size_t i = 0; i + 1 < report.velocity.size(); ++i)
        report.acceleration.push_back(report.velocity[i + 1] - report.velocity[i]);

    double stepSum = 0.0;
    for (const Vec3& v : report.velocity)
        stepSum += norm(v);
    report.meanStep = stepSum / static_cast<double>(report.velocity.size());
    const double stepFloor = std::max(report.meanStep, 1e-12);

    report.jerkNorm.reserve(t - 3);
    for (size_t i = 0; i + 1 < report.acceleration.size(); ++i)
        report.jerkNorm.push_back(norm(report.acceleration[i + 1] - report.acceleration[i]) /
                                  stepFloor);

    report.angularVelocity.reserve(t - 1);
    for (size_t i = 0; i + 1 < t; ++i) {
        const Mat3 delta = traj.frames[i + 1].rotation * traj.frames[i].rotation.transposed();
        report.angularVelocity.push_back(axis_angle_from_rotation(delta));
    }

    report.angularAccel.reserve(t - 2);
    for (size_t i = 0; i + 1 < report.angularVelocity.size(); ++i)
        report.angularAccel.push_back(
            norm(report.angularVelocity[i + 1] - report.angularVelocity[i]));

    report.dirCos.reserve(t - 2);
    for (size_t i = 0; i + 1 < report.velocity.size(); ++i) {
        const double na = norm(report.velocity[i]);
        const double nb = norm(report.velocity[i + 1]);
        if (na < kZeroVelocity || nb < kZeroVelocity) {
            // Stationary cameras are smooth; treated as a perfect pass.
            report.dirCos.push_back(1.0);
        } else {
            report.dirCos.push_back(dot(report.velocity[i], report.velocity[i + 1]) / (na * nb));
        }
    }
    return report;
}

std::vector<bool> mad_filter(const std::vector<double>& values, double lambda) {
    if (values.empty())
        throw DataError("mad_filter needs a non-empty series");
    const double median = median_of(values);
    std::vector<double> deviations(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        deviations[i] = std::abs(values[i] - median);
    double mad = median_of(deviations);
    mad = std::max(mad, 1e-12 * (1.0 + std::abs(median)));

    std::vector<bool> flags(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        flags[i] = deviations[i] > lambda * mad;
    return flags;
}

FilterResult filter_trajectory(const CameraTrajectory& traj, const FilterConfig& config) {
    if (!(config.lambda > 0.0))
        throw ConfigError("MAD lambda must be positive");
    const size_t t = traj.size();
    const KinematicReport report = kinematics(traj);

    FilterResult result;
    result.validFlags.assign(t, true);

    const auto invalidate = [&](size_t first, size_t last) {
        for (size_t f = first; f <= last && f < t; ++f)
            result.validFlags[f] = false;
    };

    if (config.checkJerk && !report.jerkNorm.empty()) {
        const std::vector<bool> flags = mad_filter(report.jerkNorm, config.lambda);
        for (size_t i = 0; i < flags.size(); ++i)
            if (flags[i])
                invalidate(i, i + 3); // jerk at i spans frames i .. i+3
    }
    if (config.checkAngularAccel && !report.angularAccel.empty()) {
        const std::vector<bool> flags = mad_filter(report.angularAccel, config.lambda);
        for (size_t i = 0; i < flags.size(); ++i)
            if (flags[i])
                invalidate(i, i + 2); // Omega at i spans frames i .. i+2
    }
    if (config.checkDirConsistency) {
        for (size_t i = 0; i < report.dirCos.size(); ++i)
            if (report.dirCos[i] < 0.0)
                invalidate(i, i + 2); // > 90 degree turn
        if (config.madOnDirCos && !report.dirCos.empty()) {
            const std::vector<bool> flags = mad_filter(report.dirCos, config.lambda);
            for (size_t i = 0; i < flags.size(); ++i)
                if (flags[i])
                    invalidate(i, i + 2);
        }
    }

    // Longest run of valid frames, earliest on ties.
    size_t bestBegin = 0, bestLen = 0, runBegin = 0, runLen = 0;
    for (size_t i = 0; i <= t; ++i) {
        if (i < t && result.validFlags[i]) {
            if (runLen == 0)
                runBegin = i;
            ++runLen;
        } else {
            if (runLen > bestLen) {
                bestLen = runLen;
                bestBegin = runBegin;
            }
            runLen = 0;
        }
    }
    result.segmentBegin = bestBegin;
    result.segmentEnd = bestBegin + bestLen;
    if (bestLen < config.minSegmentLength)
        throw SegmentTooShort("longest valid segment has " + std::to_string(bestLen) +
                              " frames, need " + std::to_string(config.minSegmentLength));
    return result;
}

} // namespace forge
