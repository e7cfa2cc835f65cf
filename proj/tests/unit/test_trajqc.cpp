#include "forge/kinematics.hpp"

#include "forge/error.hpp"
#include "forge/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace forge;

namespace {

Mat3 rot_z(double theta) {
    Mat3 r;
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    return r;
}

CameraTrajectory line_trajectory(size_t frames, Vec3 step = {1, 0, 0}) {
    CameraTrajectory traj;
    for (size_t t = 0; t < frames; ++t)
        traj.frames.push_back({Mat3::identity(), step * double(t)});
    return traj;
}

// Independent reimplementation of the MAD rule: sorted-copy medians, direct
// comparison. Kept free of any library helpers on purpose.
std::vector<bool> brute_force_mad(const std::vector<double>& values, double lambda) {
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const double med = median(values);
    std::vector<double> devs;
    for (const double v : values)
        devs.push_back(std::abs(v - med));
    double mad = median(devs);
    if (mad < 1e-12 * (1.0 + std::abs(med)))
        mad = 1e-12 * (1.0 + std::abs(med));
    std::vector<bool> flags;
    for (const double d : devs)
        flags.push_back(d > lambda * mad);
    return flags;
}

} // namespace

TEST_CASE("constant-velocity line has zero jerk, zero angular accel, unit dir-cos") {
    const KinematicReport report = kinematics(line_trajectory(12));
    CHECK(report.meanStep == doctest::Approx(1.0));
    for (const double j : report.jerkNorm)
        CHECK(j == doctest::Approx(0.0));
    for (const double o : report.angularAccel)
        CHECK(o == doctest::Approx(0.0));
    for (const double s : report.dirCos)
        CHECK(s == doctest::Approx(1.0));
    CHECK(report.velocity.size() == 11);
    CHECK(report.acceleration.size() == 10);
    CHECK(report.jerkNorm.size() == 9);
    CHECK(report.dirCos.size() == 10);
    CHECK(report.angularVelocity.size() == 11);
    CHECK(report.angularAccel.size() == 10);
}

TEST_CASE("constant-rate z rotation yields omega = (0, 0, theta)") {
    const double theta = 0.1;
    CameraTrajectory traj;
    for (size_t t = 0; t < 8; ++t)
        traj.frames.push_back({rot_z(theta * double(t)), {double(t) * 0.01, 0, 0}});
    const KinematicReport report = kinematics(traj);
    for (const Vec3& omega : report.angularVelocity) {
        CHECK(omega.x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(omega.y == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(omega.z == doctest::Approx(theta).epsilon(1e-9));
    }
    for (const double o : report.angularAccel)
        CHECK(o == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("velocity reversal flags a >90 degree turn") {
    CameraTrajectory traj;
    traj.frames.push_back({Mat3::identity(), {0, 0, 0}});
    traj.frames.push_back({Mat3::identity(), {1, 0, 0}});
    traj.frames.push_back({Mat3::identity(), {0, 0, 0}}); // reversal
    traj.frames.push_back({Mat3::identity(), {1, 0, 0}});
    traj.frames.push_back({Mat3::identity(), {2, 0, 0}});
    const KinematicReport report = kinematics(traj);
    CHECK(report.dirCos[0] == doctest::Approx(-1.0));

    FilterConfig config;
    config.checkJerk = false;
    config.checkAngularAccel = false;
    config.minSegmentLength = 1;
    const FilterResult result = filter_trajectory(traj, config);
    CHECK_FALSE(result.validFlags[0]);
    CHECK_FALSE(result.validFlags[1]);
}

TEST_CASE("too few frames raises") {
    CHECK_THROWS_AS(kinematics(line_trajectory(3)), TooFewFrames);
}

TEST_CASE("MAD filter handles degenerate and spiked series") {
    CHECK(mad_filter({2.0, 2.0, 2.0, 2.0}, 4.0) == std::vector<bool>{false, false, false, false});
    // MAD collapses to the epsilon floor; only the spike exceeds it.
    CHECK(mad_filter({1, 1, 1, 1, 100}, 4.0) ==
          std::vector<bool>{false, false, false, false, true});
}

TEST_CASE("MAD filter rejects under 1% of clean gaussian noise at lambda 5") {
    Rng rng(2718);
    std::vector<double> series(10000);
    for (double& v : series)
        v = rng.normal();
    const std::vector<bool> flags = mad_filter(series, 5.0);
    const size_t rejected = static_cast<size_t>(std::count(flags.begin(), flags.end(), true));
    CHECK(double(rejected) / double(series.size()) < 0.01);
}

TEST_CASE("MAD filter matches the brute-force oracle on random series") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 3 + static_cast<size_t>(rng.below(60));
        std::vector<double> series(n);
        for (double& v : series)
            v = rng.normal() * (1.0 + rng.uniform() * 10.0);
        if (rng.bernoulli(0.5))
            series[rng.below(n)] += 100.0; // spike
        const double lambda = 3.5 + rng.uniform() * 1.5;
        CHECK(mad_filter(series, lambda) == brute_force_mad(series, lambda));
    }
}

TEST_CASE("smooth trajectory keeps the whole range") {
    FilterConfig config;
    config.minSegmentLength = 1;
    const FilterResult result = filter_trajectory(line_trajectory(30), config);
    CHECK(result.segmentBegin == 0);
    CHECK(result.segmentEnd == 30);
}

TEST_CASE("a single spike carves out its stencil footprint") {
    CameraTrajectory traj = line_trajectory(30);
    traj.frames[10].center.y += 5.0; // position spike

    FilterConfig config;
    config.minSegmentLength = 1;
    config.checkAngularAccel = false;
    config.checkDirConsistency = false;
    const FilterResult result = filter_trajectory(traj, config);

    // Jerk touches frames t..t+3, and the spike perturbs jerk indices 7..10,
    // so frames 7..13 form the rejection footprint.
    for (size_t f = 0; f < 30; ++f) {
        const bool expectValid = f < 7 || f > 13;
        CHECK(result.validFlags[f] == expectValid);
    }
    CHECK(result.segmentBegin == 14);
    CHECK(result.segmentEnd == 30);
}

TEST_CASE("two spikes leave the longer middle run") {
    CameraTrajectory traj = line_trajectory(40);
    traj.frames[5].center.y += 4.0;
    traj.frames[25].center.y += 4.0;

    FilterConfig config;
    config.minSegmentLength = 1;
    const FilterResult result = filter_trajectory(traj, config);
    CHECK(result.segmentBegin == 9);
    CHECK(result.segmentEnd == 22);
}

TEST_CASE("segment shorter than the minimum raises SegmentTooShort") {
    CameraTrajectory traj = line_trajectory(12);
    traj.frames[6].center.y += 4.0;
    FilterConfig config;
    config.minSegmentLength = 10;
    CHECK_THROWS_AS(filter_trajectory(traj, config), SegmentTooShort);
}

TEST_CASE("metrics are scale invariant") {
    Rng rng(99);
    CameraTrajectory traj = line_trajectory(25);
    for (auto& frame : traj.frames) {
        frame.center.y += 0.05 * rng.normal();
        frame.center.z += 0.05 * rng.normal();
    }
    traj.frames[12].center.x += 3.0;

    CameraTrajectory scaled = traj;
    for (auto& frame : scaled.frames)
        frame.center = frame.center * 37.5;

    FilterConfig config;
    config.minSegmentLength = 1;
    const FilterResult a = filter_trajectory(traj, config);
    const FilterResult b = filter_trajectory(scaled, config);
    CHECK(a.validFlags == b.validFlags);
    CHECK(a.segmentBegin == b.segmentBegin);
    CHECK(a.segmentEnd == b.segmentEnd);

    const KinematicReport ra = kinematics(traj);
    const KinematicReport rb = kinematics(scaled);
    for (size_t i = 0; i < ra.jerkNorm.size(); ++i)
        CHECK(ra.jerkNorm[i] == doctest::Approx(rb.jerkNorm[i]).epsilon(1e-9));
    for (size_t i = 0; i < ra.dirCos.size(); ++i)
        CHECK(ra.dirCos[i] == doctest::Approx(rb.dirCos[i]).epsilon(1e-9));
}

TEST_CASE("metrics are invariant to a global rigid motion") {
    Rng rng(123);
    CameraTrajectory traj;
    for (size_t t = 0; t < 20; ++t)
        traj.frames.push_back(
            {rot_z(0.02 * double(t)), {double(t), 0.1 * rng.normal(), 0.0}});
    traj.frames[9].center.z += 2.5;

    // World transform x -> Q x + b; world-to-camera rotations pick up Q^T.
    const Mat3 q = rot_z(0.7);
    const Vec3 b{5.0, -2.0, 3.0};
    CameraTrajectory moved = traj;
    for (auto& frame : moved.frames) {
        frame.center = q * frame.center + b;
        frame.rotation = frame.rotation * q.transposed();
    }

    FilterConfig config;
    config.minSegmentLength = 1;
    const FilterResult a = filter_trajectory(traj, config);
    const FilterResult c = filter_trajectory(moved, config);
    CHECK(a.validFlags == c.validFlags);
    CHECK(a.segmentBegin == c.segmentBegin);
    CHECK(a.segmentEnd == c.segmentEnd);
}
