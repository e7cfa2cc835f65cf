#pragma once

#include "forge/trajectory.hpp"

#include <cstddef>
#include <vector>

namespace forge {

// Finite-difference kinematics of a camera path. Stencil lengths follow the
// forward-difference chain: |v| = T-1, |a| = T-2, |j| = T-3, |S| = T-2,
// |omega| = T-1, |Omega| = T-2.
struct KinematicReport {
    std::vector<Vec3> velocity;
    std::vector<Vec3> acceleration;
    std::vector<double> jerkNorm;     // ||j_t|| / meanStep, scale-invariant
    std::vector<Vec3> angularVelocity;
    std::vector<double> angularAccel; // ||omega_{t+1} - omega_t||
    std::vector<double> dirCos;       // cos angle between v_t and v_{t+1}
    double meanStep = 0.0;
};

KinematicReport kinematics(const CameraTrajectory& traj);

struct FilterConfig {
    double lambda = 4.0; // MAD sensitivity
    bool checkJerk = true;
    bool checkAngularAccel = true;
    bool checkDirConsistency = true;
    // Optional extra MAD pass over the direction-cosine series; the hard
    // S_t < 0 flag is always part of checkDirConsistency.
    bool madOnDirCos = false;
    size_t minSegmentLength = 16;
};

// flag[i] is true when |v_i - median| > lambda * MAD. MAD is floored at
// 1e-12 * (1 + |median|) so constant series reject nothing while a constant
// series plus one spike rejects exactly the spike.
std::vector<bool> mad_filter(const std::vector<double>& values, double lambda);

struct FilterResult {
    std::vector<bool> validFlags;    // per frame
    size_t segmentBegin = 0;          // [begin, end)
    size_t segmentEnd = 0;
};

// A frame is valid iff no enabled metric measurement touching it is flagged.
// Flagged measurements invalidate every frame in their finite-difference
// support. Returns the longest run of valid frames (earliest on ties);
// throws SegmentTooShort when that run is shorter than minSegmentLength.
FilterResult filter_trajectory(const CameraTrajectory& traj, const FilterConfig& config);

} // namespace forge
