#pragma once

#include "forge/camera.hpp"
#include "forge/trajectory.hpp"

namespace forge {

// Reference-guided spherical path between two sparse training views: a blend
// from the start view onto a sphere, a great-circle arc, and a blend down to
// the end view. sphereCenter defaults to the midpoint of the closest points
// between the two optical-axis rays.
struct TrajectorySpec {
    PinholeCamera startView;
    PinholeCamera endView;
    int nIntermediate = 0;
    bool hasSphereCenter = false;
    Vec3 sphereCenter;
};

// First frame equals startView and last frame equals endView bit-exactly.
// Throws DegenerateGeometry for coincident cameras.
CameraTrajectory spherical_trajectory(const TrajectorySpec& spec);

} // namespace forge
