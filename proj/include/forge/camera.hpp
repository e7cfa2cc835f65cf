#pragma once

#include "forge/math.hpp"

namespace forge {

// World-to-camera rotation plus camera center, with shared pinhole
// intrinsics in pixels.
struct PinholeCamera {
    Mat3 rotation; // world-to-camera
    Vec3 center;   // camera position, scene units
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;

    Vec3 to_camera(const Vec3& worldPoint) const { return rotation * (worldPoint - center); }

    // Viewing direction of the optical axis in world space (third camera row).
    Vec3 forward() const {
        return {rotation(2, 0), rotation(2, 1), rotation(2, 2)};
    }
};

// Throws DataError when the rotation is not orthonormal within 1e-6 or the
// intrinsics/sizes are out of range.
void validate_camera(const PinholeCamera& cam);

} // namespace forge
