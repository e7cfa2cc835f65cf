#pragma once

#include "forge/camera.hpp"
#include "forge/math.hpp"

#include <string>
#include <vector>

namespace forge {

// Ordered per-frame camera poses with shared intrinsics. Inter-frame spacing
// is one frame unit; there are no timestamps.
struct CameraTrajectory {
    struct Frame {
        Mat3 rotation; // world-to-camera
        Vec3 center;
    };
    struct Intrinsics {
        double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
        int width = 1, height = 1;
    };

    std::vector<Frame> frames;
    Intrinsics intrinsics;

    size_t size() const { return frames.size(); }

    PinholeCamera camera(size_t i) const {
        PinholeCamera cam;
        cam.rotation = frames[i].rotation;
        cam.center = frames[i].center;
        cam.fx = intrinsics.fx;
        cam.fy = intrinsics.fy;
        cam.cx = intrinsics.cx;
        cam.cy = intrinsics.cy;
        cam.width = intrinsics.width;
        cam.height = intrinsics.height;
        return cam;
    }
};

// JSON file: {"intrinsics": {...}, "frames": [{"R": [9, row-major], "C": [3]}]}.
CameraTrajectory load_trajectory(const std::string& path);
void save_trajectory(const CameraTrajectory& traj, const std::string& path);

} // namespace forge
