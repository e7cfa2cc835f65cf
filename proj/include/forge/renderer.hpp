#pragma once

#include "forge/camera.hpp"
#include "forge/gaussian_cloud.hpp"
#include "forge/image.hpp"

#include <array>
#include <cstddef>

namespace forge {

struct RenderSettings {
    std::array<float, 3> background{0.0f, 0.0f, 0.0f};
    double alphaCutoff = 1.0 / 255.0;    // minimum per-splat alpha contribution
    double gaussianRadiusSigma = 3.0;    // truncation radius in standard deviations
    // Optional diagonal floor (px^2) on the projected covariance. Off by
    // default: the aliasing degradation depends on unfiltered footprints.
    bool lowpassFilter = false;
    double lowpassFloor = 0.3;
    int threads = 0; // 0 = hardware concurrency
};

// Projection of one Gaussian: pixel-space mean, 2x2 covariance
// [[a, b], [b, c]], and camera-space depth. culled marks splats behind the
// near plane.
struct Projected {
    bool culled = true;
    Vec2 mean2d;
    double covA = 0.0, covB = 0.0, covC = 0.0;
    double depth = 0.0;
};

Projected project(const GaussianCloud& cloud, size_t index, const PinholeCamera& cam,
                  const RenderSettings& settings = {});

Image render(const GaussianCloud& cloud, const PinholeCamera& cam,
             const RenderSettings& settings = {});

// Render plus the per-pixel compositing diagnostics used by the conservation
// checks: accumulated splat weight and final transmittance.
struct RenderDiagnostics {
    Image image;
    GrayMap weightSum;
    GrayMap transmittance;
};

RenderDiagnostics render_with_diagnostics(const GaussianCloud& cloud, const PinholeCamera& cam,
                                          const RenderSettings& settings = {});

// View-dependent color of one Gaussian from its SH coefficients, clamped to
// [0, 1]. direction is the unit vector from the camera center to the splat.
std::array<float, 3> evaluate_sh_color(const GaussianCloud& cloud, size_t index,
                                       const Vec3& direction);

} // namespace forge
