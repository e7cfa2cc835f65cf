#pragma once

#include "forge/gaussian_cloud.hpp"
#include "forge/camera.hpp"
#include "forge/rng.hpp"

#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace forge::test {

// DC coefficient that activates to the requested channel value under the
// degree-0 color model value = 0.5 + 0.282095.. * dc.
inline float dc_for(float channelValue) {
    return static_cast<float>((channelValue - 0.5) / 0.28209479177387814);
}

inline void append_gaussian(GaussianCloud& cloud, Vec3 pos, Vec3 logScale, float opacityLogit,
                            float r, float g, float b) {
    cloud.positions.insert(cloud.positions.end(),
                           {static_cast<float>(pos.x), static_cast<float>(pos.y),
                            static_cast<float>(pos.z)});
    cloud.logScales.insert(cloud.logScales.end(),
                           {static_cast<float>(logScale.x), static_cast<float>(logScale.y),
                            static_cast<float>(logScale.z)});
    cloud.rotations.insert(cloud.rotations.end(), {1.0f, 0.0f, 0.0f, 0.0f});
    cloud.opacityLogits.push_back(opacityLogit);
    const int basis = cloud.sh_basis_count();
    const float dc[3] = {dc_for(r), dc_for(g), dc_for(b)};
    for (int c = 0; c < 3; ++c) {
        cloud.shCoeffs.push_back(dc[c]);
        for (int k = 1; k < basis; ++k)
            cloud.shCoeffs.push_back(0.0f);
    }
}

// Camera at `center` looking down +z with identity rotation.
inline PinholeCamera look_forward_camera(int size, double focal, Vec3 center = {0, 0, 0}) {
    PinholeCamera cam;
    cam.center = center;
    cam.fx = cam.fy = focal;
    cam.cx = size / 2.0;
    cam.cy = size / 2.0;
    cam.width = cam.height = size;
    return cam;
}

inline GaussianCloud random_cloud(size_t n, int shDegree, uint64_t seed) {
    GaussianCloud cloud;
    cloud.shDegree = shDegree;
    Rng rng(seed);
    const int basis = cloud.sh_basis_count();
    for (size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k)
            cloud.positions.push_back(static_cast<float>(rng.uniform() * 4.0 - 2.0));
        for (int k = 0; k < 3; ++k)
            cloud.logScales.push_back(static_cast<float>(rng.uniform() * 2.0 - 3.0));
        float q[4];
        double norm = 0.0;
        for (float& v : q) {
            v = static_cast<float>(rng.normal());
            norm += double(v) * v;
        }
        norm = std::sqrt(std::max(norm, 1e-9));
        for (const float v : q)
            cloud.rotations.push_back(static_cast<float>(v / norm));
        cloud.opacityLogits.push_back(static_cast<float>(rng.uniform() * 6.0 - 3.0));
        for (int k = 0; k < 3 * basis; ++k)
            cloud.shCoeffs.push_back(static_cast<float>(rng.uniform() - 0.5));
    }
    cloud.validate_and_normalize();
    return cloud;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("forge_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace forge::test
