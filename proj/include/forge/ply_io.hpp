#pragma once

#include "forge/gaussian_cloud.hpp"

#include <string>

namespace forge {

// Binary little-endian PLY with the standard 3DGS checkpoint layout:
// x,y,z, nx,ny,nz (zeros on write, ignored on read), f_dc_0..2,
// f_rest_* (channel-major), opacity, scale_0..2, rot_0..3 (w,x,y,z),
// all float32. Round trips are bit-exact on stored values.
GaussianCloud load_ply(const std::string& path);
void save_ply(const GaussianCloud& cloud, const std::string& path);

} // namespace forge
