#pragma once

#include "forge/image.hpp"
#include "forge/metrics.hpp"

#include <vector>

namespace forge {

// Per-frame artifact intensity maps in [0, 1]. The first and last frames are
// identically zero after annotation: boundary frames are ground-truth sparse
// views, hence artifact-free by construction.
struct HeatmapVolume {
    std::vector<GrayMap> frames;

    size_t size() const { return frames.size(); }
};

// Pseudo-ground-truth annotation: per-frame metric maps, min-max normalized
// to [0, 1] over the whole clip, boundary frames forced to zero.
HeatmapVolume annotate(const Video& degraded, const Video& clean,
                       const PerceptualMetric& metric);

} // namespace forge
