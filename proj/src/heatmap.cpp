#include "forge/heatmap.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace forge {

HeatmapVolume annotate(const Video& degraded, const Video& clean,
                       const PerceptualMetric& metric) {
    if (degraded.size() != clean.size())
        throw LengthMismatch("video lengths differ: " + std::to_string(degraded.size()) +
                             " vs " + std::to_string(clean.size()));
    HeatmapVolume volume;
    if (degraded.empty())
        return volume;

    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    volume.frames.reserve(degraded.size());
    for (size_t i = 0; i < degraded.size(); ++i) {
        GrayMap map = metric.compute(degraded[i], clean[i]);
        for (const float v : map.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        volume.frames.push_back(std::move(map));
    }

    // Per-clip min-max normalization; degenerate clips map to all-zero.
    const float range = hi - lo;
    for (GrayMap& map : volume.frames)
        for (float& v : map.data)
            v = range > 0.0f ? (v - lo) / range : 0.0f;

    for (float& v : volume.frames.front().data)
        v = 0.0f;
    for (float& v : volume.frames.back().data)
        v = 0.0f;
    return volume;
}

} // namespace forge
