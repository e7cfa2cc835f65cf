#pragma once

#include "forge/config.hpp"
#include "forge/degrade.hpp"
#include "forge/kinematics.hpp"
#include "forge/optimize.hpp"
#include "forge/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace forge {

struct SceneEntry {
    std::string id;
    std::string plyPath;
    std::string trajectoryPath;
};

struct PipelineConfig {
    uint64_t seed = 0;
    std::string outputRoot = "out";
    int videoFrames = 8; // frames rendered per scene, evenly over the segment
    int jobs = 1;
    std::vector<SceneEntry> scenes;

    FilterConfig filter;
    DegradeConfig degrade;
    ScheduleConfig schedule;
    LossConfig loss;

    // Assembly settings carried for downstream consumers of the emitted data.
    int anchorK = 8;
    std::string encoder = "identity";

    bool emitTrainingPrompt = true;
    bool emitInferencePrompt = true;
    bool emitVqa = true;
};

// Reads the plain-text config (see configs/pipeline.cfg for the template).
// CLI flags override seed / jobs / output afterwards.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig pipeline_config_from(const KeyValueConfig& kv);

struct SceneReport {
    std::string id;
    bool ok = false;
    std::string error;
    size_t segmentBegin = 0, segmentEnd = 0;
    std::vector<std::string> appliedKinds;
    std::vector<std::string> labels;
    int frames = 0;
};

struct PipelineReport {
    std::vector<SceneReport> scenes;
    bool allOk() const;
};

// Per scene: qc-filter, render clean, degrade, render degraded, annotate
// heatmaps, emit prompts. Writes per-stage outputs under
// <outputRoot>/<sceneId>/<stage>/ plus report.json; wall-clock timings go to
// the separate timings.json so reports stay byte-comparable across runs.
PipelineReport run_pipeline(const PipelineConfig& config);

} // namespace forge
