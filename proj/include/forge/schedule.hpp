#pragma once

#include "forge/latent.hpp"

#include <string>
#include <vector>

namespace forge {

// Per-denoising-step blend of the all-ones, all-zeros and heatmap masks.
// The three weights are nonnegative and sum to 1.
struct MaskWeights {
    double wFull = 0.0;
    double wNull = 0.0;
    double wHeatmap = 1.0;

    void validate() const;
};

struct ScheduleConfig {
    int totalSteps = 8;
    // Phase thresholds on the unit time axis (t = 1 is pure noise). Only the
    // generator consumes them; the per-step table is authoritative.
    double tau1 = 0.6;
    double tau2 = 0.9;
    std::vector<MaskWeights> perStepWeights;

    void validate() const;
};

// Named per-step weight tables. "exp7" is the default three-phase schedule:
// one blended full-mask step, three heatmap steps, four steps of linear decay
// to the null mask. "exp2"/"exp3" alias their better-scoring variants
// (exp2-blend, exp3-pure).
ScheduleConfig schedule_preset(const std::string& name);
std::vector<std::string> schedule_preset_names();

// Builds a per-step table from the continuous three-phase form: steps with
// start time >= tau2 blend full and heatmap masks, steps below tau1 decay
// linearly to the null mask, the middle band is pure heatmap.
ScheduleConfig generate_schedule(int totalSteps, double tau1, double tau2);

MaskWeights schedule_weights(int step, const ScheduleConfig& config);

// wFull * z_full + wNull * z_null + wHeatmap * heatmap, where z_full is
// all-ones except on the first and last frame (boundary frames stay 0) and
// z_null is all-zeros.
LatentSequence blend_mask(const MaskWeights& weights, const LatentSequence& heatmap);

// CSV rendering of a per-step table: "step,w_full,w_null,w_heatmap" plus one
// row per step (steps numbered from 1). Shared by the CLI dump command.
std::string schedule_to_csv(const ScheduleConfig& config);

} // namespace forge
