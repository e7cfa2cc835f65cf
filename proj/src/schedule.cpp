#include "forge/schedule.hpp"

#include "forge/error.hpp"

#include <cmath>
#include <sstream>

namespace forge {

void MaskWeights::validate() const {
    if (wFull < 0.0 || wNull < 0.0 || wHeatmap < 0.0)
        throw ConfigError("mask weights must be nonnegative");
    if (std::abs(wFull + wNull + wHeatmap - 1.0) > 1e-9)
        throw ConfigError("mask weights must sum to 1");
}

void ScheduleConfig::validate() const {
    if (totalSteps < 1)
        throw ConfigError("schedule needs at least one step");
    if (!(tau1 > 0.0) || !(tau2 < 1.0) || !(tau1 < tau2))
        throw ConfigError("thresholds must satisfy 0 < tau1 < tau2 < 1");
    if (perStepWeights.size() != static_cast<size_t>(totalSteps))
        throw ConfigError("per-step weight count does not match totalSteps");
    for (const MaskWeights& w : perStepWeights)
        w.validate();
}

namespace {

ScheduleConfig from_rows(std::vector<MaskWeights> rows) {
    ScheduleConfig config;
    config.totalSteps = static_cast<int>(rows.size());
    config.perStepWeights = std::move(rows);
    return config;
}

const MaskWeights kHeat{0.0, 0.0, 1.0};

} // namespace

ScheduleConfig schedule_preset(const std::string& name) {
    if (name == "exp1")
        return from_rows({kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat});
    if (name == "exp2-pure")
        return from_rows({{1.0, 0.0, 0.0}, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat});
    if (name == "exp2" || name == "exp2-blend")
        return from_rows({{0.8, 0.0, 0.2}, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat});
    if (name == "exp3-blend")
        return from_rows({kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, {0.0, 0.8, 0.2}});
    if (name == "exp3" || name == "exp3-pure")
        return from_rows({kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, {0.0, 1.0, 0.0}});
    if (name == "exp4")
        return from_rows(
            {{0.8, 0.0, 0.2}, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, {0.0, 1.0, 0.0}});
    if (name == "exp5")
        return from_rows(
            {{0.0, 1.0, 0.0}, kHeat, kHeat, kHeat, kHeat, kHeat, kHeat, {0.8, 0.0, 0.2}});
    if (name == "exp6")
        return from_rows({{0.8, 0.0, 0.2},
                          {0.6, 0.0, 0.4},
                          {0.4, 0.0, 0.6},
                          {0.2, 0.0, 0.8},
                          kHeat,
                          kHeat,
                          kHeat,
                          {0.0, 1.0, 0.0}});
    if (name == "exp7")
        return from_rows({{0.8, 0.0, 0.2},
                          kHeat,
                          kHeat,
                          kHeat,
                          {0.0, 0.25, 0.75},
                          {0.0, 0.5, 0.5},
                          {0.0, 0.75, 0.25},
                          {0.0, 1.0, 0.0}});
    throw ConfigError("unknown schedule preset '" + name + "'");
}

std::vector<std::string> schedule_preset_names() {
    return {"exp1", "exp2-pure", "exp2-blend", "exp3-blend", "exp3-pure",
            "exp4", "exp5",      "exp6",       "exp7"};
}

ScheduleConfig generate_schedule(int totalSteps, double tau1, double tau2) {
    if (totalSteps < 1)
        throw ConfigError("schedule needs at least one step");
    if (!(tau1 > 0.0) || !(tau2 < 1.0) || !(tau1 < tau2))
        throw ConfigError("thresholds must satisfy 0 < tau1 < tau2 < 1");

    // Step i starts at t = 1 - i / N on the noise-to-data axis.
    std::vector<int> phase(static_cast<size_t>(totalSteps));
    int fullSteps = 0, nullSteps = 0;
    for (int i = 0; i < totalSteps; ++i) {
        const double t = 1.0 - static_cast<double>(i) / totalSteps;
        if (t >= tau2) {
            phase[static_cast<size_t>(i)] = 0;
            ++fullSteps;
        } else if (t >= tau1) {
            phase[static_cast<size_t>(i)] = 1;
        } else {
            phase[static_cast<size_t>(i)] = 2;
            ++nullSteps;
        }
    }

    ScheduleConfig config;
    config.totalSteps = totalSteps;
    config.tau1 = tau1;
    config.tau2 = tau2;
    config.perStepWeights.resize(static_cast<size_t>(totalSteps));
    int fullSeen = 0, nullSeen = 0;
    for (int i = 0; i < totalSteps; ++i) {
        MaskWeights& w = config.perStepWeights[static_cast<size_t>(i)];
        switch (phase[static_cast<size_t>(i)]) {
        case 0: {
            // Linear decay of the (blended) full mask toward pure heatmap.
            const double alpha = 0.8 * static_cast<double>(fullSteps - fullSeen) / fullSteps;
            w = {alpha, 0.0, 1.0 - alpha};
            ++fullSeen;
            break;
        }
        case 1:
            w = kHeat;
            break;
        default: {
            // Linear decay of the heatmap toward the null mask, reaching it
            // exactly on the final step.
            const double wNull = static_cast<double>(nullSeen + 1) / nullSteps;
            w = {0.0, wNull, 1.0 - wNull};
            ++nullSeen;
            break;
        }
        }
    }
    config.validate();
    return config;
}

MaskWeights schedule_weights(int step, const ScheduleConfig& config) {
    if (step < 0 || step >= config.totalSteps ||
        static_cast<size_t>(step) >= config.perStepWeights.size())
        throw IndexOutOfRange("schedule step " + std::to_string(step) + " outside [0, " +
                              std::to_string(config.totalSteps) + ")");
    MaskWeights w = config.perStepWeights[static_cast<size_t>(step)];
    w.validate();
    return w;
}

std::string schedule_to_csv(const ScheduleConfig& config) {
    std::ostringstream out;
    out << "step,w_full,w_null,w_heatmap\n";
    for (int step = 0; step < config.totalSteps; ++step) {
        const MaskWeights w = config.perStepWeights[static_cast<size_t>(step)];
        out << (step + 1) << ',' << w.wFull << ',' << w.wNull << ',' << w.wHeatmap << '\n';
    }
    return out.str();
}

LatentSequence blend_mask(const MaskWeights& weights, const LatentSequence& heatmap) {
    weights.validate();
    LatentSequence out(heatmap.frames, heatmap.channels, heatmap.height, heatmap.width);
    out.encoderTag = heatmap.encoderTag;
    const size_t stride = heatmap.frame_stride();
    for (int t = 0; t < heatmap.frames; ++t) {
        const bool boundary = t == 0 || t == heatmap.frames - 1;
        const double full = boundary ? 0.0 : weights.wFull;
        const float* src = heatmap.data.data() + static_cast<size_t>(t) * stride;
        float* dst = out.data.data() + static_cast<size_t>(t) * stride;
        for (size_t i = 0; i < stride; ++i)
            dst[i] = static_cast<float>(full + weights.wHeatmap * src[i]);
    }
    return out;
}

} // namespace forge
