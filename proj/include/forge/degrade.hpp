#pragma once

#include "forge/camera.hpp"
#include "forge/gaussian_cloud.hpp"
#include "forge/image.hpp"
#include "forge/renderer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace forge {

// The five executable perturbations.
enum class Perturbation {
    ScaleCompression,
    RandomDropout,
    ColorNoise,
    OpacityCompression,
    Aliasing,
};

// The nine phenomenological artifact categories used for labeling.
enum class ArtifactLabel {
    Floaters,
    Dilation,
    Needles,
    Cracks,
    Aliasing,
    Blurring,
    Popping,
    Ghosting,
    ColorOutliers,
};

constexpr int kPerturbationCount = 5;
constexpr int kArtifactLabelCount = 9;

std::string to_string(Perturbation kind);
std::string to_string(ArtifactLabel label);
Perturbation perturbation_from_string(const std::string& name);

// Taxonomy labels attributed to each executable perturbation (fixed table;
// opacity compression carries none).
std::vector<ArtifactLabel> labels_for(Perturbation kind);

struct DegradeConfig {
    double perKindProbability = 0.06;
    double scaleDelta = 0.5;   // log-space subtraction
    double dropoutKeep = 0.8;  // fraction of points kept
    double shDcSigma = 0.1;
    double shRestSigma = 0.05;
    double opacityFactor = 0.8;
    int aliasFactor = 2; // resolution downsampling factor
    uint64_t seed = 0;
    // Application order of the cloud-space perturbations. Explicit so a
    // reordering is always a config change, never an accident. Aliasing is
    // listed last and only marks the render stage.
    std::vector<Perturbation> order{Perturbation::RandomDropout,
                                    Perturbation::ScaleCompression, Perturbation::ColorNoise,
                                    Perturbation::OpacityCompression, Perturbation::Aliasing};
    // Iteration checkpoints the upstream trainer would be sampled at; carried
    // as provenance metadata only.
    std::vector<int> checkpointIterations{1500, 2000, 3000, 4000, 5000, 7000, 12000};

    void validate() const;
};

// logScales' = logScales - delta, everything else untouched.
GaussianCloud compress_scales(const GaussianCloud& cloud, double delta);

// Keeps exactly floor(keepFraction * N) Gaussians, chosen uniformly without
// replacement under seed; relative order preserved.
GaussianCloud dropout(const GaussianCloud& cloud, double keepFraction, uint64_t seed);

// I.i.d. zero-mean Gaussian noise on SH coefficients: dcSigma on the DC term,
// restSigma on all higher-order terms.
GaussianCloud sh_noise(const GaussianCloud& cloud, double dcSigma, double restSigma,
                       uint64_t seed);

// Scales the activated (sigmoid) opacity by factor and re-encodes to logits,
// clamping to [1e-6, 1 - 1e-6] before inversion.
GaussianCloud compress_opacity(const GaussianCloud& cloud, double factor);

// Renders at (width/factor, height/factor) with intrinsics scaled by
// 1/factor, then nearest-neighbor upsamples back to full size.
Image alias_render(const GaussianCloud& cloud, const PinholeCamera& cam, int factor,
                   const RenderSettings& settings = {});

struct ComposeResult {
    GaussianCloud cloud;
    std::vector<Perturbation> appliedKinds; // in application order
    bool aliasingApplied = false;           // affects rendering only

    std::vector<ArtifactLabel> taxonomy_labels() const;
};

// Applies each executable kind independently with perKindProbability under
// config.seed. Cloud-space order is fixed: dropout, scale, SH noise, opacity.
ComposeResult compose(const GaussianCloud& cloud, const DegradeConfig& config);

} // namespace forge
