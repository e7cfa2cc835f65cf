#include "forge/degrade.hpp"

#include "forge/error.hpp"
#include "forge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace forge {

std::string to_string(Perturbation kind) {
    switch (kind) {
    case Perturbation::ScaleCompression:
        return "scale_compression";
    case Perturbation::RandomDropout:
        return "random_dropout";
    case Perturbation::ColorNoise:
        return "color_noise";
    case Perturbation::OpacityCompression:
        return "opacity_compression";
    case Perturbation::Aliasing:
        return "aliasing";
    }
    return "unknown";
}

std::string to_string(ArtifactLabel label) {
    switch (label) {
    case ArtifactLabel::Floaters:
        return "floaters";
    case ArtifactLabel::Dilation:
        return "dilation";
    case ArtifactLabel::Needles:
        return "needles";
    case ArtifactLabel::Cracks:
        return "cracks";
    case ArtifactLabel::Aliasing:
        return "aliasing";
    case ArtifactLabel::Blurring:
        return "blurring";
    case ArtifactLabel::Popping:
        return "popping";
    case ArtifactLabel::Ghosting:
        return "ghosting";
    case ArtifactLabel::ColorOutliers:
        return "color_outliers";
    }
    return "unknown";
}

Perturbation perturbation_from_string(const std::string& name) {
    for (int k = 0; k < kPerturbationCount; ++k)
        if (to_string(static_cast<Perturbation>(k)) == name)
            return static_cast<Perturbation>(k);
    throw ConfigError("unknown perturbation '" + name + "'");
}

std::vector<ArtifactLabel> labels_for(Perturbation kind) {
    switch (kind) {
    case Perturbation::ScaleCompression:
        return {ArtifactLabel::Cracks, ArtifactLabel::Needles};
    case Perturbation::RandomDropout:
        return {ArtifactLabel::Dilation, ArtifactLabel::Blurring};
    case Perturbation::ColorNoise:
        return {ArtifactLabel::ColorOutliers};
    case Perturbation::Aliasing:
        return {ArtifactLabel::Aliasing};
    case Perturbation::OpacityCompression:
        return {}; // fading, not a taxonomy category
    }
    return {};
}

void DegradeConfig::validate() const {
    if (perKindProbability < 0.0 || perKindProbability > 1.0)
        throw ConfigError("perKindProbability must be in [0, 1]");
    if (!(dropoutKeep > 0.0) || dropoutKeep > 1.0)
        throw ConfigError("dropoutKeep must be in (0, 1]");
    if (shDcSigma < 0.0 || shRestSigma < 0.0)
        throw ConfigError("SH noise sigmas must be nonnegative");
    if (!(opacityFactor > 0.0) || opacityFactor > 1.0)
        throw ConfigError("opacityFactor must be in (0, 1]");
    if (aliasFactor < 1)
        throw ConfigError("aliasFactor must be a positive integer");
    if (order.size() != kPerturbationCount)
        throw ConfigError("degradation order must list each perturbation exactly once");
    bool seen[kPerturbationCount] = {};
    for (const Perturbation kind : order) {
        if (seen[static_cast<size_t>(kind)])
            throw ConfigError("degradation order repeats " + to_string(kind));
        seen[static_cast<size_t>(kind)] = true;
    }
}

GaussianCloud compress_scales(const GaussianCloud& cloud, double delta) {
    GaussianCloud out = cloud;
    for (float& v : out.logScales)
        v = static_cast<float>(v - delta);
    return out;
}

GaussianCloud dropout(const GaussianCloud& cloud, double keepFraction, uint64_t seed) {
    if (!(keepFraction > 0.0) || keepFraction > 1.0)
        throw ConfigError("keepFraction must be in (0, 1]");
    const size_t n = cloud.size();
    const size_t keep = static_cast<size_t>(std::floor(keepFraction * static_cast<double>(n)));
    if (keep == n)
        return cloud;

    // Partial Fisher-Yates picks the kept set; sorting restores order.
    Rng rng(seed);
    std::vector<size_t> indices(n);
    std::iota(indices.begin(), indices.end(), size_t{0});
    for (size_t i = 0; i < keep; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(n - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(keep);
    std::sort(indices.begin(), indices.end());

    GaussianCloud out;
    out.shDegree = cloud.shDegree;
    const size_t basis = static_cast<size_t>(cloud.sh_basis_count());
    out.positions.reserve(keep * 3);
    out.logScales.reserve(keep * 3);
    out.rotations.reserve(keep * 4);
    out.opacityLogits.reserve(keep);
    out.shCoeffs.reserve(keep * 3 * basis);
    for (const size_t i : indices) {
        for (int c = 0; c < 3; ++c)
            out.positions.push_back(cloud.positions[i * 3 + static_cast<size_t>(c)]);
        for (int c = 0; c < 3; ++c)
            out.logScales.push_back(cloud.logScales[i * 3 + static_cast<size_t>(c)]);
        for (int c = 0; c < 4; ++c)
            out.rotations.push_back(cloud.rotations[i * 4 + static_cast<size_t>(c)]);
        out.opacityLogits.push_back(cloud.opacityLogits[i]);
        for (size_t k = 0; k < 3 * basis; ++k)
            out.shCoeffs.push_back(cloud.shCoeffs[i * 3 * basis + k]);
    }
    return out;
}

GaussianCloud sh_noise(const GaussianCloud& cloud, double dcSigma, double restSigma,
                       uint64_t seed) {
    GaussianCloud out = cloud;
    Rng rng(seed);
    const size_t basis = static_cast<size_t>(cloud.sh_basis_count());
    for (size_t i = 0; i < cloud.size(); ++i)
        for (size_t c = 0; c < 3; ++c)
            for (size_t b = 0; b < basis; ++b) {
                const double sigma = b == 0 ? dcSigma : restSigma;
                if (sigma == 0.0)
                    continue;
                float& v = out.shCoeffs[(i * 3 + c) * basis + b];
                v = static_cast<float>(v + sigma * rng.normal());
            }
    return out;
}

GaussianCloud compress_opacity(const GaussianCloud& cloud, double factor) {
    if (!(factor > 0.0) || factor > 1.0)
        throw ConfigError("opacity factor must be in (0, 1]");
    GaussianCloud out = cloud;
    for (float& v : out.opacityLogits) {
        const double scaled = std::clamp(factor * sigmoid(v), 1e-6, 1.0 - 1e-6);
        v = static_cast<float>(logit(scaled));
    }
    return out;
}

Image alias_render(const GaussianCloud& cloud, const PinholeCamera& cam, int factor,
                   const RenderSettings& settings) {
    if (factor < 1)
        throw ConfigError("alias factor must be >= 1");
    if (factor == 1)
        return render(cloud, cam, settings);

    PinholeCamera low = cam;
    low.width = std::max(1, cam.width / factor);
    low.height = std::max(1, cam.height / factor);
    const double inv = 1.0 / static_cast<double>(factor);
    low.fx = cam.fx * inv;
    low.fy = cam.fy * inv;
    low.cx = cam.cx * inv;
    low.cy = cam.cy * inv;

    const Image small = render(cloud, low, settings);
    Image out(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        const int sy = std::min(low.height - 1, y / factor);
        for (int x = 0; x < cam.width; ++x) {
            const int sx = std::min(low.width - 1, x / factor);
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = small.at(sx, sy, c);
        }
    }
    return out;
}

std::vector<ArtifactLabel> ComposeResult::taxonomy_labels() const {
    std::vector<ArtifactLabel> labels;
    for (const Perturbation kind : appliedKinds)
        for (const ArtifactLabel label : labels_for(kind))
            if (std::find(labels.begin(), labels.end(), label) == labels.end())
                labels.push_back(label);
    return labels;
}

ComposeResult compose(const GaussianCloud& cloud, const DegradeConfig& config) {
    config.validate();

    // One decision stream per kind so toggling one kind never reshuffles the
    // draws of the others.
    bool apply[kPerturbationCount];
    for (int k = 0; k < kPerturbationCount; ++k) {
        Rng draw(derive_seed(config.seed, "compose",
                             to_string(static_cast<Perturbation>(k))));
        apply[k] = draw.bernoulli(config.perKindProbability);
    }

    ComposeResult result;
    result.cloud = cloud;
    for (const Perturbation kind : config.order) {
        if (!apply[static_cast<size_t>(kind)])
            continue;
        switch (kind) {
        case Perturbation::RandomDropout:
            result.cloud = dropout(result.cloud, config.dropoutKeep,
                                   derive_seed(config.seed, "compose", "dropout_selection"));
            break;
        case Perturbation::ScaleCompression:
            result.cloud = compress_scales(result.cloud, config.scaleDelta);
            break;
        case Perturbation::ColorNoise:
            result.cloud = sh_noise(result.cloud, config.shDcSigma, config.shRestSigma,
                                    derive_seed(config.seed, "compose", "sh_noise_draws"));
            break;
        case Perturbation::OpacityCompression:
            result.cloud = compress_opacity(result.cloud, config.opacityFactor);
            break;
        case Perturbation::Aliasing:
            result.aliasingApplied = true; // render-stage only
            break;
        }
        result.appliedKinds.push_back(kind);
    }
    return result;
}

} // namespace forge
