#include "forge/promptgen.hpp"

#include "forge/error.hpp"
#include "forge/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace forge {

namespace {

const std::array<ArtifactLabel, kArtifactLabelCount> kAllLabels = {
    ArtifactLabel::Floaters, ArtifactLabel::Dilation, ArtifactLabel::Needles,
    ArtifactLabel::Cracks,   ArtifactLabel::Aliasing, ArtifactLabel::Blurring,
    ArtifactLabel::Popping,  ArtifactLabel::Ghosting, ArtifactLabel::ColorOutliers,
};

const std::array<std::string, kArtifactLabelCount> kDescriptions = {
    "floater artifacts",
    "oversized blurry dilated patches",
    "elongated needle-like geometric spikes",
    "crack artifacts",
    "jagged aliasing patterns and shimmering",
    "over-smoothed gaussian blurring artifacts",
    "temporal depth popping and flickering",
    "translucent semi-transparent ghosting artifacts",
    "random RGB color noise",
};

const std::array<std::string, kTrainingTemplateCount> kTemplatePrefix = {
    "Apply ", "Render the video with ", "Add ", "Distort the video with "};
const std::array<std::string, kTrainingTemplateCount> kTemplateSuffix = {
    " to the scene.", ".", " to the video.", "."};

std::string join_descriptions(const std::vector<ArtifactLabel>& labels) {
    std::string joined;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (i > 0)
            joined += ", ";
        joined += artifact_description(labels[i]);
    }
    return joined;
}

} // namespace

const std::string& artifact_description(ArtifactLabel label) {
    return kDescriptions[static_cast<size_t>(label)];
}

const std::array<ArtifactLabel, kArtifactLabelCount>& all_artifact_labels() {
    return kAllLabels;
}

ExclusivityMatrix::ExclusivityMatrix() {
    for (auto& row : cells_)
        row.fill(false);
}

bool ExclusivityMatrix::exclusive(ArtifactLabel a, ArtifactLabel b) const {
    return cells_[static_cast<size_t>(a)][static_cast<size_t>(b)];
}

void ExclusivityMatrix::set_exclusive(ArtifactLabel a, ArtifactLabel b, bool value) {
    if (a == b)
        throw ConfigError("the exclusivity diagonal is fixed at false");
    cells_[static_cast<size_t>(a)][static_cast<size_t>(b)] = value;
    cells_[static_cast<size_t>(b)][static_cast<size_t>(a)] = value;
}

ExclusivityMatrix ExclusivityMatrix::example() {
    // Illustrative only: just the structurally-distinct pairs called out
    // alongside the taxonomy.
    ExclusivityMatrix matrix;
    matrix.set_exclusive(ArtifactLabel::Aliasing, ArtifactLabel::Ghosting, true);
    matrix.set_exclusive(ArtifactLabel::Aliasing, ArtifactLabel::Cracks, true);
    return matrix;
}

ExclusivityMatrix ExclusivityMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
    ExclusivityMatrix matrix;
    for (const auto& pair : doc.at("exclusive_pairs")) {
        const auto a = artifact_label_from_string(pair.at(0).get<std::string>());
        const auto b = artifact_label_from_string(pair.at(1).get<std::string>());
        if (!a || !b)
            throw DataError(path + ": unknown artifact label in pair");
        matrix.set_exclusive(*a, *b, true);
    }
    return matrix;
}

void ExclusivityMatrix::save(const std::string& path) const {
    nlohmann::json pairs = nlohmann::json::array();
    for (size_t i = 0; i < kArtifactLabelCount; ++i)
        for (size_t j = i + 1; j < kArtifactLabelCount; ++j)
            if (cells_[i][j])
                pairs.push_back({to_string(kAllLabels[i]), to_string(kAllLabels[j])});
    nlohmann::json doc;
    doc["exclusive_pairs"] = pairs;
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

std::string inference_prompt(uint64_t seed) {
    Rng rng(seed);
    const int k = 1 + static_cast<int>(rng.below(kArtifactLabelCount));
    std::vector<ArtifactLabel> pool(kAllLabels.begin(), kAllLabels.end());
    std::vector<ArtifactLabel> chosen;
    chosen.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        const size_t j = static_cast<size_t>(rng.below(pool.size()));
        chosen.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<long>(j));
    }
    return inference_prompt_for(chosen);
}

std::string inference_prompt_for(const std::vector<ArtifactLabel>& labels) {
    if (labels.empty())
        throw EmptyLabelSet("inference prompt needs at least one category");
    return "Apply " + join_descriptions(labels) + " to the scene.";
}

std::string training_prompt(const std::vector<ArtifactLabel>& labels, uint64_t seed) {
    Rng rng(seed);
    return training_prompt_with_template(labels,
                                         static_cast<int>(rng.below(kTrainingTemplateCount)));
}

std::string training_prompt_with_template(const std::vector<ArtifactLabel>& labels,
                                          int templateIndex) {
    if (labels.empty())
        throw EmptyLabelSet("training prompt needs at least one label");
    if (templateIndex < 0 || templateIndex >= kTrainingTemplateCount)
        throw IndexOutOfRange("template index outside [0, 4)");
    return kTemplatePrefix[static_cast<size_t>(templateIndex)] + join_descriptions(labels) +
           kTemplateSuffix[static_cast<size_t>(templateIndex)];
}

std::vector<VqaPair> vqa_pairs(std::optional<ArtifactLabel> videoLabel,
                               const ExclusivityMatrix& matrix, uint64_t seed) {
    const auto question = [](ArtifactLabel label) {
        return "Does this video suffer from " + artifact_description(label) + "?";
    };

    std::vector<VqaPair> pairs;
    if (!videoLabel) {
        Rng rng(seed);
        const ArtifactLabel query =
            kAllLabels[static_cast<size_t>(rng.below(kArtifactLabelCount))];
        pairs.push_back({question(query), "No"});
        return pairs;
    }

    pairs.push_back({question(*videoLabel), "Yes"});
    for (const ArtifactLabel other : kAllLabels)
        if (other != *videoLabel && matrix.exclusive(*videoLabel, other))
            pairs.push_back({question(other), "No"});
    return pairs;
}

std::optional<ArtifactLabel> artifact_label_from_string(const std::string& name) {
    for (const ArtifactLabel label : kAllLabels)
        if (to_string(label) == name)
            return label;
    return std::nullopt;
}

} // namespace forge
