#pragma once

#include "forge/degrade.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace forge {

// Fixed textual description of each artifact category.
const std::string& artifact_description(ArtifactLabel label);

// All nine labels in canonical order.
const std::array<ArtifactLabel, kArtifactLabelCount>& all_artifact_labels();

// 9x9 symmetric boolean matrix with a zero diagonal; true marks a pair of
// categories that cannot co-occur.
class ExclusivityMatrix {
public:
    ExclusivityMatrix();

    bool exclusive(ArtifactLabel a, ArtifactLabel b) const;
    void set_exclusive(ArtifactLabel a, ArtifactLabel b, bool value);

    static ExclusivityMatrix example(); // the pairs named alongside the taxonomy
    static ExclusivityMatrix load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::array<std::array<bool, kArtifactLabelCount>, kArtifactLabelCount> cells_{};
};

// "Apply {d1}, {d2}, ... to the scene." with K ~ U{1..9} categories sampled
// without replacement.
std::string inference_prompt(uint64_t seed);
// Same template over a forced label list, in the given order.
std::string inference_prompt_for(const std::vector<ArtifactLabel>& labels);

// One of four templates chosen uniformly, filled with the labels' fixed
// descriptions in the given order. Throws EmptyLabelSet.
std::string training_prompt(const std::vector<ArtifactLabel>& labels, uint64_t seed);
std::string training_prompt_with_template(const std::vector<ArtifactLabel>& labels,
                                          int templateIndex);
constexpr int kTrainingTemplateCount = 4;

struct VqaPair {
    std::string question;
    std::string answer; // "Yes" / "No"
};

// For a labeled video: one positive pair plus one negative pair per category
// exclusive with the label. For a normal video (label absent): a single
// randomly assigned query answered "No".
std::vector<VqaPair> vqa_pairs(std::optional<ArtifactLabel> videoLabel,
                               const ExclusivityMatrix& matrix, uint64_t seed);

std::optional<ArtifactLabel> artifact_label_from_string(const std::string& name);

} // namespace forge
