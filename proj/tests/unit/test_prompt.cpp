#include "forge/promptgen.hpp"

#include "forge/error.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace forge;

TEST_CASE("forced two-category inference prompt matches verbatim") {
    CHECK(inference_prompt_for({ArtifactLabel::Cracks, ArtifactLabel::Floaters}) ==
          "Apply crack artifacts, floater artifacts to the scene.");
}

TEST_CASE("forced one-category inference prompt matches verbatim") {
    CHECK(inference_prompt_for({ArtifactLabel::Needles}) ==
          "Apply elongated needle-like geometric spikes to the scene.");
}

TEST_CASE("forced five-category inference prompt matches verbatim") {
    CHECK(inference_prompt_for({ArtifactLabel::Ghosting, ArtifactLabel::ColorOutliers,
                                ArtifactLabel::Popping, ArtifactLabel::Aliasing,
                                ArtifactLabel::Blurring}) ==
          "Apply translucent semi-transparent ghosting artifacts, random RGB color noise, "
          "temporal depth popping and flickering, jagged aliasing patterns and shimmering, "
          "over-smoothed gaussian blurring artifacts to the scene.");
}

TEST_CASE("inference prompts are deterministic and never repeat a category") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const std::string a = inference_prompt(seed);
        CHECK(a == inference_prompt(seed));
        // No description may appear twice.
        for (const ArtifactLabel label : all_artifact_labels()) {
            const std::string& desc = artifact_description(label);
            const size_t first = a.find(desc);
            if (first != std::string::npos)
                CHECK(a.find(desc, first + desc.size()) == std::string::npos);
        }
    }
}

TEST_CASE("category inclusion frequency matches the analytic 5/9 rate") {
    // P(include) = E[K]/9 = 5/9 for K uniform on {1..9} sampled without
    // replacement.
    constexpr int kSamples = 100000;
    std::map<std::string, int> hits;
    for (const ArtifactLabel label : all_artifact_labels())
        hits[artifact_description(label)] = 0;
    for (int i = 0; i < kSamples; ++i) {
        const std::string prompt = inference_prompt(static_cast<uint64_t>(i));
        for (auto& [desc, count] : hits)
            if (prompt.find(desc) != std::string::npos)
                ++count;
    }
    const double p = 5.0 / 9.0;
    const double band = 3.0 * std::sqrt(p * (1.0 - p) / kSamples);
    for (const auto& [desc, count] : hits)
        CHECK(std::abs(double(count) / kSamples - p) < band + 1e-12);
}

TEST_CASE("training templates render verbatim") {
    CHECK(training_prompt_with_template({ArtifactLabel::Ghosting}, 2) ==
          "Add translucent semi-transparent ghosting artifacts to the video.");
    CHECK(training_prompt_with_template({ArtifactLabel::Cracks}, 0) ==
          "Apply crack artifacts to the scene.");
    CHECK(training_prompt_with_template({ArtifactLabel::Dilation}, 1) ==
          "Render the video with oversized blurry dilated patches.");
    CHECK(training_prompt_with_template({ArtifactLabel::Blurring}, 3) ==
          "Distort the video with over-smoothed gaussian blurring artifacts.");
}

TEST_CASE("training prompt is deterministic under seed and rejects empty sets") {
    const std::vector<ArtifactLabel> labels{ArtifactLabel::Cracks, ArtifactLabel::Aliasing};
    CHECK(training_prompt(labels, 42) == training_prompt(labels, 42));
    CHECK_THROWS_AS(training_prompt({}, 1), EmptyLabelSet);
}

TEST_CASE("training template choice is uniform") {
    constexpr int kSamples = 10000;
    int counts[kTrainingTemplateCount] = {};
    const std::vector<ArtifactLabel> labels{ArtifactLabel::Floaters};
    for (int i = 0; i < kSamples; ++i) {
        const std::string prompt = training_prompt(labels, static_cast<uint64_t>(i));
        if (prompt.rfind("Apply ", 0) == 0)
            ++counts[0];
        else if (prompt.rfind("Render ", 0) == 0)
            ++counts[1];
        else if (prompt.rfind("Add ", 0) == 0)
            ++counts[2];
        else
            ++counts[3];
    }
    const double band = 3.0 * std::sqrt(0.25 * 0.75 / kSamples);
    for (const int count : counts)
        CHECK(std::abs(double(count) / kSamples - 0.25) < band);
}

TEST_CASE("vqa pairs follow the exclusivity matrix") {
    const ExclusivityMatrix matrix = ExclusivityMatrix::example();
    const auto pairs = vqa_pairs(ArtifactLabel::Aliasing, matrix, 1);
    REQUIRE(pairs.size() == 3); // 1 positive + ghosting + cracks
    CHECK(pairs[0].answer == "Yes");
    CHECK(pairs[0].question ==
          "Does this video suffer from jagged aliasing patterns and shimmering?");
    CHECK(pairs[1].answer == "No");
    CHECK(pairs[2].answer == "No");
}

TEST_CASE("normal videos receive exactly one negative query") {
    const ExclusivityMatrix matrix = ExclusivityMatrix::example();
    for (uint64_t seed = 0; seed < 64; ++seed) {
        const auto pairs = vqa_pairs(std::nullopt, matrix, seed);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].answer == "No");
        CHECK(vqa_pairs(std::nullopt, matrix, seed)[0].question == pairs[0].question);
    }
}

TEST_CASE("an all-false matrix yields only the positive pair") {
    const ExclusivityMatrix matrix;
    const auto pairs = vqa_pairs(ArtifactLabel::Floaters, matrix, 9);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].answer == "Yes");
}

TEST_CASE("negative questions never repeat the positive label") {
    ExclusivityMatrix matrix = ExclusivityMatrix::example();
    matrix.set_exclusive(ArtifactLabel::Popping, ArtifactLabel::Ghosting, true);
    for (const ArtifactLabel label : all_artifact_labels()) {
        const auto pairs = vqa_pairs(label, matrix, 3);
        for (size_t i = 1; i < pairs.size(); ++i)
            CHECK(pairs[i].question !=
                  "Does this video suffer from " + artifact_description(label) + "?");
    }
}

TEST_CASE("exclusivity matrix round trips through JSON") {
    test::TempDir dir("matrix");
    const std::string path = dir.file("matrix.json");
    ExclusivityMatrix matrix = ExclusivityMatrix::example();
    matrix.set_exclusive(ArtifactLabel::Needles, ArtifactLabel::Blurring, true);
    matrix.save(path);
    const ExclusivityMatrix loaded = ExclusivityMatrix::load(path);
    for (const ArtifactLabel a : all_artifact_labels())
        for (const ArtifactLabel b : all_artifact_labels())
            CHECK(loaded.exclusive(a, b) == matrix.exclusive(a, b));
}

TEST_CASE("matrix symmetry and zero diagonal are structural") {
    ExclusivityMatrix matrix;
    matrix.set_exclusive(ArtifactLabel::Cracks, ArtifactLabel::Ghosting, true);
    CHECK(matrix.exclusive(ArtifactLabel::Ghosting, ArtifactLabel::Cracks));
    CHECK_FALSE(matrix.exclusive(ArtifactLabel::Cracks, ArtifactLabel::Cracks));
    CHECK_THROWS_AS(matrix.set_exclusive(ArtifactLabel::Cracks, ArtifactLabel::Cracks, true),
                    ConfigError);
}
