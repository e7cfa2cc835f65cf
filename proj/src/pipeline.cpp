#include "forge/pipeline.hpp"

#include "forge/error.hpp"
#include "forge/heatmap.hpp"
#include "forge/ply_io.hpp"
#include "forge/promptgen.hpp"
#include "forge/rng.hpp"
#include "forge/trajectory.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace forge {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineConfig load_pipeline_config(const std::string& path) {
    return pipeline_config_from(KeyValueConfig::parse_file(path));
}

PipelineConfig pipeline_config_from(const KeyValueConfig& kv) {
    PipelineConfig config;
    config.seed = static_cast<uint64_t>(kv.get_int64("pipeline", "seed", 0));
    config.outputRoot = kv.get_string("pipeline", "output", "out");
    config.videoFrames = kv.get_int("pipeline", "video_frames", 8);
    config.jobs = kv.get_int("pipeline", "jobs", 1);
    if (config.videoFrames < 2)
        throw ConfigError("video_frames must be at least 2");

    for (const std::string& entry : kv.get_all("scenes", "scene")) {
        const std::vector<std::string> parts = split_csv(entry);
        if (parts.size() != 3)
            throw ConfigError("scene entry must be 'id, cloud.ply, trajectory.json'");
        config.scenes.push_back({parts[0], parts[1], parts[2]});
    }

    config.filter.lambda = kv.get_double("filter", "lambda", 4.0);
    config.filter.minSegmentLength =
        static_cast<size_t>(kv.get_int("filter", "min_segment", 16));
    config.filter.checkJerk = kv.get_bool("filter", "check_jerk", true);
    config.filter.checkAngularAccel = kv.get_bool("filter", "check_angular_accel", true);
    config.filter.checkDirConsistency = kv.get_bool("filter", "check_dir_consistency", true);
    config.filter.madOnDirCos = kv.get_bool("filter", "mad_on_dir_cos", false);

    config.degrade.perKindProbability = kv.get_double("degrade", "per_kind_probability", 0.06);
    config.degrade.scaleDelta = kv.get_double("degrade", "scale_delta", 0.5);
    config.degrade.dropoutKeep = kv.get_double("degrade", "dropout_keep", 0.8);
    config.degrade.shDcSigma = kv.get_double("degrade", "sh_dc_sigma", 0.1);
    config.degrade.shRestSigma = kv.get_double("degrade", "sh_rest_sigma", 0.05);
    config.degrade.opacityFactor = kv.get_double("degrade", "opacity_factor", 0.8);
    config.degrade.aliasFactor = kv.get_int("degrade", "alias_factor", 2);
    if (kv.has("degrade", "order")) {
        config.degrade.order.clear();
        for (const std::string& name : split_csv(kv.get_string("degrade", "order", "")))
            config.degrade.order.push_back(perturbation_from_string(name));
    }
    config.degrade.validate();

    const std::string preset = kv.get_string("schedule", "preset", "exp7");
    config.schedule = schedule_preset(preset);
    config.schedule.tau1 = kv.get_double("schedule", "tau1", config.schedule.tau1);
    config.schedule.tau2 = kv.get_double("schedule", "tau2", config.schedule.tau2);

    config.loss.lambdaGen = kv.get_double("loss", "lambda_gen", 1.0);
    config.loss.lambdaL1 = kv.get_double("loss", "lambda_l1", 0.8);
    config.loss.lambdaSsim = kv.get_double("loss", "lambda_ssim", 0.2);

    config.anchorK = kv.get_int("assembly", "anchor_k", 8);
    config.encoder = kv.get_string("assembly", "encoder", "identity");
    if (config.anchorK < 1)
        throw ConfigError("anchor_k must be >= 1");

    config.emitTrainingPrompt = kv.get_bool("prompt", "emit_training", true);
    config.emitInferencePrompt = kv.get_bool("prompt", "emit_inference", true);
    config.emitVqa = kv.get_bool("prompt", "emit_vqa", true);
    return config;
}

bool PipelineReport::allOk() const {
    for (const SceneReport& scene : scenes)
        if (!scene.ok)
            return false;
    return true;
}

namespace {

std::string frame_name(size_t index) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "frame_%04zu.png", index);
    return buffer;
}

SceneReport process_scene(const SceneEntry& entry, const PipelineConfig& config,
                          double& secondsOut) {
    const auto started = std::chrono::steady_clock::now();
    SceneReport report;
    report.id = entry.id;
    const fs::path sceneRoot = fs::path(config.outputRoot) / entry.id;

    try {
        const GaussianCloud cloud = load_ply(entry.plyPath);
        const CameraTrajectory trajectory = load_trajectory(entry.trajectoryPath);

        // Stage: trajectory quality filter.
        const FilterResult filtered = filter_trajectory(trajectory, config.filter);
        report.segmentBegin = filtered.segmentBegin;
        report.segmentEnd = filtered.segmentEnd;

        // Frame selection: spread evenly across the valid segment.
        const size_t segmentLen = filtered.segmentEnd - filtered.segmentBegin;
        const size_t frameCount =
            std::min<size_t>(static_cast<size_t>(config.videoFrames), segmentLen);
        std::vector<size_t> frameIndices;
        frameIndices.reserve(frameCount);
        for (size_t i = 0; i < frameCount; ++i) {
            const size_t offset =
                frameCount > 1 ? i * (segmentLen - 1) / (frameCount - 1) : 0;
            frameIndices.push_back(filtered.segmentBegin + offset);
        }
        report.frames = static_cast<int>(frameIndices.size());

        // Stage: degrade (cloud-space perturbations decided per scene).
        DegradeConfig degradeConfig = config.degrade;
        degradeConfig.seed = derive_seed(config.seed, entry.id, "degrade");
        const ComposeResult degraded = compose(cloud, degradeConfig);
        for (const Perturbation kind : degraded.appliedKinds)
            report.appliedKinds.push_back(to_string(kind));
        const std::vector<ArtifactLabel> labels = degraded.taxonomy_labels();
        for (const ArtifactLabel label : labels)
            report.labels.push_back(to_string(label));

        fs::create_directories(sceneRoot / "clean");
        fs::create_directories(sceneRoot / "degraded");
        fs::create_directories(sceneRoot / "heatmaps");
        save_ply(degraded.cloud, (sceneRoot / "degraded" / "cloud.ply").string());

        // Stages: render clean and degraded videos.
        Video cleanVideo, degradedVideo;
        RenderSettings settings;
        for (size_t i = 0; i < frameIndices.size(); ++i) {
            const PinholeCamera cam = trajectory.camera(frameIndices[i]);
            Image clean = render(cloud, cam, settings);
            Image bad = degraded.aliasingApplied
                            ? alias_render(degraded.cloud, cam, degradeConfig.aliasFactor,
                                           settings)
                            : render(degraded.cloud, cam, settings);
            write_png(clean, (sceneRoot / "clean" / frame_name(i)).string());
            write_png(bad, (sceneRoot / "degraded" / frame_name(i)).string());
            cleanVideo.push_back(std::move(clean));
            degradedVideo.push_back(std::move(bad));
        }

        // Stage: pseudo-GT heatmaps.
        const ProxyDiscrepancy metric;
        const HeatmapVolume heatmaps = annotate(degradedVideo, cleanVideo, metric);
        json manifest;
        manifest["scene_id"] = entry.id;
        manifest["frames"] = heatmaps.size();
        manifest["metric"] = metric.name();
        json files = json::array();
        for (size_t i = 0; i < heatmaps.size(); ++i) {
            const std::string name = "hm_" + std::to_string(i) + ".png";
            write_png(heatmaps.frames[i], (sceneRoot / "heatmaps" / name).string());
            files.push_back(name);
        }
        manifest["files"] = files;
        std::ofstream manifestOut(sceneRoot / "heatmaps" / "manifest.json");
        manifestOut << manifest.dump(2) << "\n";

        // Stage: prompt and VQA emission.
        std::ofstream prompts(sceneRoot / "prompts.jsonl");
        if (config.emitTrainingPrompt && !labels.empty()) {
            json row;
            row["scene_id"] = entry.id;
            row["mode"] = "training";
            row["prompt"] = training_prompt(labels, derive_seed(config.seed, entry.id,
                                                                "training_prompt"));
            prompts << row.dump() << "\n";
        }
        if (config.emitInferencePrompt) {
            json row;
            row["scene_id"] = entry.id;
            row["mode"] = "inference";
            row["prompt"] = inference_prompt(derive_seed(config.seed, entry.id,
                                                         "inference_prompt"));
            prompts << row.dump() << "\n";
        }
        if (config.emitVqa) {
            const ExclusivityMatrix matrix = ExclusivityMatrix::example();
            const std::optional<ArtifactLabel> primary =
                labels.empty() ? std::nullopt : std::optional<ArtifactLabel>(labels.front());
            std::ofstream vqa(sceneRoot / "vqa.jsonl");
            for (const VqaPair& pair :
                 vqa_pairs(primary, matrix, derive_seed(config.seed, entry.id, "vqa"))) {
                json row;
                row["video_id"] = entry.id;
                row["question"] = pair.question;
                row["answer"] = pair.answer;
                vqa << row.dump() << "\n";
            }
        }

        report.ok = true;
    } catch (const Error& e) {
        report.ok = false;
        report.error = e.what();
    } catch (const std::exception& e) {
        report.ok = false;
        report.error = e.what();
    }

    secondsOut = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace

PipelineReport run_pipeline(const PipelineConfig& config) {
    fs::create_directories(config.outputRoot);

    PipelineReport report;
    report.scenes.resize(config.scenes.size());
    std::vector<double> seconds(config.scenes.size(), 0.0);

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1 || config.scenes.size() <= 1) {
        for (size_t i = 0; i < config.scenes.size(); ++i)
            report.scenes[i] = process_scene(config.scenes[i], config, seconds[i]);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const size_t workers =
            std::min<size_t>(static_cast<size_t>(jobs), config.scenes.size());
        for (size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= config.scenes.size())
                        return;
                    report.scenes[i] = process_scene(config.scenes[i], config, seconds[i]);
                }
            });
        for (std::thread& t : pool)
            t.join();
    }

    json doc;
    doc["seed"] = config.seed;
    doc["scene_count"] = config.scenes.size();
    json scenes = json::array();
    for (const SceneReport& scene : report.scenes) {
        json row;
        row["id"] = scene.id;
        row["ok"] = scene.ok;
        if (!scene.ok)
            row["error"] = scene.error;
        row["segment"] = {scene.segmentBegin, scene.segmentEnd};
        row["applied_kinds"] = scene.appliedKinds;
        row["labels"] = scene.labels;
        row["frames"] = scene.frames;
        scenes.push_back(row);
    }
    doc["scenes"] = scenes;
    std::ofstream reportOut(fs::path(config.outputRoot) / "report.json");
    reportOut << doc.dump(2) << "\n";

    json timing;
    for (size_t i = 0; i < config.scenes.size(); ++i)
        timing[config.scenes[i].id] = seconds[i];
    std::ofstream timingOut(fs::path(config.outputRoot) / "timings.json");
    timingOut << timing.dump(2) << "\n";

    return report;
}

} // namespace forge
