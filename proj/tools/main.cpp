#include "forge/assembly.hpp"
#include "forge/config.hpp"
#include "forge/degrade.hpp"
#include "forge/error.hpp"
#include "forge/heatmap.hpp"
#include "forge/kinematics.hpp"
#include "forge/metrics.hpp"
#include "forge/optimize.hpp"
#include "forge/pipeline.hpp"
#include "forge/ply_io.hpp"
#include "forge/promptgen.hpp"
#include "forge/renderer.hpp"
#include "forge/rng.hpp"
#include "forge/schedule.hpp"
#include "forge/spherical_path.hpp"
#include "forge/trajectory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace forge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::vector<std::string> list_images(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw IoFailure(dir + " is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pfm")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw DataError("no .png/.pfm frames found in " + dir);
    return files;
}

Video load_video(const std::string& dir) {
    Video video;
    for (const std::string& file : list_images(dir))
        video.push_back(read_image(file));
    return video;
}

HeatmapVolume load_heatmap_dir(const std::string& dir) {
    HeatmapVolume volume;
    for (const std::string& file : list_images(dir))
        volume.frames.push_back(read_png_gray(file));
    return volume;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    out << text;
}

DegradeConfig degrade_config_from_file(const std::string& path) {
    const KeyValueConfig kv = KeyValueConfig::parse_file(path);
    DegradeConfig config;
    config.perKindProbability = kv.get_double("degrade", "per_kind_probability", 0.06);
    config.scaleDelta = kv.get_double("degrade", "scale_delta", 0.5);
    config.dropoutKeep = kv.get_double("degrade", "dropout_keep", 0.8);
    config.shDcSigma = kv.get_double("degrade", "sh_dc_sigma", 0.1);
    config.shRestSigma = kv.get_double("degrade", "sh_rest_sigma", 0.05);
    config.opacityFactor = kv.get_double("degrade", "opacity_factor", 0.8);
    config.aliasFactor = kv.get_int("degrade", "alias_factor", 2);
    if (kv.has("degrade", "order")) {
        config.order.clear();
        for (const std::string& name : split_csv(kv.get_string("degrade", "order", "")))
            config.order.push_back(perturbation_from_string(name));
    }
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"artifact-forge: deterministic 3DGS degradation, QC, annotation and "
                 "assembly toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t globalSeed = 0;
    std::string globalConfig;
    int globalJobs = 1;
    app.add_option("--seed", globalSeed, "global random seed");
    app.add_option("--config", globalConfig, "configuration file");
    app.add_option("--jobs", globalJobs, "worker pool size");

    int exitCode = kExitOk;

    // ---- qc -----------------------------------------------------------
    auto* qc = app.add_subcommand("qc", "kinematic trajectory quality filter");
    std::string qcTraj, qcReport;
    double qcLambda = 4.0;
    size_t qcMinSeg = 16;
    bool qcMadDirCos = false;
    qc->add_option("--traj", qcTraj, "trajectory JSON")->required();
    qc->add_option("--lambda", qcLambda, "MAD sensitivity");
    qc->add_option("--min-seg", qcMinSeg, "minimum segment length");
    qc->add_flag("--mad-dir-cos", qcMadDirCos, "also MAD-filter the direction cosine");
    qc->add_option("--report", qcReport, "output report JSON");
    qc->callback([&] {
        const CameraTrajectory traj = load_trajectory(qcTraj);
        FilterConfig config;
        config.lambda = qcLambda;
        config.minSegmentLength = qcMinSeg;
        config.madOnDirCos = qcMadDirCos;

        json doc;
        doc["frames"] = traj.size();
        doc["lambda"] = qcLambda;
        try {
            const FilterResult result = filter_trajectory(traj, config);
            doc["ok"] = true;
            doc["segment"] = {result.segmentBegin, result.segmentEnd};
            doc["valid"] = result.validFlags;
        } catch (const SegmentTooShort& e) {
            doc["ok"] = false;
            doc["error"] = e.what();
            exitCode = kExitData;
        }
        const KinematicReport report = kinematics(traj);
        doc["mean_step"] = report.meanStep;
        doc["max_jerk"] = report.jerkNorm.empty()
                              ? 0.0
                              : *std::max_element(report.jerkNorm.begin(), report.jerkNorm.end());
        const std::string text = doc.dump(2) + "\n";
        if (qcReport.empty())
            std::cout << text;
        else
            write_text(qcReport, text);
    });

    // ---- degrade ------------------------------------------------------
    auto* degradeCmd = app.add_subcommand("degrade", "apply parameter perturbations");
    std::string degPly, degOut, degReport;
    degradeCmd->add_option("--ply", degPly, "input checkpoint")->required();
    degradeCmd->add_option("--out", degOut, "degraded checkpoint")->required();
    degradeCmd->add_option("--report", degReport, "labels report JSON");
    degradeCmd->callback([&] {
        DegradeConfig config =
            globalConfig.empty() ? DegradeConfig{} : degrade_config_from_file(globalConfig);
        config.seed = globalSeed;
        const GaussianCloud cloud = load_ply(degPly);
        const ComposeResult result = compose(cloud, config);
        save_ply(result.cloud, degOut);

        json doc;
        doc["seed"] = config.seed;
        doc["input_gaussians"] = cloud.size();
        doc["output_gaussians"] = result.cloud.size();
        json kinds = json::array();
        for (const Perturbation kind : result.appliedKinds)
            kinds.push_back(to_string(kind));
        doc["applied_kinds"] = kinds;
        json labels = json::array();
        for (const ArtifactLabel label : result.taxonomy_labels())
            labels.push_back(to_string(label));
        doc["labels"] = labels;
        doc["aliasing_applied"] = result.aliasingApplied;
        doc["checkpoint_iterations"] = config.checkpointIterations;
        const std::string text = doc.dump(2) + "\n";
        if (degReport.empty())
            std::cout << text;
        else
            write_text(degReport, text);
    });

    // ---- render -------------------------------------------------------
    auto* renderCmd = app.add_subcommand("render", "render one trajectory frame");
    std::string renPly, renCamera, renOut;
    size_t renFrame = 0;
    int renAlias = 1;
    renderCmd->add_option("--ply", renPly, "checkpoint")->required();
    renderCmd->add_option("--camera", renCamera, "trajectory JSON")->required();
    renderCmd->add_option("--frame", renFrame, "frame index")->required();
    renderCmd->add_option("--out", renOut, "output image (.png or .pfm)")->required();
    renderCmd->add_option("--alias-factor", renAlias, "resolution downsampling factor");
    renderCmd->callback([&] {
        const GaussianCloud cloud = load_ply(renPly);
        const CameraTrajectory traj = load_trajectory(renCamera);
        if (renFrame >= traj.size())
            throw DataError("frame " + std::to_string(renFrame) + " outside trajectory of " +
                            std::to_string(traj.size()));
        const PinholeCamera cam = traj.camera(renFrame);
        const Image img =
            renAlias > 1 ? alias_render(cloud, cam, renAlias) : render(cloud, cam);
        write_image(img, renOut);
    });

    // ---- annotate -----------------------------------------------------
    auto* annotateCmd = app.add_subcommand("annotate", "pseudo-GT artifact heatmaps");
    std::string annDegraded, annClean, annOut, annMetric = "proxy";
    annotateCmd->add_option("--degraded", annDegraded, "degraded frame directory")->required();
    annotateCmd->add_option("--clean", annClean, "clean frame directory")->required();
    annotateCmd->add_option("--out", annOut, "output directory")->required();
    annotateCmd->add_option("--metric", annMetric, "proxy or l2");
    annotateCmd->callback([&] {
        const Video degraded = load_video(annDegraded);
        const Video clean = load_video(annClean);
        std::unique_ptr<PerceptualMetric> metric;
        if (annMetric == "proxy")
            metric = std::make_unique<ProxyDiscrepancy>();
        else if (annMetric == "l2")
            metric = std::make_unique<L2Discrepancy>();
        else
            throw ConfigError("unknown metric '" + annMetric + "'");

        const HeatmapVolume volume = annotate(degraded, clean, *metric);
        fs::create_directories(annOut);
        json manifest;
        manifest["frames"] = volume.size();
        manifest["metric"] = metric->name();
        json files = json::array();
        for (size_t i = 0; i < volume.size(); ++i) {
            const std::string name = "hm_" + std::to_string(i) + ".png";
            write_png(volume.frames[i], (fs::path(annOut) / name).string());
            files.push_back(name);
        }
        manifest["files"] = files;
        write_text((fs::path(annOut) / "manifest.json").string(), manifest.dump(2) + "\n");
    });

    // ---- assemble -----------------------------------------------------
    auto* assembleCmd =
        app.add_subcommand("assemble", "build the boundary-anchored reference latent");
    std::string asmFrames, asmFirst, asmLast, asmOut, asmEncoder = "identity";
    int asmK = 8;
    assembleCmd->add_option("--frames", asmFrames, "artifact frame directory")->required();
    assembleCmd->add_option("--gt-first", asmFirst, "first GT view image")->required();
    assembleCmd->add_option("--gt-last", asmLast, "last GT view image")->required();
    assembleCmd->add_option("--k", asmK, "trailing anchor window size");
    assembleCmd->add_option("--encoder", asmEncoder, "identity or patchify<S>");
    assembleCmd->add_option("--out", asmOut, "output latent container")->required();
    assembleCmd->callback([&] {
        const Video frames = load_video(asmFrames);
        const Image gtFirst = read_image(asmFirst);
        const Image gtLast = read_image(asmLast);
        const auto encoder = make_encoder(asmEncoder);
        save_latent(build_reference(gtFirst, gtLast, frames, asmK, *encoder), asmOut);
    });

    // ---- schedule-dump --------------------------------------------------
    auto* dumpCmd = app.add_subcommand("schedule-dump", "emit a mask-weight table as CSV");
    std::string dumpPreset = "exp7", dumpOut;
    bool dumpGenerate = false;
    int dumpSteps = 8;
    double dumpTau1 = 0.6, dumpTau2 = 0.9;
    dumpCmd->add_option("--preset", dumpPreset, "named preset (exp1..exp7)");
    dumpCmd->add_flag("--generate", dumpGenerate, "derive the table from thresholds instead");
    dumpCmd->add_option("--steps", dumpSteps, "total denoising steps (with --generate)");
    dumpCmd->add_option("--tau1", dumpTau1, "lower threshold (with --generate)");
    dumpCmd->add_option("--tau2", dumpTau2, "upper threshold (with --generate)");
    dumpCmd->add_option("--out", dumpOut, "output CSV path (stdout when omitted)");
    dumpCmd->callback([&] {
        const ScheduleConfig config = dumpGenerate
                                          ? generate_schedule(dumpSteps, dumpTau1, dumpTau2)
                                          : schedule_preset(dumpPreset);
        const std::string csv = schedule_to_csv(config);
        if (dumpOut.empty())
            std::cout << csv;
        else
            write_text(dumpOut, csv);
    });

    // ---- sample ---------------------------------------------------------
    auto* sampleCmd = app.add_subcommand("sample", "Euler-integrate a velocity oracle");
    std::string smpOracle = "zero", smpRef, smpHeatmap, smpZ0, smpVelocity, smpInit, smpOut;
    std::string smpPreset = "exp7";
    sampleCmd->add_option("--oracle", smpOracle, "truth, zero, or file")->required();
    sampleCmd->add_option("--ref", smpRef, "reference latent container")->required();
    sampleCmd->add_option("--heatmap", smpHeatmap, "heatmap latent or PNG directory")
        ->required();
    sampleCmd->add_option("--z0", smpZ0, "GT target latent (truth oracle)");
    sampleCmd->add_option("--velocity", smpVelocity, "constant velocity latent (file oracle)");
    sampleCmd->add_option("--init", smpInit, "initial noise latent (seeded when omitted)");
    sampleCmd->add_option("--preset", smpPreset, "mask-weight schedule preset");
    sampleCmd->add_option("--out", smpOut, "restored latent container")->required();
    sampleCmd->callback([&] {
        const LatentSequence ref = load_latent(smpRef);
        LatentSequence heatmap;
        if (fs::is_directory(smpHeatmap)) {
            heatmap = heatmap_to_latent(load_heatmap_dir(smpHeatmap), ref.channels);
        } else {
            heatmap = load_latent(smpHeatmap);
        }

        std::optional<LatentSequence> z0;
        if (!smpZ0.empty())
            z0 = load_latent(smpZ0);

        LatentSequence init;
        if (!smpInit.empty()) {
            init = load_latent(smpInit);
        } else {
            const LatentSequence& shape = z0 ? *z0 : ref;
            init = LatentSequence(shape.frames, shape.channels, shape.height, shape.width);
            Rng rng(globalSeed);
            for (float& v : init.data)
                v = static_cast<float>(rng.normal());
        }

        std::unique_ptr<VelocityOracle> oracle;
        if (smpOracle == "truth") {
            if (!z0)
                throw ConfigError("--oracle truth requires --z0");
            oracle = std::make_unique<TruthOracle>(*z0, init);
        } else if (smpOracle == "zero") {
            oracle = std::make_unique<ZeroOracle>();
        } else if (smpOracle == "file") {
            if (smpVelocity.empty())
                throw ConfigError("--oracle file requires --velocity");
            LatentSequence field = load_latent(smpVelocity);
            oracle = std::make_unique<CallbackOracle>(
                [field](const LatentSequence& input, const TimestepTensor& tSeq) {
                    LatentSequence out(input.frames, input.channels, input.height, input.width);
                    const size_t stride = out.frame_stride();
                    std::copy(field.data.begin(), field.data.end(),
                              out.data.begin() +
                                  static_cast<long>(static_cast<size_t>(tSeq.refFrames) * stride));
                    return out;
                });
        } else {
            throw ConfigError("unknown oracle '" + smpOracle + "'");
        }

        const ScheduleConfig schedule = schedule_preset(smpPreset);
        save_latent(sample(*oracle, ref, heatmap, schedule, init), smpOut);
    });

    // ---- recon-demo -----------------------------------------------------
    auto* reconCmd = app.add_subcommand("recon-demo", "desk-scale closed-loop reconstruction");
    std::string recPly, recViews, recRestorer = "identity", recOut, recCurve;
    int recIters = 1, recSteps = 50, recNovel = 4;
    double recKeep = 0.8, recLr = 0.3;
    reconCmd->add_option("--ply", recPly, "clean toy checkpoint")->required();
    reconCmd->add_option("--views", recViews, "sparse views trajectory JSON")->required();
    reconCmd->add_option("--iters", recIters, "closed-loop iterations");
    reconCmd->add_option("--steps", recSteps, "optimizer steps per iteration");
    reconCmd->add_option("--novel", recNovel, "novel views per trajectory");
    reconCmd->add_option("--restorer", recRestorer, "identity or gt-oracle");
    reconCmd->add_option("--degrade-keep", recKeep, "dropout keep fraction before fitting");
    reconCmd->add_option("--lr", recLr, "optimizer learning rate");
    reconCmd->add_option("--out", recOut, "fitted checkpoint")->required();
    reconCmd->add_option("--curve", recCurve, "loss curve CSV");
    reconCmd->callback([&] {
        const GaussianCloud clean = load_ply(recPly);
        const CameraTrajectory views = load_trajectory(recViews);
        if (views.size() < 2)
            throw DataError("need at least two sparse views");

        std::vector<SupervisedView> sparse;
        for (size_t i = 0; i < views.size(); ++i) {
            const PinholeCamera cam = views.camera(i);
            sparse.push_back({cam, render(clean, cam)});
        }
        const GaussianCloud start =
            recKeep < 1.0 ? dropout(clean, recKeep, globalSeed) : clean;

        Restorer restorer;
        if (recRestorer == "identity") {
            restorer = [](const Video& video, const CameraTrajectory&) { return video; };
        } else if (recRestorer == "gt-oracle") {
            restorer = [&clean](const Video&, const CameraTrajectory& trajectory) {
                Video restored;
                for (size_t i = 1; i + 1 < trajectory.size(); ++i)
                    restored.push_back(render(clean, trajectory.camera(i)));
                return restored;
            };
        } else {
            throw ConfigError("unknown restorer '" + recRestorer + "'");
        }

        ClosedLoopOptions options;
        options.novelPerIteration = recNovel;
        options.optimize.steps = recSteps;
        options.optimize.learningRate = recLr;
        std::vector<double> curve;
        options.optimize.lossCurve = &curve;

        const GaussianCloud fitted =
            closed_loop(start, sparse, restorer, recIters, LossConfig{}, options);
        save_ply(fitted, recOut);
        if (!recCurve.empty()) {
            std::ostringstream csv;
            csv << "step,loss\n";
            for (size_t i = 0; i < curve.size(); ++i)
                csv << i << ',' << curve[i] << '\n';
            write_text(recCurve, csv.str());
        }
        std::cout << "final loss " << (curve.empty() ? 0.0 : curve.back()) << " over "
                  << curve.size() << " evaluations\n";
    });

    // ---- prompt ---------------------------------------------------------
    auto* promptCmd = app.add_subcommand("prompt", "deterministic text generators");
    std::string prMode = "inference", prLabels, prLabel, prMatrix, prOut;
    int prCount = 1;
    promptCmd->add_option("--mode", prMode, "inference, training, or vqa")->required();
    promptCmd->add_option("--count", prCount, "number of records");
    promptCmd->add_option("--labels", prLabels, "comma-separated labels (training mode)");
    promptCmd->add_option("--label", prLabel, "video label or 'normal' (vqa mode)");
    promptCmd->add_option("--matrix", prMatrix, "exclusivity matrix JSON (vqa mode)");
    promptCmd->add_option("--out", prOut, "output JSONL (stdout when omitted)");
    promptCmd->callback([&] {
        std::ostringstream out;
        if (prMode == "inference") {
            for (int i = 0; i < prCount; ++i) {
                json row;
                row["scene_id"] = i;
                row["prompt"] = inference_prompt(globalSeed + static_cast<uint64_t>(i));
                out << row.dump() << "\n";
            }
        } else if (prMode == "training") {
            std::vector<ArtifactLabel> labels;
            for (const std::string& name : split_csv(prLabels)) {
                const auto label = artifact_label_from_string(name);
                if (!label)
                    throw ConfigError("unknown label '" + name + "'");
                labels.push_back(*label);
            }
            for (int i = 0; i < prCount; ++i) {
                json row;
                row["scene_id"] = i;
                row["prompt"] = training_prompt(labels, globalSeed + static_cast<uint64_t>(i));
                out << row.dump() << "\n";
            }
        } else if (prMode == "vqa") {
            const ExclusivityMatrix matrix =
                prMatrix.empty() ? ExclusivityMatrix::example() : ExclusivityMatrix::load(prMatrix);
            std::optional<ArtifactLabel> label;
            if (prLabel != "normal") {
                label = artifact_label_from_string(prLabel);
                if (!label)
                    throw ConfigError("unknown label '" + prLabel + "' (or use 'normal')");
            }
            for (int i = 0; i < prCount; ++i)
                for (const VqaPair& pair :
                     vqa_pairs(label, matrix, globalSeed + static_cast<uint64_t>(i))) {
                    json row;
                    row["video_id"] = i;
                    row["question"] = pair.question;
                    row["answer"] = pair.answer;
                    out << row.dump() << "\n";
                }
        } else {
            throw ConfigError("unknown prompt mode '" + prMode + "'");
        }
        if (prOut.empty())
            std::cout << out.str();
        else
            write_text(prOut, out.str());
    });

    // ---- metrics --------------------------------------------------------
    auto* metricsCmd = app.add_subcommand("metrics", "photometric metrics between two images");
    std::string metA, metB;
    metricsCmd->add_option("--a", metA, "first image")->required();
    metricsCmd->add_option("--b", metB, "second image")->required();
    metricsCmd->callback([&] {
        const Image a = read_image(metA);
        const Image b = read_image(metB);
        json doc;
        const double db = psnr(a, b);
        doc["psnr_db"] = std::isinf(db) ? json("inf") : json(db);
        doc["ssim"] = ssim(a, b);
        doc["l1"] = l1(a, b);
        std::cout << doc.dump(2) << "\n";
    });

    // ---- pipeline -------------------------------------------------------
    auto* pipelineCmd = app.add_subcommand("pipeline", "run the per-scene stage graph");
    std::string pipeOut;
    pipelineCmd->add_option("--out", pipeOut, "output root (overrides config)");
    pipelineCmd->callback([&] {
        if (globalConfig.empty())
            throw ConfigError("pipeline requires --config");
        PipelineConfig config = load_pipeline_config(globalConfig);
        if (app.count("--seed") > 0)
            config.seed = globalSeed;
        if (app.count("--jobs") > 0)
            config.jobs = globalJobs;
        if (!pipeOut.empty())
            config.outputRoot = pipeOut;

        const PipelineReport report = run_pipeline(config);
        for (const SceneReport& scene : report.scenes)
            std::cout << (scene.ok ? "[ok]   " : "[fail] ") << scene.id
                      << (scene.ok ? "" : ": " + scene.error) << "\n";
        if (!report.allOk())
            exitCode = kExitData;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return exitCode;
}
