#include "forge/optimize.hpp"

#include "forge/error.hpp"
#include "forge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace forge {

namespace {

double photometric(const std::vector<Image>& renders, const std::vector<Image>& targets,
                   const LossConfig& config) {
    if (renders.size() != targets.size())
        throw DimensionMismatch("render/target pair counts differ");
    if (renders.empty())
        return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < renders.size(); ++i)
        sum += config.lambdaL1 * l1(renders[i], targets[i]) +
               config.lambdaSsim * (1.0 - ssim(renders[i], targets[i]));
    return sum / static_cast<double>(renders.size());
}

// Flat parameter vector over all cloud attributes.
std::vector<double> flatten(const GaussianCloud& cloud) {
    std::vector<double> params;
    params.reserve(cloud.positions.size() + cloud.logScales.size() + cloud.rotations.size() +
                   cloud.opacityLogits.size() + cloud.shCoeffs.size());
    for (const float v : cloud.positions)
        params.push_back(v);
    for (const float v : cloud.logScales)
        params.push_back(v);
    for (const float v : cloud.rotations)
        params.push_back(v);
    for (const float v : cloud.opacityLogits)
        params.push_back(v);
    for (const float v : cloud.shCoeffs)
        params.push_back(v);
    return params;
}

void unflatten(const std::vector<double>& params, GaussianCloud& cloud) {
    size_t k = 0;
    for (float& v : cloud.positions)
        v = static_cast<float>(params[k++]);
    for (float& v : cloud.logScales)
        v = static_cast<float>(params[k++]);
    for (float& v : cloud.rotations)
        v = static_cast<float>(params[k++]);
    for (float& v : cloud.opacityLogits)
        v = static_cast<float>(params[k++]);
    for (float& v : cloud.shCoeffs)
        v = static_cast<float>(params[k++]);
}

} // namespace

double combined_loss(const std::vector<Image>& rendersSparse,
                     const std::vector<Image>& gtSparse,
                     const std::vector<Image>& rendersNovel,
                     const std::vector<Image>& restoredNovel, const LossConfig& config) {
    const double recon = photometric(rendersSparse, gtSparse, config);
    const double gen = photometric(rendersNovel, restoredNovel, config);
    return recon + config.lambdaGen * gen;
}

GaussianCloud optimize(const GaussianCloud& cloud, const std::vector<SupervisedView>& sparseViews,
                       const std::vector<SupervisedView>& restoredNovel, const LossConfig& config,
                       const OptimizeOptions& options) {
    const size_t perGaussian = 11 + 3 * static_cast<size_t>(cloud.sh_basis_count());
    if (cloud.size() * perGaussian > options.scalarBudget)
        throw BudgetExceeded("cloud holds " + std::to_string(cloud.size() * perGaussian) +
                             " scalars, budget is " + std::to_string(options.scalarBudget));
    for (const auto& view : sparseViews)
        if (view.camera.width > options.maxImageDim || view.camera.height > options.maxImageDim)
            throw BudgetExceeded("view exceeds the " + std::to_string(options.maxImageDim) +
                                 "px desk-scale guard");

    for (const auto& view : restoredNovel)
        if (view.camera.width > options.maxImageDim || view.camera.height > options.maxImageDim)
            throw BudgetExceeded("restored view exceeds the " +
                                 std::to_string(options.maxImageDim) + "px desk-scale guard");

    const auto evaluate_with = [&](const std::vector<double>& params, GaussianCloud& scratch) {
        unflatten(params, scratch);
        std::vector<Image> rendersSparse, rendersNovel;
        rendersSparse.reserve(sparseViews.size());
        for (const auto& view : sparseViews)
            rendersSparse.push_back(render(scratch, view.camera, options.render));
        rendersNovel.reserve(restoredNovel.size());
        std::vector<Image> restored;
        restored.reserve(restoredNovel.size());
        for (const auto& view : restoredNovel) {
            rendersNovel.push_back(render(scratch, view.camera, options.render));
            restored.push_back(view.image);
        }
        std::vector<Image> gt;
        gt.reserve(sparseViews.size());
        for (const auto& view : sparseViews)
            gt.push_back(view.image);
        return combined_loss(rendersSparse, gt, rendersNovel, restored, config);
    };
    GaussianCloud mainScratch = cloud;
    const auto evaluate = [&](const std::vector<double>& params) {
        return evaluate_with(params, mainScratch);
    };

    std::vector<double> params = flatten(cloud);
    double loss = evaluate(params);
    if (options.lossCurve)
        options.lossCurve->push_back(loss);

    std::vector<double> gradient(params.size());
    // Working rate carries across steps so a scene whose gradient scale does
    // not fit the base rate still makes progress within the per-step
    // halving cap.
    double workingRate = options.learningRate;
    const int probeThreads =
        std::clamp(options.probeThreads, 1, static_cast<int>(params.size()));
    for (int step = 0; step < options.steps; ++step) {
        // Each probe renders independently; parallel workers own their own
        // scratch cloud and parameter copy.
        const auto probe_range = [&](size_t begin, size_t end) {
            GaussianCloud scratch = cloud;
            std::vector<double> local = params;
            for (size_t i = begin; i < end; ++i) {
                const double h = options.fdEpsilon * std::max(1.0, std::abs(local[i]));
                const double saved = local[i];
                local[i] = saved + h;
                const double lossPlus = evaluate_with(local, scratch);
                local[i] = saved - h;
                const double lossMinus = evaluate_with(local, scratch);
                local[i] = saved;
                gradient[i] = (lossPlus - lossMinus) / (2.0 * h);
            }
        };
        if (probeThreads == 1) {
            probe_range(0, params.size());
        } else {
            std::vector<std::thread> pool;
            const size_t chunk = (params.size() + probeThreads - 1) / probeThreads;
            for (int w = 0; w < probeThreads; ++w) {
                const size_t begin = static_cast<size_t>(w) * chunk;
                const size_t end = std::min(params.size(), begin + chunk);
                if (begin >= end)
                    break;
                pool.emplace_back([&probe_range, begin, end] { probe_range(begin, end); });
            }
            for (std::thread& t : pool)
                t.join();
        }

        double lr = workingRate;
        bool accepted = false;
        int halvings = 0;
        std::vector<double> trial(params.size());
        for (; halvings <= options.maxHalvings; ++halvings) {
            for (size_t i = 0; i < params.size(); ++i)
                trial[i] = params[i] - lr * gradient[i];
            const double trialLoss = evaluate(trial);
            if (trialLoss <= loss) {
                params.swap(trial);
                loss = trialLoss;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (accepted)
            workingRate = std::min(options.learningRate, halvings == 0 ? lr * 2.0 : lr);
        else
            workingRate = lr; // keep the current point, retry lower next step
        if (options.lossCurve)
            options.lossCurve->push_back(loss);
    }

    GaussianCloud result = cloud;
    unflatten(params, result);
    // The renderer normalizes rotations on use, so normalizing the stored
    // quaternions does not change any rendered image.
    result.validate_and_normalize();
    return result;
}

GaussianCloud closed_loop(const GaussianCloud& cloud,
                          const std::vector<SupervisedView>& sparseViews,
                          const Restorer& restorer, int iterations, const LossConfig& config,
                          const ClosedLoopOptions& options) {
    if (sparseViews.size() < 2)
        throw DataError("closed loop needs at least two sparse views");

    GaussianCloud current = cloud;
    std::vector<SupervisedView> generative;
    for (int iter = 0; iter < iterations; ++iter) {
        const size_t pairIndex = static_cast<size_t>(iter) % (sparseViews.size() - 1);
        TrajectorySpec spec;
        spec.startView = sparseViews[pairIndex].camera;
        spec.endView = sparseViews[pairIndex + 1].camera;
        spec.nIntermediate = options.novelPerIteration;
        const CameraTrajectory trajectory = spherical_trajectory(spec);

        // Interior frames only; the endpoints are already supervised by GT.
        Video rendered;
        std::vector<PinholeCamera> novelCams;
        for (size_t i = 1; i + 1 < trajectory.size(); ++i) {
            novelCams.push_back(trajectory.camera(i));
            rendered.push_back(render(current, novelCams.back(), options.optimize.render));
        }
        const Video restored = restorer(rendered, trajectory);
        if (restored.size() != rendered.size())
            throw LengthMismatch("restorer changed the frame count");
        for (size_t i = 0; i < restored.size(); ++i)
            generative.push_back({novelCams[i], restored[i]});

        current = optimize(current, sparseViews, generative, config, options.optimize);
    }
    if (iterations == 0)
        current = optimize(current, sparseViews, {}, config, options.optimize);
    return current;
}

} // namespace forge
