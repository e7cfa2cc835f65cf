#pragma once

#include "forge/gaussian_cloud.hpp"
#include "forge/image.hpp"
#include "forge/renderer.hpp"
#include "forge/spherical_path.hpp"

#include <functional>
#include <vector>

namespace forge {

struct LossConfig {
    double lambdaGen = 1.0;  // weight of the generative term
    double lambdaL1 = 0.8;
    double lambdaSsim = 0.2;
};

// A camera with its supervision image.
struct SupervisedView {
    PinholeCamera camera;
    Image image;
};

// lambdaL1 * L1 + lambdaSsim * (1 - SSIM), averaged over the pairs of each
// term: total = L_recon(sparse) + lambdaGen * L_gen(novel).
double combined_loss(const std::vector<Image>& rendersSparse,
                     const std::vector<Image>& gtSparse,
                     const std::vector<Image>& rendersNovel,
                     const std::vector<Image>& restoredNovel, const LossConfig& config);

struct OptimizeOptions {
    int steps = 100;
    double learningRate = 0.05;
    double fdEpsilon = 1e-3;       // scaled per parameter by magnitude
    int maxHalvings = 5;            // line-search retreats per step
    size_t scalarBudget = 2000;     // guard: N * params-per-Gaussian
    int maxImageDim = 64;
    int probeThreads = 1;           // workers for the finite-difference probes
    RenderSettings render;
    std::vector<double>* lossCurve = nullptr; // optional per-step log
};

// Central finite-difference gradient descent on all cloud parameters with a
// monotone-accept line search: the returned cloud never has a higher
// combined loss than the input. Throws BudgetExceeded for scenes past the
// desk-scale guard.
GaussianCloud optimize(const GaussianCloud& cloud, const std::vector<SupervisedView>& sparseViews,
                       const std::vector<SupervisedView>& restoredNovel, const LossConfig& config,
                       const OptimizeOptions& options);

// Restores a rendered trajectory video; the trajectory is passed as context
// (the identity restorer ignores it).
using Restorer = std::function<Video(const Video&, const CameraTrajectory&)>;

struct ClosedLoopOptions {
    int novelPerIteration = 4;
    OptimizeOptions optimize;
};

// Per iteration: sample a spherical trajectory between two sparse views,
// render the interior novel views, run the restorer, append the results to
// the generative supervision set, then optimize.
GaussianCloud closed_loop(const GaussianCloud& cloud,
                          const std::vector<SupervisedView>& sparseViews,
                          const Restorer& restorer, int iterations, const LossConfig& config,
                          const ClosedLoopOptions& options);

} // namespace forge
