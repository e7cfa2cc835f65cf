#pragma once

#include "forge/image.hpp"

#include <memory>
#include <string>

namespace forge {

// Mean absolute difference over all channels.
double l1(const Image& a, const Image& b);

// 10 * log10(1 / MSE) for unit dynamic range; +infinity for identical images.
double psnr(const Image& a, const Image& b);

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
// dynamic range 1. Computed per channel over the valid window region and
// averaged. The window shrinks to the largest odd size that fits tiny images.
double ssim(const Image& a, const Image& b);

// Pluggable per-pixel discrepancy metric. compute(x, x) is all-zero and the
// result is symmetric in its arguments.
class PerceptualMetric {
public:
    virtual ~PerceptualMetric() = default;
    virtual std::string name() const = 0;
    virtual GrayMap compute(const Image& a, const Image& b) const = 0;
};

// Non-neural stand-in for a learned perceptual metric: a blend of
// multi-scale absolute luminance difference and gradient-magnitude
// difference, Gaussian-smoothed and normalized by the per-pair maximum.
class ProxyDiscrepancy final : public PerceptualMetric {
public:
    std::string name() const override { return "proxy"; }
    GrayMap compute(const Image& a, const Image& b) const override;
};

// Plain mean-squared per-pixel difference; used to exercise metric
// substitutability.
class L2Discrepancy final : public PerceptualMetric {
public:
    std::string name() const override { return "l2"; }
    GrayMap compute(const Image& a, const Image& b) const override;
};

} // namespace forge
