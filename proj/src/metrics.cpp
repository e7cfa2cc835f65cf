#include "forge/metrics.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace forge {

namespace {

void require_same_size(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch("image sizes differ: " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                "x" + std::to_string(b.height));
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(static_cast<size_t>(size));
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - half;
        k[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[static_cast<size_t>(i)];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

GrayMap luminance(const Image& img) {
    GrayMap lum(img.width, img.height);
    for (size_t p = 0; p < lum.data.size(); ++p)
        lum.data[p] = 0.299f * img.data[p * 3] + 0.587f * img.data[p * 3 + 1] +
                      0.114f * img.data[p * 3 + 2];
    return lum;
}

GrayMap downsample2(const GrayMap& map) {
    GrayMap out(std::max(1, map.width / 2), std::max(1, map.height / 2));
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            double sum = 0.0;
            int count = 0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const int sx = x * 2 + dx, sy = y * 2 + dy;
                    if (sx < map.width && sy < map.height) {
                        sum += map.at(sx, sy);
                        ++count;
                    }
                }
            out.at(x, y) = static_cast<float>(sum / count);
        }
    return out;
}

GrayMap gradient_magnitude(const GrayMap& map) {
    GrayMap out(map.width, map.height);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const int xm = std::max(0, x - 1), xp = std::min(map.width - 1, x + 1);
            const int ym = std::max(0, y - 1), yp = std::min(map.height - 1, y + 1);
            const double gx = 0.5 * (map.at(xp, y) - map.at(xm, y));
            const double gy = 0.5 * (map.at(x, yp) - map.at(x, ym));
            out.at(x, y) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
        }
    return out;
}

// Separable Gaussian blur with clamped borders.
GrayMap gaussian_blur(const GrayMap& map, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    const std::vector<double> kernel = gaussian_kernel(2 * radius + 1, sigma);
    GrayMap tmp(map.width, map.height), out(map.width, map.height);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            double sum = 0.0;
            for (int k = -radius; k <= radius; ++k)
                sum += kernel[static_cast<size_t>(k + radius)] *
                       map.at(std::clamp(x + k, 0, map.width - 1), y);
            tmp.at(x, y) = static_cast<float>(sum);
        }
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            double sum = 0.0;
            for (int k = -radius; k <= radius; ++k)
                sum += kernel[static_cast<size_t>(k + radius)] *
                       tmp.at(x, std::clamp(y + k, 0, map.height - 1));
            out.at(x, y) = static_cast<float>(sum);
        }
    return out;
}

} // namespace

double l1(const Image& a, const Image& b) {
    require_same_size(a, b);
    double sum = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i)
        sum += std::abs(double(a.data[i]) - double(b.data[i]));
    return a.data.empty() ? 0.0 : sum / static_cast<double>(a.data.size());
}

double psnr(const Image& a, const Image& b) {
    require_same_size(a, b);
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = double(a.data[i]) - double(b.data[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

// Valid-region separable convolution with a symmetric 1D kernel.
std::vector<double> valid_blur(const std::vector<double>& plane, int width, int height,
                               const std::vector<double>& kernel, int& outW, int& outH) {
    const int k = static_cast<int>(kernel.size());
    outW = width - k + 1;
    outH = height - k + 1;
    std::vector<double> rows(static_cast<size_t>(outW) * static_cast<size_t>(height));
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < outW; ++x) {
            double sum = 0.0;
            for (int i = 0; i < k; ++i)
                sum += kernel[static_cast<size_t>(i)] *
                       plane[static_cast<size_t>(y) * width + static_cast<size_t>(x + i)];
            rows[static_cast<size_t>(y) * outW + static_cast<size_t>(x)] = sum;
        }
    std::vector<double> out(static_cast<size_t>(outW) * static_cast<size_t>(outH));
    for (int y = 0; y < outH; ++y)
        for (int x = 0; x < outW; ++x) {
            double sum = 0.0;
            for (int i = 0; i < k; ++i)
                sum += kernel[static_cast<size_t>(i)] *
                       rows[static_cast<size_t>(y + i) * outW + static_cast<size_t>(x)];
            out[static_cast<size_t>(y) * outW + static_cast<size_t>(x)] = sum;
        }
    return out;
}

} // namespace

double ssim(const Image& a, const Image& b) {
    require_same_size(a, b);
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    int window = 11;
    const int minDim = std::min(a.width, a.height);
    if (window > minDim)
        window = minDim % 2 == 1 ? minDim : minDim - 1;
    if (window < 1)
        throw DimensionMismatch("image too small for SSIM");
    const std::vector<double> kernel = gaussian_kernel(window, 1.5);

    const size_t pixels = a.pixel_count();
    std::vector<double> pa(pixels), pb(pixels), paa(pixels), pbb(pixels), pab(pixels);
    double total = 0.0;
    size_t count = 0;
    for (int c = 0; c < 3; ++c) {
        for (size_t p = 0; p < pixels; ++p) {
            const double va = a.data[p * 3 + static_cast<size_t>(c)];
            const double vb = b.data[p * 3 + static_cast<size_t>(c)];
            pa[p] = va;
            pb[p] = vb;
            paa[p] = va * va;
            pbb[p] = vb * vb;
            pab[p] = va * vb;
        }
        int vw = 0, vh = 0;
        const std::vector<double> muA = valid_blur(pa, a.width, a.height, kernel, vw, vh);
        const std::vector<double> muB = valid_blur(pb, a.width, a.height, kernel, vw, vh);
        const std::vector<double> sAA = valid_blur(paa, a.width, a.height, kernel, vw, vh);
        const std::vector<double> sBB = valid_blur(pbb, a.width, a.height, kernel, vw, vh);
        const std::vector<double> sAB = valid_blur(pab, a.width, a.height, kernel, vw, vh);
        for (size_t p = 0; p < muA.size(); ++p) {
            const double varA = sAA[p] - muA[p] * muA[p];
            const double varB = sBB[p] - muB[p] * muB[p];
            const double cov = sAB[p] - muA[p] * muB[p];
            const double numerator = (2.0 * muA[p] * muB[p] + c1) * (2.0 * cov + c2);
            const double denominator =
                (muA[p] * muA[p] + muB[p] * muB[p] + c1) * (varA + varB + c2);
            total += numerator / denominator;
            ++count;
        }
    }
    return count > 0 ? total / static_cast<double>(count) : 1.0;
}

GrayMap ProxyDiscrepancy::compute(const Image& a, const Image& b) const {
    require_same_size(a, b);
    const GrayMap lumA = luminance(a);
    const GrayMap lumB = luminance(b);

    // Multi-scale |luminance| differences, each scale upsampled back.
    GrayMap msDiff(a.width, a.height, 0.0f);
    GrayMap curA = lumA, curB = lumB;
    int scale = 1;
    constexpr int kScales = 3;
    for (int s = 0; s < kScales; ++s) {
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                const int sx = std::min(curA.width - 1, x / scale);
                const int sy = std::min(curA.height - 1, y / scale);
                msDiff.at(x, y) += std::abs(curA.at(sx, sy) - curB.at(sx, sy)) / kScales;
            }
        curA = downsample2(curA);
        curB = downsample2(curB);
        scale *= 2;
    }

    const GrayMap gradA = gradient_magnitude(lumA);
    const GrayMap gradB = gradient_magnitude(lumB);

    GrayMap blend(a.width, a.height);
    for (size_t i = 0; i < blend.data.size(); ++i)
        blend.data[i] =
            0.5f * msDiff.data[i] + 0.5f * std::abs(gradA.data[i] - gradB.data[i]);

    GrayMap smoothed = gaussian_blur(blend, 1.0);
    float maxValue = 0.0f;
    for (const float v : smoothed.data)
        maxValue = std::max(maxValue, v);
    if (maxValue > 0.0f)
        for (float& v : smoothed.data)
            v /= maxValue;
    return smoothed;
}

GrayMap L2Discrepancy::compute(const Image& a, const Image& b) const {
    require_same_size(a, b);
    GrayMap out(a.width, a.height);
    for (size_t p = 0; p < out.data.size(); ++p) {
        double sum = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = double(a.data[p * 3 + static_cast<size_t>(c)]) -
                             double(b.data[p * 3 + static_cast<size_t>(c)]);
            sum += d * d;
        }
        out.data[p] = static_cast<float>(sum / 3.0);
    }
    return out;
}

} // namespace forge
