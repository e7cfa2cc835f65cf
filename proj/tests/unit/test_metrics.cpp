#include "forge/heatmap.hpp"
#include "forge/metrics.hpp"

#include "forge/error.hpp"
#include "forge/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace forge;

namespace {

Image constant_image(int size, float r, float g, float b) {
    Image img(size, size);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[p * 3] = r;
        img.data[p * 3 + 1] = g;
        img.data[p * 3 + 2] = b;
    }
    return img;
}

Image checkerboard(int size) {
    Image img(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const float v = (x + y) % 2 == 0 ? 1.0f : 0.0f;
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = v;
        }
    return img;
}

Image random_image(int size, uint64_t seed) {
    Image img(size, size);
    Rng rng(seed);
    for (float& v : img.data)
        v = static_cast<float>(rng.uniform());
    return img;
}

Image inverted(const Image& img) {
    Image out = img;
    for (float& v : out.data)
        v = 1.0f - v;
    return out;
}

} // namespace

TEST_CASE("identity metrics: ssim 1, l1 0, psnr infinite") {
    const Image img = random_image(24, 5);
    CHECK(std::abs(ssim(img, img) - 1.0) < 1e-9);
    CHECK(l1(img, img) == 0.0);
    CHECK(std::isinf(psnr(img, img)));
}

TEST_CASE("uniform 0.1 difference gives 20 dB") {
    const Image a = constant_image(16, 0.25f, 0.25f, 0.25f);
    const Image b = constant_image(16, 0.35f, 0.35f, 0.35f);
    CHECK(std::abs(psnr(a, b) - 20.0) < 0.01);
    CHECK(l1(a, b) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("checkerboard against its inverse has negative ssim") {
    const Image board = checkerboard(24);
    CHECK(ssim(board, inverted(board)) < 0.0);
}

TEST_CASE("ssim is symmetric") {
    const Image a = random_image(20, 7);
    const Image b = random_image(20, 8);
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-9);
}

TEST_CASE("psnr strictly decreases with noise amplitude") {
    const Image base = random_image(24, 11);
    double previous = std::numeric_limits<double>::infinity();
    for (const double amplitude : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        Image noisy = base;
        Rng rng(99);
        for (float& v : noisy.data)
            v = std::clamp(v + static_cast<float>(amplitude * (rng.uniform() - 0.5) * 2.0),
                           0.0f, 1.0f);
        const double value = psnr(base, noisy);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("size mismatch raises DimensionMismatch") {
    CHECK_THROWS_AS(psnr(Image(8, 8), Image(9, 8)), DimensionMismatch);
    CHECK_THROWS_AS(ssim(Image(8, 8), Image(8, 9)), DimensionMismatch);
    CHECK_THROWS_AS(l1(Image(8, 8), Image(4, 4)), DimensionMismatch);
}

TEST_CASE("proxy metric is zero iff images match") {
    const ProxyDiscrepancy metric;
    const Image img = random_image(32, 17);
    const GrayMap same = metric.compute(img, img);
    for (const float v : same.data)
        CHECK(v == 0.0f);

    Image other = img;
    other.at(10, 12, 1) += 0.3f;
    const GrayMap diff = metric.compute(img, other);
    float maxv = 0.0f;
    for (const float v : diff.data)
        maxv = std::max(maxv, v);
    CHECK(maxv > 0.0f);
}

TEST_CASE("proxy metric is symmetric") {
    const ProxyDiscrepancy metric;
    const Image a = random_image(24, 3);
    const Image b = random_image(24, 4);
    const GrayMap ab = metric.compute(a, b);
    const GrayMap ba = metric.compute(b, a);
    for (size_t i = 0; i < ab.data.size(); ++i)
        CHECK(ab.data[i] == doctest::Approx(ba.data[i]).epsilon(1e-6));
}

TEST_CASE("inverting a bright flat image saturates the proxy map") {
    // Flat 0.9 luminance; inversion leaves a uniform 0.8 gap and no gradient
    // change, so the max-normalized map is 1 everywhere.
    const Image a = constant_image(32, 0.9f, 0.9f, 0.9f);
    const GrayMap map = ProxyDiscrepancy().compute(a, inverted(a));
    double mean = 0.0;
    for (const float v : map.data)
        mean += v;
    mean /= double(map.data.size());
    CHECK(mean > 0.5);
}

TEST_CASE("proxy map mass stays near a localized corruption") {
    const int size = 64;
    Image clean = constant_image(size, 0.4f, 0.4f, 0.4f);
    Image bad = clean;
    // 16x16 patch aligned to the multi-scale grid.
    const int px = 24, py = 24, patch = 16;
    Rng rng(55);
    for (int y = py; y < py + patch; ++y)
        for (int x = px; x < px + patch; ++x)
            for (int c = 0; c < 3; ++c)
                bad.at(x, y, c) = static_cast<float>(rng.uniform());

    const GrayMap map = ProxyDiscrepancy().compute(bad, clean);
    double inside = 0.0, total = 0.0;
    const int grow = 3;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            total += map.at(x, y);
            if (x >= px - grow && x < px + patch + grow && y >= py - grow &&
                y < py + patch + grow)
                inside += map.at(x, y);
        }
    CHECK(inside / total >= 0.8);
}

TEST_CASE("annotate zeroes boundaries and normalizes to the unit range") {
    const ProxyDiscrepancy metric;
    Video clean, degraded;
    for (int t = 0; t < 6; ++t) {
        clean.push_back(constant_image(24, 0.5f, 0.5f, 0.5f));
        degraded.push_back(constant_image(24, 0.5f, 0.5f, 0.5f));
    }
    // Mid-frame corruption only.
    for (int t = 2; t <= 3; ++t)
        for (int y = 8; y < 16; ++y)
            for (int x = 8; x < 16; ++x)
                degraded[static_cast<size_t>(t)].at(x, y, 0) = 1.0f;

    const HeatmapVolume volume = annotate(degraded, clean, metric);
    REQUIRE(volume.size() == 6);
    for (const float v : volume.frames.front().data)
        CHECK(v == 0.0f);
    for (const float v : volume.frames.back().data)
        CHECK(v == 0.0f);

    float maxMid = 0.0f, maxOuter = 0.0f;
    for (const float v : volume.frames[2].data)
        maxMid = std::max(maxMid, v);
    for (const float v : volume.frames[1].data)
        maxOuter = std::max(maxOuter, v);
    for (const float v : volume.frames[4].data)
        maxOuter = std::max(maxOuter, v);
    CHECK(maxMid == 1.0f); // per-clip min-max normalization reaches 1
    CHECK(maxOuter == 0.0f);
    for (const GrayMap& frame : volume.frames)
        for (const float v : frame.data) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
}

TEST_CASE("annotate of identical videos is all zero") {
    const ProxyDiscrepancy metric;
    Video video;
    for (int t = 0; t < 4; ++t)
        video.push_back(random_image(16, static_cast<uint64_t>(t)));
    const HeatmapVolume volume = annotate(video, video, metric);
    for (const GrayMap& frame : volume.frames)
        for (const float v : frame.data)
            CHECK(v == 0.0f);
}

TEST_CASE("annotate honors any metric satisfying the interface") {
    const L2Discrepancy metric;
    Video clean, degraded;
    for (int t = 0; t < 5; ++t) {
        clean.push_back(constant_image(16, 0.2f, 0.2f, 0.2f));
        degraded.push_back(constant_image(16, 0.2f, 0.2f, 0.2f));
    }
    degraded[2].at(8, 8, 0) = 1.0f;
    const HeatmapVolume volume = annotate(degraded, clean, metric);
    CHECK(volume.frames[2].at(8, 8) == 1.0f);
    for (const float v : volume.frames.front().data)
        CHECK(v == 0.0f);
}

TEST_CASE("annotate validates frame counts and sizes") {
    const L2Discrepancy metric;
    Video a(3, Image(8, 8)), b(4, Image(8, 8));
    CHECK_THROWS_AS(annotate(a, b, metric), LengthMismatch);
    Video c(3, Image(8, 8)), d(3, Image(9, 8));
    CHECK_THROWS_AS(annotate(c, d, metric), DimensionMismatch);
}
