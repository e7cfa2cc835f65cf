#include "forge/renderer.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace forge;

namespace {

float logit_f(double p) { return static_cast<float>(std::log(p / (1.0 - p))); }

} // namespace

TEST_CASE("empty cloud renders the uniform background") {
    RenderSettings settings;
    settings.background = {0.25f, 0.5f, 0.75f};
    const Image img = render(make_empty_cloud(0), test::look_forward_camera(16, 20.0), settings);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        CHECK(img.data[p * 3] == doctest::Approx(0.25f));
        CHECK(img.data[p * 3 + 1] == doctest::Approx(0.5f));
        CHECK(img.data[p * 3 + 2] == doctest::Approx(0.75f));
    }
}

TEST_CASE("on-axis gaussian projects to the principal point") {
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, 5.0}, {-1, -1, -1}, 0.0f, 1, 0, 0);
    const PinholeCamera cam = test::look_forward_camera(64, 50.0);
    const Projected proj = project(cloud, 0, cam);
    REQUIRE_FALSE(proj.culled);
    CHECK(proj.mean2d.x == doctest::Approx(cam.cx));
    CHECK(proj.mean2d.y == doctest::Approx(cam.cy));
    CHECK(proj.depth == doctest::Approx(5.0));
}

TEST_CASE("isotropic on-axis covariance matches the pinhole closed form") {
    // cov2d = (f * s / d)^2 * I for an isotropic splat on the optical axis
    const double s = std::exp(-1.0), d = 5.0, f = 50.0;
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, d}, {-1, -1, -1}, 0.0f, 1, 0, 0);
    const Projected proj = project(cloud, 0, test::look_forward_camera(64, f));
    const double expected = (f * s / d) * (f * s / d);
    CHECK(proj.covA == doctest::Approx(expected).epsilon(1e-9));
    CHECK(proj.covC == doctest::Approx(expected).epsilon(1e-9));
    CHECK(proj.covB == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gaussian behind the camera is culled") {
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, -3.0}, {0, 0, 0}, 0.0f, 1, 0, 0);
    CHECK(project(cloud, 0, test::look_forward_camera(32, 30.0)).culled);
}

TEST_CASE("single centered splat peaks at its mean and decays radially") {
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, 4.0}, {-1.0, -1.0, -1.0}, logit_f(0.99), 1, 1, 1);
    const PinholeCamera cam = test::look_forward_camera(33, 40.0); // odd size: exact center pixel
    const Image img = render(cloud, cam);

    // Analytic single-splat compositing at pixel centers: value = alpha(q).
    const Projected proj = project(cloud, 0, cam);
    const auto analytic = [&](int x, int y) {
        const double dx = (x + 0.5) - proj.mean2d.x;
        const double dy = (y + 0.5) - proj.mean2d.y;
        const double det = proj.covA * proj.covC - proj.covB * proj.covB;
        const double q = (proj.covC * dx * dx - 2 * proj.covB * dx * dy + proj.covA * dy * dy) /
                         det;
        return std::min(0.99, 0.99 * std::exp(-0.5 * q));
    };

    int peakX = 0, peakY = 0;
    float peak = -1.0f;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y, 0) > peak) {
                peak = img.at(x, y, 0);
                peakX = x;
                peakY = y;
            }
    CHECK(peakX == 16);
    CHECK(peakY == 16);
    CHECK(img.at(16, 16, 0) == doctest::Approx(analytic(16, 16)).epsilon(1e-5));
    CHECK(img.at(20, 16, 0) == doctest::Approx(analytic(20, 16)).epsilon(1e-5));
    // Radial decay along a scanline.
    for (int x = 17; x < 28; ++x)
        CHECK(img.at(x, 16, 0) <= img.at(x - 1, 16, 0) + 1e-7f);
}

TEST_CASE("two overlapping splats reproduce popping on depth swap") {
    const auto scene = [](double redDepth, double blueDepth) {
        GaussianCloud cloud;
        cloud.shDegree = 0;
        test::append_gaussian(cloud, {0, 0, redDepth}, {-0.5, -0.5, -0.5}, logit_f(0.9), 1, 0, 0);
        test::append_gaussian(cloud, {0, 0, blueDepth}, {-0.5, -0.5, -0.5}, logit_f(0.9), 0, 0, 1);
        return cloud;
    };
    const PinholeCamera cam = test::look_forward_camera(33, 40.0);

    const Image nearRed = render(scene(3.0, 5.0), cam);
    CHECK(nearRed.at(16, 16, 0) > nearRed.at(16, 16, 2)); // red in front dominates

    const Image nearBlue = render(scene(5.0, 3.0), cam);
    CHECK(nearBlue.at(16, 16, 2) > nearBlue.at(16, 16, 0)); // swap flips dominance

    double linf = 0.0;
    for (int c = 0; c < 3; ++c)
        linf = std::max(linf, std::abs(double(nearRed.at(16, 16, c)) -
                                       double(nearBlue.at(16, 16, c))));
    CHECK(linf > 0.2);
}

TEST_CASE("per-pixel weights plus transmittance conserve unity") {
    const GaussianCloud cloud = test::random_cloud(200, 1, 31337);
    PinholeCamera cam = test::look_forward_camera(48, 30.0, {0, 0, -4.0});
    const RenderDiagnostics diag = render_with_diagnostics(cloud, cam);
    for (size_t p = 0; p < diag.weightSum.data.size(); ++p)
        CHECK(std::abs(1.0 - (double(diag.weightSum.data[p]) +
                              double(diag.transmittance.data[p]))) < 1e-6);
}

TEST_CASE("determinism: equal inputs give bit-identical images") {
    const GaussianCloud cloud = test::random_cloud(64, 1, 555);
    const PinholeCamera cam = test::look_forward_camera(40, 25.0, {0, 0, -4.0});
    const Image a = render(cloud, cam);
    const Image b = render(cloud, cam);
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0);
}

TEST_CASE("behind-camera gaussians never change the image") {
    GaussianCloud cloud = test::random_cloud(32, 0, 777);
    const PinholeCamera cam = test::look_forward_camera(32, 25.0, {0, 0, -4.0});
    const Image before = render(cloud, cam);

    test::append_gaussian(cloud, {0.0, 0.0, -50.0}, {2, 2, 2}, 5.0f, 1, 1, 1);
    const Image after = render(cloud, cam);
    CHECK(std::memcmp(before.data.data(), after.data.data(),
                      before.data.size() * sizeof(float)) == 0);
}
