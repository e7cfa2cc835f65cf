#include "forge/renderer.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

namespace forge {

namespace {

constexpr double kNearClip = 1e-6;
constexpr double kMaxAlpha = 0.99;

constexpr double kSh0 = 0.28209479177387814;
constexpr double kSh1 = 0.4886025119029199;
constexpr double kSh2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kSh3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

struct SplatDraw {
    size_t index;
    double depth;
    Vec2 mean;
    // Inverse 2D covariance (conic) [[ia, ib], [ib, ic]].
    double ia, ib, ic;
    int x0, x1, y0, y1; // inclusive pixel bounds
    double opacity;
    std::array<float, 3> color;
};

void validate_rotation(const Mat3& r) {
    const Mat3 rrt = r * r.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(rrt(i, j) - expected) > 1e-6)
                throw DataError("camera rotation is not orthonormal");
        }
}

} // namespace

void validate_camera(const PinholeCamera& cam) {
    validate_rotation(cam.rotation);
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0))
        throw DataError("camera focal lengths must be positive");
    if (cam.width < 1 || cam.height < 1)
        throw DataError("camera image size must be at least 1x1");
}

std::array<float, 3> evaluate_sh_color(const GaussianCloud& cloud, size_t index,
                                       const Vec3& d) {
    const int basis = cloud.sh_basis_count();
    const double x = d.x, y = d.y, z = d.z;
    std::array<float, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double v = 0.5 + kSh0 * cloud.sh_at(index, c, 0);
        if (basis > 1) {
            v += -kSh1 * y * cloud.sh_at(index, c, 1);
            v += kSh1 * z * cloud.sh_at(index, c, 2);
            v += -kSh1 * x * cloud.sh_at(index, c, 3);
        }
        if (basis > 4) {
            const double xx = x * x, yy = y * y, zz = z * z;
            v += kSh2[0] * x * y * cloud.sh_at(index, c, 4);
            v += kSh2[1] * y * z * cloud.sh_at(index, c, 5);
            v += kSh2[2] * (2.0 * zz - xx - yy) * cloud.sh_at(index, c, 6);
            v += kSh2[3] * x * z * cloud.sh_at(index, c, 7);
            v += kSh2[4] * (xx - yy) * cloud.sh_at(index, c, 8);
        }
        if (basis > 9) {
            const double xx = x * x, yy = y * y, zz = z * z;
            v += kSh3[0] * y * (3.0 * xx - yy) * cloud.sh_at(index, c, 9);
            v += kSh3[1] * x * y * z * cloud.sh_at(index, c, 10);
            v += kSh3[2] * y * (4.0 * zz - xx - yy) * cloud.sh_at(index, c, 11);
            v += kSh3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * cloud.sh_at(index, c, 12);
            v += kSh3[4] * x * (4.0 * zz - xx - yy) * cloud.sh_at(index, c, 13);
            v += kSh3[5] * z * (xx - yy) * cloud.sh_at(index, c, 14);
            v += kSh3[6] * x * (xx - 3.0 * yy) * cloud.sh_at(index, c, 15);
        }
        out[static_cast<size_t>(c)] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

Projected project(const GaussianCloud& cloud, size_t index, const PinholeCamera& cam,
                  const RenderSettings& settings) {
    Projected p;
    const Vec3 posCam = cam.to_camera(cloud.position(index));
    if (posCam.z <= kNearClip)
        return p; // behind the camera: culled

    p.depth = posCam.z;
    p.mean2d = {cam.fx * posCam.x / posCam.z + cam.cx, cam.fy * posCam.y / posCam.z + cam.cy};

    // 3D covariance from scale and rotation.
    const Vec3 ls = cloud.scale_log(index);
    const double sx = std::exp(ls.x), sy = std::exp(ls.y), sz = std::exp(ls.z);
    const Mat3 rq = rotation_from_quat(cloud.rotation(index));
    Mat3 cov3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            cov3(i, j) = rq(i, 0) * sx * sx * rq(j, 0) + rq(i, 1) * sy * sy * rq(j, 1) +
                         rq(i, 2) * sz * sz * rq(j, 2);

    // Perspective Jacobian rows composed with the world-to-camera rotation.
    const double invZ = 1.0 / posCam.z;
    const double j00 = cam.fx * invZ, j02 = -cam.fx * posCam.x * invZ * invZ;
    const double j11 = cam.fy * invZ, j12 = -cam.fy * posCam.y * invZ * invZ;
    Vec3 row0{j00 * cam.rotation(0, 0) + j02 * cam.rotation(2, 0),
              j00 * cam.rotation(0, 1) + j02 * cam.rotation(2, 1),
              j00 * cam.rotation(0, 2) + j02 * cam.rotation(2, 2)};
    Vec3 row1{j11 * cam.rotation(1, 0) + j12 * cam.rotation(2, 0),
              j11 * cam.rotation(1, 1) + j12 * cam.rotation(2, 1),
              j11 * cam.rotation(1, 2) + j12 * cam.rotation(2, 2)};

    const Vec3 c0 = cov3 * row0;
    const Vec3 c1 = cov3 * row1;
    p.covA = dot(row0, c0);
    p.covB = dot(row0, c1);
    p.covC = dot(row1, c1);
    if (settings.lowpassFilter) {
        p.covA += settings.lowpassFloor;
        p.covC += settings.lowpassFloor;
    }
    p.culled = false;
    return p;
}

namespace {

std::vector<SplatDraw> prepare_splats(const GaussianCloud& cloud, const PinholeCamera& cam,
                                      const RenderSettings& settings,
                                      const std::vector<float>& opacities) {
    std::vector<SplatDraw> draws;
    draws.reserve(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
        const Projected proj = project(cloud, i, cam, settings);
        if (proj.culled)
            continue;
        const double det = proj.covA * proj.covC - proj.covB * proj.covB;
        if (!(det > 0.0) || !std::isfinite(det))
            continue;

        SplatDraw d;
        d.index = i;
        d.depth = proj.depth;
        d.mean = proj.mean2d;
        const double invDet = 1.0 / det;
        d.ia = proj.covC * invDet;
        d.ib = -proj.covB * invDet;
        d.ic = proj.covA * invDet;

        const double rx = settings.gaussianRadiusSigma * std::sqrt(std::max(proj.covA, 1e-12));
        const double ry = settings.gaussianRadiusSigma * std::sqrt(std::max(proj.covC, 1e-12));
        d.x0 = std::max(0, static_cast<int>(std::floor(proj.mean2d.x - rx)));
        d.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(proj.mean2d.x + rx)));
        d.y0 = std::max(0, static_cast<int>(std::floor(proj.mean2d.y - ry)));
        d.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(proj.mean2d.y + ry)));
        if (d.x0 > d.x1 || d.y0 > d.y1)
            continue;

        d.opacity = opacities[i];
        d.color = evaluate_sh_color(cloud, i, normalized(cloud.position(i) - cam.center));
        draws.push_back(d);
    }
    // Front to back; ties broken by splat index so sort-order swaps are
    // reproducible.
    std::sort(draws.begin(), draws.end(), [](const SplatDraw& a, const SplatDraw& b) {
        if (a.depth != b.depth)
            return a.depth < b.depth;
        return a.index < b.index;
    });
    return draws;
}

void composite_rows(const std::vector<SplatDraw>& draws, const RenderSettings& settings,
                    int width, int yBegin, int yEnd, Image& image, GrayMap& weightSum,
                    GrayMap& transmittance) {
    const double maxQ =
        settings.gaussianRadiusSigma * settings.gaussianRadiusSigma;
    std::vector<double> trans(static_cast<size_t>(width));
    std::vector<double> wsum(static_cast<size_t>(width));
    std::vector<double> colR(static_cast<size_t>(width));
    std::vector<double> colG(static_cast<size_t>(width));
    std::vector<double> colB(static_cast<size_t>(width));
    for (int y = yBegin; y < yEnd; ++y) {
        std::fill(trans.begin(), trans.end(), 1.0);
        std::fill(wsum.begin(), wsum.end(), 0.0);
        std::fill(colR.begin(), colR.end(), 0.0);
        std::fill(colG.begin(), colG.end(), 0.0);
        std::fill(colB.begin(), colB.end(), 0.0);
        for (const SplatDraw& d : draws) {
            if (y < d.y0 || y > d.y1)
                continue;
            const double dy = (y + 0.5) - d.mean.y;
            for (int x = d.x0; x <= d.x1; ++x) {
                double& t = trans[static_cast<size_t>(x)];
                if (t < 1e-4)
                    continue;
                const double dx = (x + 0.5) - d.mean.x;
                const double q = d.ia * dx * dx + 2.0 * d.ib * dx * dy + d.ic * dy * dy;
                if (q > maxQ || q < 0.0)
                    continue;
                const double alpha = std::min(kMaxAlpha, d.opacity * std::exp(-0.5 * q));
                if (alpha < settings.alphaCutoff)
                    continue;
                const double w = t * alpha;
                wsum[static_cast<size_t>(x)] += w;
                colR[static_cast<size_t>(x)] += w * d.color[0];
                colG[static_cast<size_t>(x)] += w * d.color[1];
                colB[static_cast<size_t>(x)] += w * d.color[2];
                t *= 1.0 - alpha;
            }
        }
        for (int x = 0; x < width; ++x) {
            const double t = trans[static_cast<size_t>(x)];
            image.at(x, y, 0) = static_cast<float>(
                std::clamp(colR[static_cast<size_t>(x)] + t * settings.background[0], 0.0, 1.0));
            image.at(x, y, 1) = static_cast<float>(
                std::clamp(colG[static_cast<size_t>(x)] + t * settings.background[1], 0.0, 1.0));
            image.at(x, y, 2) = static_cast<float>(
                std::clamp(colB[static_cast<size_t>(x)] + t * settings.background[2], 0.0, 1.0));
            weightSum.at(x, y) = static_cast<float>(wsum[static_cast<size_t>(x)]);
            transmittance.at(x, y) = static_cast<float>(t);
        }
    }
}

} // namespace

RenderDiagnostics render_with_diagnostics(const GaussianCloud& cloud, const PinholeCamera& cam,
                                          const RenderSettings& settings) {
    validate_camera(cam);
    RenderDiagnostics out;
    out.image = Image(cam.width, cam.height);
    out.weightSum = GrayMap(cam.width, cam.height);
    out.transmittance = GrayMap(cam.width, cam.height, 1.0f);

    const ActivatedView activated = activate(cloud);
    const std::vector<SplatDraw> draws = prepare_splats(cloud, cam, settings, activated.opacities);

    int threads = settings.threads > 0
                      ? settings.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, cam.height);
    if (threads == 1 || cam.height < 8) {
        composite_rows(draws, settings, cam.width, 0, cam.height, out.image, out.weightSum,
                       out.transmittance);
    } else {
        // Each worker owns a disjoint row band.
        std::vector<std::thread> pool;
        const int rowsPer = (cam.height + threads - 1) / threads;
        for (int tIdx = 0; tIdx < threads; ++tIdx) {
            const int yBegin = tIdx * rowsPer;
            const int yEnd = std::min(cam.height, yBegin + rowsPer);
            if (yBegin >= yEnd)
                break;
            pool.emplace_back([&, yBegin, yEnd] {
                composite_rows(draws, settings, cam.width, yBegin, yEnd, out.image,
                               out.weightSum, out.transmittance);
            });
        }
        for (std::thread& t : pool)
            t.join();
    }
    return out;
}

Image render(const GaussianCloud& cloud, const PinholeCamera& cam,
             const RenderSettings& settings) {
    return render_with_diagnostics(cloud, cam, settings).image;
}

} // namespace forge
