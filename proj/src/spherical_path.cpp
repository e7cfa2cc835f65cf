#include "forge/spherical_path.hpp"

#include "forge/error.hpp"

#include <algorithm>
#include <cmath>

namespace forge {

namespace {

// Midpoint of the closest points between two rays; falls back to the
// midpoint of the origins when the rays are near parallel.
Vec3 lookat_midpoint(const PinholeCamera& a, const PinholeCamera& b) {
    const Vec3 da = a.forward();
    const Vec3 db = b.forward();
    const Vec3 w = a.center - b.center;
    const double aa = dot(da, da), bb = dot(db, db), ab = dot(da, db);
    const double denom = aa * bb - ab * ab;
    if (std::abs(denom) < 1e-12)
        return (a.center + b.center) * 0.5;
    const double wa = dot(w, da), wb = dot(w, db);
    const double s = (ab * wb - bb * wa) / denom;
    const double u = (aa * wb - ab * wa) / denom;
    const Vec3 pa = a.center + da * s;
    const Vec3 pb = b.center + db * u;
    return (pa + pb) * 0.5;
}

Vec3 arc_point(const Vec3& center, double radius, const Vec3& u0, const Vec3& u1, double t) {
    const double d = std::clamp(dot(u0, u1), -1.0, 1.0);
    const double phi = std::acos(d);
    if (phi < 1e-9)
        return center + normalized(u0 * (1.0 - t) + u1 * t) * radius;
    if (phi > 3.14159265358979 - 1e-6)
        throw DegenerateGeometry("antipodal sphere projections: arc is ambiguous");
    const double s = std::sin(phi);
    const Vec3 dir = u0 * (std::sin((1.0 - t) * phi) / s) + u1 * (std::sin(t * phi) / s);
    return center + dir * radius;
}

} // namespace

CameraTrajectory spherical_trajectory(const TrajectorySpec& spec) {
    const PinholeCamera& a = spec.startView;
    const PinholeCamera& b = spec.endView;
    if (spec.nIntermediate < 0)
        throw ConfigError("nIntermediate must be >= 0");
    if (norm(a.center - b.center) < 1e-12)
        throw DegenerateGeometry("start and end views are coincident");

    const Vec3 center = spec.hasSphereCenter ? spec.sphereCenter : lookat_midpoint(a, b);
    const double ra = norm(a.center - center);
    const double rb = norm(b.center - center);
    if (ra < 1e-12 || rb < 1e-12)
        throw DegenerateGeometry("a view coincides with the sphere center");
    const double radius = 0.5 * (ra + rb);

    const Vec3 u0 = (a.center - center) / ra;
    const Vec3 u1 = (b.center - center) / rb;
    const Vec3 projA = center + u0 * radius;
    const Vec3 projB = center + u1 * radius;

    // Segment lengths drive the parameterization so samples spread evenly
    // over blend-arc-blend.
    const double lenA = norm(projA - a.center);
    const double lenArc =
        radius * std::acos(std::clamp(dot(u0, u1), -1.0, 1.0));
    const double lenB = norm(b.center - projB);
    double total = lenA + lenArc + lenB;
    if (total < 1e-12)
        total = 1.0;
    const double splitA = lenA / total;
    const double splitB = (lenA + lenArc) / total;

    const Quat qa = quat_from_rotation(a.rotation);
    const Quat qb = quat_from_rotation(b.rotation);

    const int frameCount = spec.nIntermediate + 2;
    CameraTrajectory traj;
    traj.intrinsics = {a.fx, a.fy, a.cx, a.cy, a.width, a.height};
    traj.frames.reserve(static_cast<size_t>(frameCount));
    for (int i = 0; i < frameCount; ++i) {
        CameraTrajectory::Frame frame;
        if (i == 0) {
            frame.rotation = a.rotation;
            frame.center = a.center;
        } else if (i == frameCount - 1) {
            frame.rotation = b.rotation;
            frame.center = b.center;
        } else {
            const double u = static_cast<double>(i) / (frameCount - 1);
            if (u <= splitA && splitA > 0.0) {
                const double s = u / splitA;
                frame.center = a.center * (1.0 - s) + projA * s;
            } else if (u <= splitB || splitB <= splitA) {
                const double s = splitB > splitA ? (u - splitA) / (splitB - splitA) : 0.0;
                frame.center = arc_point(center, radius, u0, u1, s);
            } else {
                const double s = (u - splitB) / (1.0 - splitB);
                frame.center = projB * (1.0 - s) + b.center * s;
            }
            frame.rotation = rotation_from_quat(slerp(qa, qb, u));
        }
        traj.frames.push_back(frame);
    }
    return traj;
}

} // namespace forge
