#include "forge/trajectory.hpp"

#include "forge/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace forge {

using nlohmann::json;

CameraTrajectory load_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }

    CameraTrajectory traj;
    const json& intr = doc.at("intrinsics");
    traj.intrinsics.fx = intr.at("fx").get<double>();
    traj.intrinsics.fy = intr.at("fy").get<double>();
    traj.intrinsics.cx = intr.at("cx").get<double>();
    traj.intrinsics.cy = intr.at("cy").get<double>();
    traj.intrinsics.width = intr.at("width").get<int>();
    traj.intrinsics.height = intr.at("height").get<int>();

    for (const json& f : doc.at("frames")) {
        CameraTrajectory::Frame frame;
        const auto& r = f.at("R");
        const auto& c = f.at("C");
        if (r.size() != 9 || c.size() != 3)
            throw DataError(path + ": frame must carry 9 rotation and 3 center floats");
        for (int i = 0; i < 9; ++i)
            frame.rotation.m[static_cast<size_t>(i)] = r.at(i).get<double>();
        frame.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};

        const Mat3 gram = frame.rotation * frame.rotation.transposed();
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col)
                if (std::abs(gram(row, col) - (row == col ? 1.0 : 0.0)) > 1e-6)
                    throw DataError(path + ": frame " + std::to_string(traj.frames.size()) +
                                    " rotation is not orthonormal");
        traj.frames.push_back(frame);
    }
    return traj;
}

void save_trajectory(const CameraTrajectory& traj, const std::string& path) {
    json doc;
    doc["intrinsics"] = {{"fx", traj.intrinsics.fx},       {"fy", traj.intrinsics.fy},
                         {"cx", traj.intrinsics.cx},       {"cy", traj.intrinsics.cy},
                         {"width", traj.intrinsics.width}, {"height", traj.intrinsics.height}};
    json frames = json::array();
    for (const auto& f : traj.frames) {
        json frame;
        frame["R"] = f.rotation.m;
        frame["C"] = {f.center.x, f.center.y, f.center.z};
        frames.push_back(frame);
    }
    doc["frames"] = frames;

    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

} // namespace forge
