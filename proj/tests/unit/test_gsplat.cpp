#include "forge/error.hpp"
#include "forge/gaussian_cloud.hpp"
#include "forge/ply_io.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>

using namespace forge;

namespace {

// Byte-level fixture writer: header plus little-endian float32 rows in the
// exact checkpoint property order, degree 0 (no f_rest block).
void write_fixture_ply(const std::string& path, const std::vector<std::vector<float>>& rows) {
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << rows.size() << "\n";
    for (const char* name : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2",
                             "opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1",
                             "rot_2", "rot_3"})
        out << "property float " << name << "\n";
    out << "end_header\n";
    for (const auto& row : rows)
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
}

bool bitwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

bool clouds_bitwise_equal(const GaussianCloud& a, const GaussianCloud& b) {
    return a.shDegree == b.shDegree && bitwise_equal(a.positions, b.positions) &&
           bitwise_equal(a.logScales, b.logScales) && bitwise_equal(a.rotations, b.rotations) &&
           bitwise_equal(a.opacityLogits, b.opacityLogits) &&
           bitwise_equal(a.shCoeffs, b.shCoeffs);
}

} // namespace

TEST_CASE("hand-built 3-gaussian fixture reads back exactly") {
    test::TempDir dir("ply_fixture");
    const std::string path = dir.file("fixture.ply");
    // x,y,z, nx,ny,nz, dc0..2, opacity, scale0..2, rot w,x,y,z
    write_fixture_ply(path, {
                                {0, 0, 0, 0, 0, 0, 0.5f, 0.25f, -0.5f, 0.3f, -1, -1, -1, 1, 0, 0, 0},
                                {1, 0, 0, 0, 0, 0, 0.1f, 0.2f, 0.3f, -0.7f, 0, 0, 0, 1, 0, 0, 0},
                                {0, 1, 0, 0, 0, 0, -0.1f, 0.0f, 0.1f, 2.0f, -2, -1, 0, 1, 0, 0, 0},
                            });
    const GaussianCloud cloud = load_ply(path);
    REQUIRE(cloud.size() == 3);
    CHECK(cloud.shDegree == 0);
    CHECK(cloud.position(0).x == 0.0);
    CHECK(cloud.position(1).x == 1.0);
    CHECK(cloud.position(2).y == 1.0);
    CHECK(cloud.opacityLogits[1] == doctest::Approx(-0.7f));
    CHECK(cloud.sh_at(0, 1, 0) == 0.25f);
    CHECK(cloud.logScales[6] == -2.0f);
}

TEST_CASE("missing opacity property raises MalformedPly") {
    test::TempDir dir("ply_missing");
    const std::string path = dir.file("broken.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 0\n";
    for (const char* name : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2",
                             "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"})
        out << "property float " << name << "\n";
    out << "end_header\n";
    out.close();
    CHECK_THROWS_AS(load_ply(path), MalformedPly);
}

TEST_CASE("single gaussian round trip is bit-exact") {
    test::TempDir dir("ply_single");
    GaussianCloud cloud;
    cloud.shDegree = 3;
    test::append_gaussian(cloud, {0.25, -1.5, 3.0}, {-1.0, -2.0, 0.5}, 0.37f, 0.9f, 0.1f, 0.4f);
    cloud.sh_at(0, 2, 7) = 0.123f;
    cloud.validate_and_normalize();

    const std::string path = dir.file("one.ply");
    save_ply(cloud, path);
    const GaussianCloud loaded = load_ply(path);
    CHECK(clouds_bitwise_equal(cloud, loaded));
}

TEST_CASE("empty cloud writes a valid zero-vertex PLY") {
    test::TempDir dir("ply_empty");
    const std::string path = dir.file("empty.ply");
    save_ply(make_empty_cloud(3), path);
    const GaussianCloud loaded = load_ply(path);
    CHECK(loaded.size() == 0);
    CHECK(loaded.shDegree == 3);
}

TEST_CASE("randomized 1000-gaussian round trip is bit-exact") {
    test::TempDir dir("ply_random");
    for (const uint64_t seed : {7ull, 99ull, 2024ull}) {
        const GaussianCloud cloud = test::random_cloud(1000, 2, seed);
        const std::string path = dir.file("rand.ply");
        save_ply(cloud, path);
        CHECK(clouds_bitwise_equal(cloud, load_ply(path)));
    }
}

TEST_CASE("degraded clouds round trip unchanged") {
    test::TempDir dir("ply_degraded");
    GaussianCloud cloud = test::random_cloud(64, 1, 2468);
    for (float& v : cloud.logScales)
        v = static_cast<float>(v - 0.5);
    const std::string path = dir.file("compressed.ply");
    save_ply(cloud, path);
    CHECK(clouds_bitwise_equal(cloud, load_ply(path)));
}

TEST_CASE("quaternion normalization on load is idempotent") {
    test::TempDir dir("ply_quat");
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, 0}, {0, 0, 0}, 0.0f, 0.5f, 0.5f, 0.5f);
    cloud.rotations = {2.0f, 0.0f, 2.0f, 0.0f}; // unnormalized
    cloud.validate_and_normalize();

    const std::string path = dir.file("quat.ply");
    save_ply(cloud, path);
    const GaussianCloud once = load_ply(path);
    save_ply(once, path);
    const GaussianCloud twice = load_ply(path);
    CHECK(bitwise_equal(once.rotations, twice.rotations));
    const Quat q = once.rotation(0);
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("truncated vertex data is a hard load error") {
    test::TempDir dir("ply_trunc");
    const std::string path = dir.file("trunc.ply");
    write_fixture_ply(path, {{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0}});
    // Claim two vertices but provide one row of data.
    std::string bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    const auto at = bytes.find("element vertex 1");
    REQUIRE(at != std::string::npos);
    bytes.replace(at, 16, "element vertex 2");
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(load_ply(path), MalformedPly);
}

TEST_CASE("unknown extra properties are tolerated on read") {
    test::TempDir dir("ply_extra");
    const std::string path = dir.file("extra.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
    for (const char* name : {"x", "y", "z", "custom_tag", "nx", "ny", "nz", "f_dc_0", "f_dc_1",
                             "f_dc_2", "opacity", "scale_0", "scale_1", "scale_2", "rot_0",
                             "rot_1", "rot_2", "rot_3"})
        out << "property float " << name << "\n";
    out << "end_header\n";
    const float row[18] = {1, 2, 3, 99, 0, 0, 0, 0.5f, 0.5f, 0.5f, 0.2f, -1, -1, -1, 1, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(row), sizeof(row));
    out.close();

    const GaussianCloud cloud = load_ply(path);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.position(0).x == 1.0);
    CHECK(cloud.opacityLogits[0] == 0.2f);
}

TEST_CASE("non-finite values are a hard load error") {
    test::TempDir dir("ply_nan");
    const std::string path = dir.file("nan.ply");
    const float nan = std::numeric_limits<float>::quiet_NaN();
    write_fixture_ply(path, {{nan, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0}});
    CHECK_THROWS_AS(load_ply(path), NonFiniteValue);
}

TEST_CASE("activation maps stored to physical space") {
    GaussianCloud cloud;
    cloud.shDegree = 0;
    test::append_gaussian(cloud, {0, 0, 0}, {0, 0, -0.5}, 0.0f, 0.5f, 0.5f, 0.5f);
    const ActivatedView view = activate(cloud);
    CHECK(view.opacities[0] == doctest::Approx(0.5));       // sigmoid(0)
    CHECK(view.scales[0] == doctest::Approx(1.0));          // exp(0)
    CHECK(view.scales[2] == doctest::Approx(0.6065306597)); // exp(-0.5)
}

TEST_CASE("activation is monotone in the opacity logit") {
    GaussianCloud cloud;
    cloud.shDegree = 0;
    for (int i = 0; i < 32; ++i)
        test::append_gaussian(cloud, {0, 0, 0}, {0, 0, 0}, -4.0f + 0.25f * i, 0.5f, 0.5f, 0.5f);
    const ActivatedView view = activate(cloud);
    for (size_t i = 1; i < view.opacities.size(); ++i)
        CHECK(view.opacities[i] > view.opacities[i - 1]);
    for (const float o : view.opacities) {
        CHECK(o > 0.0f);
        CHECK(o < 1.0f);
    }
}
