#include "forge/ply_io.hpp"

#include "forge/error.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace forge {

namespace {

int degree_for_rest_count(int restPerChannel) {
    switch (restPerChannel) {
    case 0:
        return 0;
    case 3:
        return 1;
    case 8:
        return 2;
    case 15:
        return 3;
    default:
        return -1;
    }
}

struct PlyHeader {
    size_t vertexCount = 0;
    std::vector<std::string> properties; // in file order, all float32
    size_t dataOffset = 0;
};

PlyHeader parse_header(std::ifstream& in, const std::string& path) {
    PlyHeader header;
    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw MalformedPly(path + ": missing 'ply' magic");
    bool sawFormat = false;
    bool inVertexElement = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        if (token == "comment")
            continue;
        if (token == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "binary_little_endian")
                throw MalformedPly(path + ": unsupported format '" + fmt + "'");
            sawFormat = true;
        } else if (token == "element") {
            std::string name;
            size_t count = 0;
            ss >> name >> count;
            if (name == "vertex") {
                header.vertexCount = count;
                inVertexElement = true;
            } else {
                inVertexElement = false;
            }
        } else if (token == "property") {
            if (!inVertexElement)
                continue;
            std::string type, name;
            ss >> type >> name;
            if (type != "float" && type != "float32")
                throw MalformedPly(path + ": non-float property '" + name + "'");
            header.properties.push_back(name);
        } else if (token == "end_header") {
            if (!sawFormat)
                throw MalformedPly(path + ": no format declaration");
            header.dataOffset = static_cast<size_t>(in.tellg());
            return header;
        }
    }
    throw MalformedPly(path + ": missing end_header");
}

size_t require_column(const std::map<std::string, size_t>& columns, const std::string& name,
                      const std::string& path) {
    const auto it = columns.find(name);
    if (it == columns.end())
        throw MalformedPly(path + ": missing property '" + name + "'");
    return it->second;
}

} // namespace

GaussianCloud load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);

    const PlyHeader header = parse_header(in, path);
    std::map<std::string, size_t> columns;
    for (size_t i = 0; i < header.properties.size(); ++i)
        columns[header.properties[i]] = i;

    // f_rest_k are contiguous; total count / 3 is the per-channel rest size.
    int totalRest = 0;
    while (columns.count("f_rest_" + std::to_string(totalRest)))
        ++totalRest;
    if (totalRest % 3 != 0)
        throw MalformedPly(path + ": f_rest count not divisible by 3");
    const int restPerChannel = totalRest / 3;
    const int degree = degree_for_rest_count(restPerChannel);
    if (degree < 0)
        throw UnsupportedShDegree(path + ": " + std::to_string(totalRest) +
                                  " rest coefficients does not match any degree in [0, 3]");

    const size_t xCol = require_column(columns, "x", path);
    const size_t yCol = require_column(columns, "y", path);
    const size_t zCol = require_column(columns, "z", path);
    std::vector<size_t> dcCols(3), scaleCols(3), rotCols(4);
    for (int c = 0; c < 3; ++c)
        dcCols[static_cast<size_t>(c)] =
            require_column(columns, "f_dc_" + std::to_string(c), path);
    const size_t opacityCol = require_column(columns, "opacity", path);
    for (int c = 0; c < 3; ++c)
        scaleCols[static_cast<size_t>(c)] =
            require_column(columns, "scale_" + std::to_string(c), path);
    for (int c = 0; c < 4; ++c)
        rotCols[static_cast<size_t>(c)] =
            require_column(columns, "rot_" + std::to_string(c), path);
    std::vector<size_t> restCols(static_cast<size_t>(totalRest));
    for (int k = 0; k < totalRest; ++k)
        restCols[static_cast<size_t>(k)] =
            require_column(columns, "f_rest_" + std::to_string(k), path);

    const size_t stride = header.properties.size();
    const size_t n = header.vertexCount;
    std::vector<float> row(stride);

    GaussianCloud cloud;
    cloud.shDegree = degree;
    const size_t basis = static_cast<size_t>(cloud.sh_basis_count());
    cloud.positions.resize(n * 3);
    cloud.logScales.resize(n * 3);
    cloud.rotations.resize(n * 4);
    cloud.opacityLogits.resize(n);
    cloud.shCoeffs.resize(n * 3 * basis);

    for (size_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(stride * sizeof(float)));
        if (!in)
            throw MalformedPly(path + ": truncated vertex data at row " + std::to_string(i));
        cloud.positions[i * 3] = row[xCol];
        cloud.positions[i * 3 + 1] = row[yCol];
        cloud.positions[i * 3 + 2] = row[zCol];
        for (int c = 0; c < 3; ++c) {
            cloud.sh_at(i, c, 0) = row[dcCols[static_cast<size_t>(c)]];
            for (int j = 0; j < restPerChannel; ++j)
                cloud.sh_at(i, c, j + 1) =
                    row[restCols[static_cast<size_t>(c * restPerChannel + j)]];
            cloud.logScales[i * 3 + static_cast<size_t>(c)] =
                row[scaleCols[static_cast<size_t>(c)]];
        }
        cloud.opacityLogits[i] = row[opacityCol];
        for (int c = 0; c < 4; ++c)
            cloud.rotations[i * 4 + static_cast<size_t>(c)] =
                row[rotCols[static_cast<size_t>(c)]];
    }

    cloud.validate_and_normalize();
    return cloud;
}

void save_ply(const GaussianCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");

    const size_t n = cloud.size();
    const int restPerChannel = cloud.sh_basis_count() - 1;

    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n";
    header << "element vertex " << n << "\n";
    const char* base[] = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (const char* name : base)
        header << "property float " << name << "\n";
    for (int k = 0; k < restPerChannel * 3; ++k)
        header << "property float f_rest_" << k << "\n";
    header << "property float opacity\n";
    for (int c = 0; c < 3; ++c)
        header << "property float scale_" << c << "\n";
    for (int c = 0; c < 4; ++c)
        header << "property float rot_" << c << "\n";
    header << "end_header\n";
    out << header.str();

    std::vector<float> row(9 + static_cast<size_t>(restPerChannel) * 3 + 1 + 3 + 4);
    for (size_t i = 0; i < n; ++i) {
        size_t k = 0;
        for (int c = 0; c < 3; ++c)
            row[k++] = cloud.positions[i * 3 + static_cast<size_t>(c)];
        for (int c = 0; c < 3; ++c)
            row[k++] = 0.0f; // normals unused
        for (int c = 0; c < 3; ++c)
            row[k++] = cloud.sh_at(i, c, 0);
        for (int c = 0; c < 3; ++c)
            for (int j = 0; j < restPerChannel; ++j)
                row[k++] = cloud.sh_at(i, c, j + 1);
        row[k++] = cloud.opacityLogits[i];
        for (int c = 0; c < 3; ++c)
            row[k++] = cloud.logScales[i * 3 + static_cast<size_t>(c)];
        for (int c = 0; c < 4; ++c)
            row[k++] = cloud.rotations[i * 4 + static_cast<size_t>(c)];
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out)
        throw IoFailure("write failed for " + path);
}

} // namespace forge
