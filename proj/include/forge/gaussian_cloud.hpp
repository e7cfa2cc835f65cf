#pragma once

#include "forge/math.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace forge {

// One scene's full 3DGS parameter set, stored exactly as the checkpoint
// stores it: log-space scales, pre-sigmoid opacities, float32 everywhere.
// Treated as an immutable value after construction; every mutating operation
// returns a fresh cloud.
class GaussianCloud {
public:
    // Flat float32 arrays, N-major.
    std::vector<float> positions;     // N x 3
    std::vector<float> logScales;     // N x 3
    std::vector<float> rotations;     // N x 4, (w, x, y, z)
    std::vector<float> opacityLogits; // N
    std::vector<float> shCoeffs;      // N x 3 x B, B = (shDegree + 1)^2

    int shDegree = 3;

    size_t size() const { return opacityLogits.size(); }
    int sh_basis_count() const { return (shDegree + 1) * (shDegree + 1); }

    float sh_at(size_t i, int channel, int basis) const {
        return shCoeffs[(i * 3 + static_cast<size_t>(channel)) * static_cast<size_t>(sh_basis_count()) +
                        static_cast<size_t>(basis)];
    }
    float& sh_at(size_t i, int channel, int basis) {
        return shCoeffs[(i * 3 + static_cast<size_t>(channel)) * static_cast<size_t>(sh_basis_count()) +
                        static_cast<size_t>(basis)];
    }

    Vec3 position(size_t i) const {
        return {positions[i * 3], positions[i * 3 + 1], positions[i * 3 + 2]};
    }
    Vec3 scale_log(size_t i) const {
        return {logScales[i * 3], logScales[i * 3 + 1], logScales[i * 3 + 2]};
    }
    Quat rotation(size_t i) const {
        return {rotations[i * 4], rotations[i * 4 + 1], rotations[i * 4 + 2],
                rotations[i * 4 + 3]};
    }

    // Checks field-count consistency, finiteness and quaternion norms;
    // normalizes quaternions in place. Throws NonFiniteValue /
    // UnsupportedShDegree / MalformedPly on violation.
    void validate_and_normalize();
};

// Physical-space view of a cloud: scales = exp(logScales), opacities =
// sigmoid(opacityLogits).
struct ActivatedView {
    std::vector<float> scales;    // N x 3, strictly positive
    std::vector<float> opacities; // N, in (0, 1)
};

ActivatedView activate(const GaussianCloud& cloud);

GaussianCloud make_empty_cloud(int shDegree);

} // namespace forge
