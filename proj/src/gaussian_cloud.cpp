#include "forge/gaussian_cloud.hpp"

#include "forge/error.hpp"

#include <cmath>
#include <string>

namespace forge {

namespace {

bool all_finite(const std::vector<float>& v) {
    for (const float x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

} // namespace

void GaussianCloud::validate_and_normalize() {
    if (shDegree < 0 || shDegree > 3)
        throw UnsupportedShDegree("SH degree " + std::to_string(shDegree) +
                                  " outside supported range [0, 3]");
    const size_t n = opacityLogits.size();
    const size_t basis = static_cast<size_t>(sh_basis_count());
    if (positions.size() != n * 3 || logScales.size() != n * 3 || rotations.size() != n * 4 ||
        shCoeffs.size() != n * 3 * basis)
        throw MalformedPly("field counts inconsistent across Gaussian attributes");

    if (!all_finite(positions) || !all_finite(logScales) || !all_finite(rotations) ||
        !all_finite(opacityLogits) || !all_finite(shCoeffs))
        throw NonFiniteValue("non-finite value in Gaussian cloud");

    for (size_t i = 0; i < n; ++i) {
        float* q = &rotations[i * 4];
        const double norm =
            std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] +
                      double(q[3]) * q[3]);
        if (!(norm > 0.0))
            throw MalformedPly("zero-norm rotation quaternion at index " + std::to_string(i));
        // Quaternions already unit within the invariant stay untouched, so
        // normalization is idempotent and round trips stay bit-exact.
        if (std::abs(norm - 1.0) > 1e-5)
            for (int k = 0; k < 4; ++k)
                q[k] = static_cast<float>(q[k] / norm);
    }
}

ActivatedView activate(const GaussianCloud& cloud) {
    ActivatedView view;
    view.scales.resize(cloud.logScales.size());
    view.opacities.resize(cloud.opacityLogits.size());
    for (size_t i = 0; i < cloud.logScales.size(); ++i)
        view.scales[i] = std::exp(cloud.logScales[i]);
    for (size_t i = 0; i < cloud.opacityLogits.size(); ++i)
        view.opacities[i] = static_cast<float>(sigmoid(cloud.opacityLogits[i]));
    return view;
}

GaussianCloud make_empty_cloud(int shDegree) {
    GaussianCloud cloud;
    cloud.shDegree = shDegree;
    return cloud;
}

} // namespace forge
