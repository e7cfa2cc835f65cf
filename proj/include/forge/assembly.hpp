#pragma once

#include "forge/latent.hpp"
#include "forge/schedule.hpp"

#include <functional>

namespace forge {

// Per-frame timestep values over a concatenated triplet. Reference and
// heatmap spans are pinned at 0; the target span carries a uniform t.
struct TimestepTensor {
    std::vector<float> perFrame;
    int refFrames = 0;
    int targetFrames = 0;
    int heatmapFrames = 0;

    static TimestepTensor for_triplet(int refFrames, int targetFrames, int heatmapFrames,
                                      double t);
    double target_value() const {
        return targetFrames > 0 ? perFrame[static_cast<size_t>(refFrames)] : 0.0;
    }
};

enum class TripletSegment { Reference, Target, Heatmap };

struct Triplet {
    LatentSequence input; // frame-wise concat [ref, target, heatmap]
    TimestepTensor tSeq;

    LatentSequence slice(TripletSegment segment) const;
};

// Reference sequence construction: index 0 holds the encoded first GT view,
// the trailing k indices repeat the encoded last GT view, everything in
// between is the encoded artifact video. Throws TooShort when the artifact
// clip cannot host both anchors.
LatentSequence build_reference(const Image& gtFirst, const Image& gtLast,
                               const Video& artifactFrames, int k, const LatentEncoder& enc);
constexpr int kDefaultAnchorWindow = 8; // one full temporal compression chunk

// Linear noise-to-data path: (1 - t) * z0 + t * z1.
LatentSequence fm_path(const LatentSequence& z0, const LatentSequence& z1, double t);

Triplet assemble_triplet(const LatentSequence& zRef, const LatentSequence& zTargetT,
                         const LatentSequence& blendedHeatmap, double t);

// Full-sequence velocity field over a triplet input.
class VelocityOracle {
public:
    virtual ~VelocityOracle() = default;
    virtual LatentSequence predict(const LatentSequence& tripletInput,
                                   const TimestepTensor& tSeq) const = 0;
};

// Emits the held ground-truth velocity z1 - z0 on the target span; the other
// spans are filled with a configurable constant (tests use it to prove the
// loss never reads them).
class TruthOracle final : public VelocityOracle {
public:
    TruthOracle(LatentSequence z0Target, LatentSequence z1Target, float offTargetFill = 0.0f);
    LatentSequence predict(const LatentSequence& tripletInput,
                           const TimestepTensor& tSeq) const override;

private:
    LatentSequence velocity_;
    float offTargetFill_;
};

class ZeroOracle final : public VelocityOracle {
public:
    LatentSequence predict(const LatentSequence& tripletInput,
                           const TimestepTensor& tSeq) const override;
};

// Constant velocity field over the whole sequence.
class ConstantOracle final : public VelocityOracle {
public:
    explicit ConstantOracle(float value) : value_(value) {}
    LatentSequence predict(const LatentSequence& tripletInput,
                           const TimestepTensor& tSeq) const override;

private:
    float value_;
};

// Wraps an arbitrary callable; test plumbing.
class CallbackOracle final : public VelocityOracle {
public:
    using Fn = std::function<LatentSequence(const LatentSequence&, const TimestepTensor&)>;
    explicit CallbackOracle(Fn fn) : fn_(std::move(fn)) {}
    LatentSequence predict(const LatentSequence& input,
                           const TimestepTensor& tSeq) const override {
        return fn_(input, tSeq);
    }

private:
    Fn fn_;
};

// Masked flow-matching objective: builds z_t on the path, assembles the
// triplet, queries the oracle and returns the mean squared error of the
// target-span slice against z1 - z0. Prediction values outside the target
// span never enter the loss.
double masked_fm_loss(const VelocityOracle& oracle, const LatentSequence& zRef,
                      const LatentSequence& z0Target, const LatentSequence& z1Target, double t,
                      const LatentSequence& blendedHeatmap);

// Euler integration of the learned field from t = 1 (noise) to t = 0 (data)
// on a uniform grid; the triplet is reassembled with the scheduled mask
// before every oracle call and only the target span is integrated.
LatentSequence sample(const VelocityOracle& oracle, const LatentSequence& zRef,
                      const LatentSequence& heatmap, const ScheduleConfig& config,
                      const LatentSequence& initNoise);

} // namespace forge
