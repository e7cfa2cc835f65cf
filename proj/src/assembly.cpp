#include "forge/assembly.hpp"

#include "forge/error.hpp"

#include <cmath>
#include <cstring>

namespace forge {

TimestepTensor TimestepTensor::for_triplet(int refFrames, int targetFrames, int heatmapFrames,
                                           double t) {
    TimestepTensor tensor;
    tensor.refFrames = refFrames;
    tensor.targetFrames = targetFrames;
    tensor.heatmapFrames = heatmapFrames;
    tensor.perFrame.assign(static_cast<size_t>(refFrames + targetFrames + heatmapFrames), 0.0f);
    for (int i = 0; i < targetFrames; ++i)
        tensor.perFrame[static_cast<size_t>(refFrames + i)] = static_cast<float>(t);
    return tensor;
}

LatentSequence Triplet::slice(TripletSegment segment) const {
    switch (segment) {
    case TripletSegment::Reference:
        return input.slice_frames(0, tSeq.refFrames);
    case TripletSegment::Target:
        return input.slice_frames(tSeq.refFrames, tSeq.targetFrames);
    case TripletSegment::Heatmap:
        return input.slice_frames(tSeq.refFrames + tSeq.targetFrames, tSeq.heatmapFrames);
    }
    throw IndexOutOfRange("unknown triplet segment");
}

LatentSequence build_reference(const Image& gtFirst, const Image& gtLast,
                               const Video& artifactFrames, int k, const LatentEncoder& enc) {
    const int t = static_cast<int>(artifactFrames.size());
    if (k < 1)
        throw ConfigError("anchor window k must be >= 1");
    if (t < k + 2)
        throw TooShort("need at least k + 2 = " + std::to_string(k + 2) +
                       " artifact frames, got " + std::to_string(t));

    const LatentSequence first = enc.encode_frame(gtFirst);
    const LatentSequence last = enc.encode_frame(gtLast);
    if (!first.same_token_shape(last))
        throw ShapeMismatch("GT boundary frames encode to different shapes");

    LatentSequence out(t, first.channels, first.height, first.width);
    out.encoderTag = enc.name();
    const size_t stride = out.frame_stride();
    for (int i = 0; i < t; ++i) {
        float* dst = out.data.data() + static_cast<size_t>(i) * stride;
        if (i == 0) {
            std::memcpy(dst, first.data.data(), stride * sizeof(float));
        } else if (i >= t - k) {
            std::memcpy(dst, last.data.data(), stride * sizeof(float));
        } else {
            const LatentSequence enc_i = enc.encode_frame(artifactFrames[static_cast<size_t>(i)]);
            if (!enc_i.same_token_shape(first))
                throw ShapeMismatch("artifact frame encodes to a different shape");
            std::memcpy(dst, enc_i.data.data(), stride * sizeof(float));
        }
    }
    return out;
}

LatentSequence fm_path(const LatentSequence& z0, const LatentSequence& z1, double t) {
    if (!z0.same_shape(z1))
        throw ShapeMismatch("path endpoints have different shapes");
    if (t < 0.0 || t > 1.0)
        throw ConfigError("path parameter t must be in [0, 1]");
    LatentSequence out(z0.frames, z0.channels, z0.height, z0.width);
    out.encoderTag = z0.encoderTag;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = static_cast<float>((1.0 - t) * z0.data[i] + t * z1.data[i]);
    return out;
}

Triplet assemble_triplet(const LatentSequence& zRef, const LatentSequence& zTargetT,
                         const LatentSequence& blendedHeatmap, double t) {
    if (!zRef.same_token_shape(zTargetT) || !zRef.same_token_shape(blendedHeatmap))
        throw ShapeMismatch("triplet segments have different token shapes");

    Triplet triplet;
    triplet.input = LatentSequence(zRef.frames + zTargetT.frames + blendedHeatmap.frames,
                                   zRef.channels, zRef.height, zRef.width);
    triplet.input.encoderTag = zRef.encoderTag;
    const size_t stride = triplet.input.frame_stride();
    float* dst = triplet.input.data.data();
    std::memcpy(dst, zRef.data.data(), zRef.data.size() * sizeof(float));
    std::memcpy(dst + static_cast<size_t>(zRef.frames) * stride, zTargetT.data.data(),
                zTargetT.data.size() * sizeof(float));
    std::memcpy(dst + static_cast<size_t>(zRef.frames + zTargetT.frames) * stride,
                blendedHeatmap.data.data(), blendedHeatmap.data.size() * sizeof(float));
    triplet.tSeq =
        TimestepTensor::for_triplet(zRef.frames, zTargetT.frames, blendedHeatmap.frames, t);
    return triplet;
}

TruthOracle::TruthOracle(LatentSequence z0Target, LatentSequence z1Target, float offTargetFill)
    : offTargetFill_(offTargetFill) {
    if (!z0Target.same_shape(z1Target))
        throw ShapeMismatch("truth oracle endpoints have different shapes");
    velocity_ = LatentSequence(z0Target.frames, z0Target.channels, z0Target.height,
                               z0Target.width);
    for (size_t i = 0; i < velocity_.data.size(); ++i)
        velocity_.data[i] = z1Target.data[i] - z0Target.data[i];
}

LatentSequence TruthOracle::predict(const LatentSequence& tripletInput,
                                    const TimestepTensor& tSeq) const {
    if (tSeq.targetFrames != velocity_.frames)
        throw ShapeMismatch("triplet target span does not match held truth");
    LatentSequence out(tripletInput.frames, tripletInput.channels, tripletInput.height,
                       tripletInput.width, offTargetFill_);
    std::memcpy(out.data.data() + static_cast<size_t>(tSeq.refFrames) * out.frame_stride(),
                velocity_.data.data(), velocity_.data.size() * sizeof(float));
    return out;
}

LatentSequence ZeroOracle::predict(const LatentSequence& tripletInput,
                                   const TimestepTensor&) const {
    return LatentSequence(tripletInput.frames, tripletInput.channels, tripletInput.height,
                          tripletInput.width, 0.0f);
}

LatentSequence ConstantOracle::predict(const LatentSequence& tripletInput,
                                       const TimestepTensor&) const {
    return LatentSequence(tripletInput.frames, tripletInput.channels, tripletInput.height,
                          tripletInput.width, value_);
}

double masked_fm_loss(const VelocityOracle& oracle, const LatentSequence& zRef,
                      const LatentSequence& z0Target, const LatentSequence& z1Target, double t,
                      const LatentSequence& blendedHeatmap) {
    if (!z0Target.same_shape(z1Target))
        throw ShapeMismatch("target endpoints have different shapes");
    if (!(t > 0.0) || t > 1.0)
        throw ConfigError("loss timestep t must be in (0, 1]");

    const LatentSequence zt = fm_path(z0Target, z1Target, t);
    const Triplet triplet = assemble_triplet(zRef, zt, blendedHeatmap, t);
    const LatentSequence prediction = oracle.predict(triplet.input, triplet.tSeq);
    if (!prediction.same_shape(triplet.input))
        throw ShapeMismatch("oracle output shape differs from its input");

    // Only the target slice enters the objective.
    const size_t stride = triplet.input.frame_stride();
    const float* pred =
        prediction.data.data() + static_cast<size_t>(triplet.tSeq.refFrames) * stride;
    double sum = 0.0;
    const size_t count = z0Target.data.size();
    for (size_t i = 0; i < count; ++i) {
        const double delta = double(z1Target.data[i]) - double(z0Target.data[i]);
        const double err = double(pred[i]) - delta;
        sum += err * err;
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

LatentSequence sample(const VelocityOracle& oracle, const LatentSequence& zRef,
                      const LatentSequence& heatmap, const ScheduleConfig& config,
                      const LatentSequence& initNoise) {
    if (config.totalSteps < 1)
        throw ConfigError("sampler needs at least one step");
    if (config.perStepWeights.size() != static_cast<size_t>(config.totalSteps))
        throw ConfigError("per-step weight count does not match totalSteps");

    LatentSequence target = initNoise;
    const double dt = 1.0 / config.totalSteps;
    for (int step = 0; step < config.totalSteps; ++step) {
        const double t = 1.0 - static_cast<double>(step) * dt;
        const LatentSequence mask = blend_mask(schedule_weights(step, config), heatmap);
        const Triplet triplet = assemble_triplet(zRef, target, mask, t);
        const LatentSequence velocity = oracle.predict(triplet.input, triplet.tSeq);
        if (!velocity.same_shape(triplet.input))
            throw ShapeMismatch("oracle output shape differs from its input");
        const size_t stride = triplet.input.frame_stride();
        const float* v =
            velocity.data.data() + static_cast<size_t>(triplet.tSeq.refFrames) * stride;
        for (size_t i = 0; i < target.data.size(); ++i)
            target.data[i] = static_cast<float>(target.data[i] - dt * v[i]);
    }
    return target;
}

} // namespace forge
