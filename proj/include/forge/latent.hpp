#pragma once

#include "forge/heatmap.hpp"
#include "forge/image.hpp"

#include <memory>
#include <string>
#include <vector>

namespace forge {

// Frame-major token volume: data[((t * C + c) * H + y) * W + x]. The shared
// carrier for reference, target and heatmap latents.
struct LatentSequence {
    int frames = 0;   // T
    int channels = 0; // C
    int height = 0;   // H
    int width = 0;    // W
    std::vector<float> data;
    std::string encoderTag;

    LatentSequence() = default;
    LatentSequence(int t, int c, int h, int w, float fill = 0.0f)
        : frames(t), channels(c), height(h), width(w),
          data(static_cast<size_t>(t) * static_cast<size_t>(c) * static_cast<size_t>(h) *
                   static_cast<size_t>(w),
               fill) {}

    size_t frame_stride() const {
        return static_cast<size_t>(channels) * static_cast<size_t>(height) *
               static_cast<size_t>(width);
    }
    size_t size() const { return data.size(); }

    bool same_token_shape(const LatentSequence& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
    bool same_shape(const LatentSequence& o) const {
        return frames == o.frames && same_token_shape(o);
    }

    // Frames [begin, begin + count) as a new sequence.
    LatentSequence slice_frames(int begin, int count) const;
};

// Video <-> latent adapter. The temporal grouping descriptor mirrors how a
// causal video VAE would chunk frames; the built-in encoders keep grouping
// trivial and exist so every assembly contract stays encoder-agnostic.
class LatentEncoder {
public:
    virtual ~LatentEncoder() = default;
    virtual std::string name() const = 0;
    virtual LatentSequence encode(const Video& video) const = 0;
    virtual Video decode(const LatentSequence& latent) const = 0;
    // Temporal grouping: chunk size, and whether the leading frame is encoded
    // on its own before chunking starts.
    virtual int chunk_size() const { return 1; }
    virtual bool leading_frame_alone() const { return true; }

    LatentSequence encode_frame(const Image& frame) const { return encode(Video{frame}); }
};

// Pixels-as-latents: C = 3, exact round trip.
class IdentityEncoder final : public LatentEncoder {
public:
    std::string name() const override { return "identity"; }
    LatentSequence encode(const Video& video) const override;
    Video decode(const LatentSequence& latent) const override;
};

// Space-to-channel s x s patchify: C = 3 s^2, H' = H / s, W' = W / s.
// Requires divisible dimensions; exact round trip.
class PatchifyEncoder final : public LatentEncoder {
public:
    explicit PatchifyEncoder(int patch) : patch_(patch) {}
    std::string name() const override { return "patchify" + std::to_string(patch_); }
    LatentSequence encode(const Video& video) const override;
    Video decode(const LatentSequence& latent) const override;

private:
    int patch_;
};

std::unique_ptr<LatentEncoder> make_encoder(const std::string& name);

// Broadcasts a single-channel heatmap volume across `channels` latent
// channels (identity-encoder geometry).
LatentSequence heatmap_to_latent(const HeatmapVolume& volume, int channels);

// Flat binary container: magic "LSEQ", u32 T, C, H, W, u32 dtype tag
// (0 = float32), then row-major little-endian payload.
void save_latent(const LatentSequence& latent, const std::string& path);
LatentSequence load_latent(const std::string& path);

} // namespace forge
