#include "forge/latent.hpp"

#include "forge/error.hpp"

#include <cstring>
#include <fstream>

namespace forge {

LatentSequence LatentSequence::slice_frames(int begin, int count) const {
    if (begin < 0 || count < 0 || begin + count > frames)
        throw IndexOutOfRange("slice [" + std::to_string(begin) + ", " +
                              std::to_string(begin + count) + ") outside " +
                              std::to_string(frames) + " frames");
    LatentSequence out(count, channels, height, width);
    out.encoderTag = encoderTag;
    std::memcpy(out.data.data(), data.data() + static_cast<size_t>(begin) * frame_stride(),
                out.data.size() * sizeof(float));
    return out;
}

LatentSequence IdentityEncoder::encode(const Video& video) const {
    if (video.empty())
        return {};
    const int h = video.front().height, w = video.front().width;
    LatentSequence out(static_cast<int>(video.size()), 3, h, w);
    out.encoderTag = name();
    for (size_t t = 0; t < video.size(); ++t) {
        const Image& img = video[t];
        if (img.width != w || img.height != h)
            throw DimensionMismatch("video frames have inconsistent sizes");
        float* dst = out.data.data() + t * out.frame_stride();
        // channel-planar layout
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    dst[(static_cast<size_t>(c) * h + y) * w + x] = img.at(x, y, c);
    }
    return out;
}

Video IdentityEncoder::decode(const LatentSequence& latent) const {
    if (latent.channels != 3)
        throw ShapeMismatch("identity decode expects 3 channels");
    Video video;
    video.reserve(static_cast<size_t>(latent.frames));
    for (int t = 0; t < latent.frames; ++t) {
        Image img(latent.width, latent.height);
        const float* src = latent.data.data() + static_cast<size_t>(t) * latent.frame_stride();
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < latent.height; ++y)
                for (int x = 0; x < latent.width; ++x)
                    img.at(x, y, c) =
                        src[(static_cast<size_t>(c) * latent.height + y) * latent.width + x];
        video.push_back(std::move(img));
    }
    return video;
}

LatentSequence PatchifyEncoder::encode(const Video& video) const {
    if (video.empty())
        return {};
    const int h = video.front().height, w = video.front().width;
    if (h % patch_ != 0 || w % patch_ != 0)
        throw ShapeMismatch("image size not divisible by patch size " + std::to_string(patch_));
    const int hh = h / patch_, ww = w / patch_;
    LatentSequence out(static_cast<int>(video.size()), 3 * patch_ * patch_, hh, ww);
    out.encoderTag = name();
    for (size_t t = 0; t < video.size(); ++t) {
        const Image& img = video[t];
        if (img.width != w || img.height != h)
            throw DimensionMismatch("video frames have inconsistent sizes");
        float* dst = out.data.data() + t * out.frame_stride();
        for (int c = 0; c < 3; ++c)
            for (int py = 0; py < patch_; ++py)
                for (int px = 0; px < patch_; ++px) {
                    const int channel = (c * patch_ + py) * patch_ + px;
                    for (int y = 0; y < hh; ++y)
                        for (int x = 0; x < ww; ++x)
                            dst[(static_cast<size_t>(channel) * hh + y) * ww + x] =
                                img.at(x * patch_ + px, y * patch_ + py, c);
                }
    }
    return out;
}

Video PatchifyEncoder::decode(const LatentSequence& latent) const {
    if (latent.channels != 3 * patch_ * patch_)
        throw ShapeMismatch("latent channel count does not match patch size");
    const int h = latent.height * patch_, w = latent.width * patch_;
    Video video;
    video.reserve(static_cast<size_t>(latent.frames));
    for (int t = 0; t < latent.frames; ++t) {
        Image img(w, h);
        const float* src = latent.data.data() + static_cast<size_t>(t) * latent.frame_stride();
        for (int c = 0; c < 3; ++c)
            for (int py = 0; py < patch_; ++py)
                for (int px = 0; px < patch_; ++px) {
                    const int channel = (c * patch_ + py) * patch_ + px;
                    for (int y = 0; y < latent.height; ++y)
                        for (int x = 0; x < latent.width; ++x)
                            img.at(x * patch_ + px, y * patch_ + py, c) =
                                src[(static_cast<size_t>(channel) * latent.height + y) *
                                        latent.width +
                                    x];
                }
        video.push_back(std::move(img));
    }
    return video;
}

std::unique_ptr<LatentEncoder> make_encoder(const std::string& name) {
    if (name.empty() || name == "identity")
        return std::make_unique<IdentityEncoder>();
    if (name.rfind("patchify", 0) == 0) {
        const int patch = std::stoi(name.substr(8));
        if (patch < 1)
            throw ConfigError("patch size must be >= 1");
        return std::make_unique<PatchifyEncoder>(patch);
    }
    throw ConfigError("unknown encoder '" + name + "'");
}

LatentSequence heatmap_to_latent(const HeatmapVolume& volume, int channels) {
    if (volume.frames.empty())
        return {};
    const int h = volume.frames.front().height, w = volume.frames.front().width;
    LatentSequence out(static_cast<int>(volume.frames.size()), channels, h, w);
    out.encoderTag = "heatmap";
    for (size_t t = 0; t < volume.frames.size(); ++t) {
        const GrayMap& map = volume.frames[t];
        if (map.width != w || map.height != h)
            throw DimensionMismatch("heatmap frames have inconsistent sizes");
        float* dst = out.data.data() + t * out.frame_stride();
        for (int c = 0; c < channels; ++c)
            std::memcpy(dst + static_cast<size_t>(c) * map.data.size(), map.data.data(),
                        map.data.size() * sizeof(float));
    }
    return out;
}

namespace {
constexpr char kMagic[4] = {'L', 'S', 'E', 'Q'};
constexpr uint32_t kDtypeF32 = 0;
} // namespace

void save_latent(const LatentSequence& latent, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    const uint32_t header[5] = {static_cast<uint32_t>(latent.frames),
                                static_cast<uint32_t>(latent.channels),
                                static_cast<uint32_t>(latent.height),
                                static_cast<uint32_t>(latent.width), kDtypeF32};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(latent.data.data()),
              static_cast<std::streamsize>(latent.data.size() * sizeof(float)));
    if (!out)
        throw IoFailure("write failed for " + path);
}

LatentSequence load_latent(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError(path + ": not a latent container");
    uint32_t header[5];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in)
        throw DataError(path + ": truncated header");
    if (header[4] != kDtypeF32)
        throw DataError(path + ": unsupported dtype tag " + std::to_string(header[4]));
    LatentSequence latent(static_cast<int>(header[0]), static_cast<int>(header[1]),
                          static_cast<int>(header[2]), static_cast<int>(header[3]));
    in.read(reinterpret_cast<char*>(latent.data.data()),
            static_cast<std::streamsize>(latent.data.size() * sizeof(float)));
    if (!in)
        throw DataError(path + ": truncated payload");
    return latent;
}

} // namespace forge
