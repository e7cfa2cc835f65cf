#pragma once

#include <string>
#include <vector>

namespace forge {

// Row-major RGB float image with values in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data; // width * height * 3

    Image() = default;
    Image(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h) * 3, fill) {}

    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * static_cast<size_t>(width) +
                     static_cast<size_t>(x)) *
                        3 +
                    static_cast<size_t>(c)];
    }
    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * static_cast<size_t>(width) +
                     static_cast<size_t>(x)) *
                        3 +
                    static_cast<size_t>(c)];
    }

    size_t pixel_count() const {
        return static_cast<size_t>(width) * static_cast<size_t>(height);
    }
};

// Single-channel float map, same layout conventions as Image.
struct GrayMap {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayMap() = default;
    GrayMap(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    float at(int x, int y) const {
        return data[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)];
    }
    float& at(int x, int y) {
        return data[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)];
    }
};

using Video = std::vector<Image>;

// 8-bit PNG (RGB for Image, grayscale for GrayMap), zlib-compressed.
void write_png(const Image& image, const std::string& path);
void write_png(const GrayMap& map, const std::string& path);
Image read_png(const std::string& path);
GrayMap read_png_gray(const std::string& path);

// Lossless float PFM ("PF" color / "Pf" grayscale, little-endian).
void write_pfm(const Image& image, const std::string& path);
Image read_pfm(const std::string& path);

// Dispatch on extension (.png / .pfm).
void write_image(const Image& image, const std::string& path);
Image read_image(const std::string& path);

} // namespace forge
