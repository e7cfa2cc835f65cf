#include "forge/image.hpp"

#include "forge/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace forge {

namespace {

uint8_t to_byte(float v) {
    return static_cast<uint8_t>(std::clamp(std::lround(v * 255.0f), 0L, 255L));
}

void append_u32_be(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

uint32_t read_u32_be(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void write_chunk(std::ofstream& out, const char type[4], const std::vector<uint8_t>& payload) {
    std::vector<uint8_t> head;
    append_u32_be(head, static_cast<uint32_t>(payload.size()));
    out.write(reinterpret_cast<const char*>(head.data()), 4);
    out.write(type, 4);
    if (!payload.empty())
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
    uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!payload.empty())
        crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    std::vector<uint8_t> tail;
    append_u32_be(tail, crc);
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

void write_png_raw(const std::vector<uint8_t>& pixels, int width, int height, int channels,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");

    static const uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(signature), 8);

    std::vector<uint8_t> ihdr;
    append_u32_be(ihdr, static_cast<uint32_t>(width));
    append_u32_be(ihdr, static_cast<uint32_t>(height));
    ihdr.push_back(8);                                        // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);                    // gray / RGB
    ihdr.push_back(0);                                        // deflate
    ihdr.push_back(0);                                        // filter method
    ihdr.push_back(0);                                        // non-interlaced
    write_chunk(out, "IHDR", ihdr);

    const size_t rowBytes = static_cast<size_t>(width) * static_cast<size_t>(channels);
    std::vector<uint8_t> raw((rowBytes + 1) * static_cast<size_t>(height));
    for (int y = 0; y < height; ++y) {
        uint8_t* row = raw.data() + static_cast<size_t>(y) * (rowBytes + 1);
        row[0] = 0; // filter: none
        std::memcpy(row + 1, pixels.data() + static_cast<size_t>(y) * rowBytes, rowBytes);
    }
    uLongf compressedSize = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> compressed(compressedSize);
    if (compress2(compressed.data(), &compressedSize, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw IoFailure("deflate failed for " + path);
    compressed.resize(compressedSize);
    write_chunk(out, "IDAT", compressed);
    write_chunk(out, "IEND", {});
    if (!out)
        throw IoFailure("write failed for " + path);
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc)
        return a;
    if (pb <= pc)
        return b;
    return c;
}

struct DecodedPng {
    int width = 0, height = 0, channels = 0;
    std::vector<uint8_t> pixels;
};

DecodedPng read_png_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    std::vector<uint8_t> file((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    static const uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (file.size() < 8 || std::memcmp(file.data(), signature, 8) != 0)
        throw IoFailure(path + ": not a PNG file");

    DecodedPng png;
    int bitDepth = 0, colorType = -1;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    while (pos + 8 <= file.size()) {
        const uint32_t length = read_u32_be(&file[pos]);
        if (pos + 8 + length + 4 > file.size())
            throw IoFailure(path + ": truncated PNG chunk");
        const char* type = reinterpret_cast<const char*>(&file[pos + 4]);
        const uint8_t* payload = &file[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            png.width = static_cast<int>(read_u32_be(payload));
            png.height = static_cast<int>(read_u32_be(payload + 4));
            bitDepth = payload[8];
            colorType = payload[9];
            if (bitDepth != 8 || payload[12] != 0)
                throw IoFailure(path + ": only 8-bit non-interlaced PNG supported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + length);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 8 + length + 4;
    }
    switch (colorType) {
    case 0:
        png.channels = 1;
        break;
    case 2:
        png.channels = 3;
        break;
    case 6:
        png.channels = 4;
        break;
    default:
        throw IoFailure(path + ": unsupported PNG color type " + std::to_string(colorType));
    }

    const size_t rowBytes =
        static_cast<size_t>(png.width) * static_cast<size_t>(png.channels);
    std::vector<uint8_t> raw((rowBytes + 1) * static_cast<size_t>(png.height));
    uLongf rawSize = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &rawSize, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        rawSize != raw.size())
        throw IoFailure(path + ": PNG inflate failed");

    png.pixels.resize(rowBytes * static_cast<size_t>(png.height));
    const int bpp = png.channels;
    for (int y = 0; y < png.height; ++y) {
        const uint8_t* row = raw.data() + static_cast<size_t>(y) * (rowBytes + 1);
        const uint8_t filter = row[0];
        const uint8_t* src = row + 1;
        uint8_t* dst = png.pixels.data() + static_cast<size_t>(y) * rowBytes;
        const uint8_t* prior = y > 0 ? dst - rowBytes : nullptr;
        for (size_t x = 0; x < rowBytes; ++x) {
            const int a = x >= static_cast<size_t>(bpp) ? dst[x - static_cast<size_t>(bpp)] : 0;
            const int b = prior ? prior[x] : 0;
            const int c =
                (prior && x >= static_cast<size_t>(bpp)) ? prior[x - static_cast<size_t>(bpp)] : 0;
            int v = src[x];
            switch (filter) {
            case 0:
                break;
            case 1:
                v += a;
                break;
            case 2:
                v += b;
                break;
            case 3:
                v += (a + b) / 2;
                break;
            case 4:
                v += paeth(a, b, c);
                break;
            default:
                throw IoFailure(path + ": unknown PNG filter " + std::to_string(filter));
            }
            dst[x] = static_cast<uint8_t>(v & 0xff);
        }
    }
    return png;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void write_png(const Image& image, const std::string& path) {
    std::vector<uint8_t> pixels(image.pixel_count() * 3);
    for (size_t i = 0; i < pixels.size(); ++i)
        pixels[i] = to_byte(image.data[i]);
    write_png_raw(pixels, image.width, image.height, 3, path);
}

void write_png(const GrayMap& map, const std::string& path) {
    std::vector<uint8_t> pixels(map.data.size());
    for (size_t i = 0; i < pixels.size(); ++i)
        pixels[i] = to_byte(map.data[i]);
    write_png_raw(pixels, map.width, map.height, 1, path);
}

Image read_png(const std::string& path) {
    const DecodedPng png = read_png_raw(path);
    Image image(png.width, png.height);
    for (size_t p = 0; p < image.pixel_count(); ++p)
        for (int c = 0; c < 3; ++c) {
            const size_t src =
                p * static_cast<size_t>(png.channels) +
                static_cast<size_t>(png.channels == 1 ? 0 : c);
            image.data[p * 3 + static_cast<size_t>(c)] =
                static_cast<float>(png.pixels[src]) / 255.0f;
        }
    return image;
}

GrayMap read_png_gray(const std::string& path) {
    const DecodedPng png = read_png_raw(path);
    GrayMap map(png.width, png.height);
    for (size_t p = 0; p < map.data.size(); ++p) {
        const uint8_t* px = &png.pixels[p * static_cast<size_t>(png.channels)];
        if (png.channels == 1)
            map.data[p] = static_cast<float>(px[0]) / 255.0f;
        else
            map.data[p] =
                static_cast<float>(px[0] + px[1] + px[2]) / (3.0f * 255.0f);
    }
    return map;
}

void write_pfm(const Image& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
    // PFM rows run bottom to top.
    for (int y = image.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(
                      image.data.data() +
                      static_cast<size_t>(y) * static_cast<size_t>(image.width) * 3),
                  static_cast<std::streamsize>(static_cast<size_t>(image.width) * 3 *
                                               sizeof(float)));
    if (!out)
        throw IoFailure("write failed for " + path);
}

Image read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    std::string magic;
    int width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (magic != "PF" || width <= 0 || height <= 0)
        throw IoFailure(path + ": not a color PFM file");
    if (scale > 0)
        throw IoFailure(path + ": big-endian PFM not supported");
    in.get(); // single whitespace after the scale
    Image image(width, height);
    for (int y = height - 1; y >= 0; --y)
        in.read(reinterpret_cast<char*>(image.data.data() +
                                        static_cast<size_t>(y) * static_cast<size_t>(width) * 3),
                static_cast<std::streamsize>(static_cast<size_t>(width) * 3 * sizeof(float)));
    if (!in)
        throw IoFailure(path + ": truncated PFM data");
    return image;
}

void write_image(const Image& image, const std::string& path) {
    if (has_suffix(path, ".pfm"))
        write_pfm(image, path);
    else if (has_suffix(path, ".png"))
        write_png(image, path);
    else
        throw ConfigError("unsupported image extension: " + path);
}

Image read_image(const std::string& path) {
    if (has_suffix(path, ".pfm"))
        return read_pfm(path);
    if (has_suffix(path, ".png"))
        return read_png(path);
    throw ConfigError("unsupported image extension: " + path);
}

} // namespace forge
