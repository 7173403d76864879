#include "supertml/png.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <string>

#include <fmt/format.h>
#include <zlib.h>

#include "supertml/error.hpp"

namespace supertml {

namespace {

constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], std::span<const std::uint8_t> data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    return pb <= pc ? b : c;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height))
        throw DataError("cannot encode an empty or inconsistent image");

    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(image.width + 1) * image.height);
    for (int y = 0; y < image.height; ++y) {
        raw.push_back(0);
        const auto* row = image.pixels.data() + static_cast<std::size_t>(y) * image.width;
        raw.insert(raw.end(), row, row + image.width);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw DataError("zlib compression failed");
    packed.resize(packed_size);

    std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(image.width));
    put_u32(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // depth 8, grayscale, deflate, adaptive filters, no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kSignature.size() || !std::equal(kSignature.begin(), kSignature.end(), bytes.begin()))
        throw DataError("not a PNG file");
    std::size_t pos = kSignature.size();
    int width = 0, height = 0;
    std::vector<std::uint8_t> packed;
    bool seen_end = false;
    while (pos + 12 <= bytes.size() && !seen_end) {
        const std::uint32_t len = get_u32(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw DataError("truncated PNG chunk");
        const std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const std::uint8_t* data = &bytes[pos + 8];
        const uLong crc = crc32(0L, &bytes[pos + 4], len + 4);
        if (crc != get_u32(data + len)) throw DataError(fmt::format("CRC mismatch in {} chunk", type));
        if (type == "IHDR") {
            if (len != 13) throw DataError("bad IHDR");
            width = static_cast<int>(get_u32(data));
            height = static_cast<int>(get_u32(data + 4));
            if (data[8] != 8 || data[9] != 0 || data[12] != 0)
                throw DataError("only 8-bit non-interlaced grayscale PNG is supported");
        } else if (type == "IDAT") {
            packed.insert(packed.end(), data, data + len);
        } else if (type == "IEND") {
            seen_end = true;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0 || !seen_end) throw DataError("incomplete PNG");

    const std::size_t stride = static_cast<std::size_t>(width);
    std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(height));
    uLongf raw_size = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_size, packed.data(), static_cast<uLong>(packed.size())) != Z_OK ||
        raw_size != raw.size())
        throw DataError("corrupt PNG image data");

    RasterImage image(width, height, 0);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t filter = raw[static_cast<std::size_t>(y) * (stride + 1)];
        const std::uint8_t* src = &raw[static_cast<std::size_t>(y) * (stride + 1) + 1];
        for (int x = 0; x < width; ++x) {
            const int a = x > 0 ? image.at(x - 1, y) : 0;
            const int b = y > 0 ? image.at(x, y - 1) : 0;
            const int c = x > 0 && y > 0 ? image.at(x - 1, y - 1) : 0;
            int pred = 0;
            switch (filter) {
                case 0: pred = 0; break;
                case 1: pred = a; break;
                case 2: pred = b; break;
                case 3: pred = (a + b) / 2; break;
                case 4: pred = paeth(a, b, c); break;
                default: throw DataError(fmt::format("unknown PNG filter {}", filter));
            }
            image.at(x, y) = static_cast<std::uint8_t>(src[x] + pred);
        }
    }
    return image;
}

}  // namespace supertml
