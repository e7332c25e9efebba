#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "palmtex/image.hpp"

namespace palmtex {

/// File decode/encode failure; the message names the offending path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::filesystem::path& path, const std::uint8_t* data,
                       std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out)
        throw IoError("write failed: " + path.string());
}

inline std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PGM (binary P5, 8-bit)
// ---------------------------------------------------------------------------

inline GrayImage read_pgm(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> data = detail::read_file(path);
    std::size_t pos = 0;

    auto skip_space = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {  // comment runs to end of line
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(data[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_space();
        if (pos >= data.size() || !std::isdigit(data[pos]))
            throw IoError("malformed PGM header: " + path.string());
        long v = 0;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos] - '0');
            ++pos;
        }
        return v;
    };

    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw IoError("not a binary PGM (P5) file: " + path.string());
    pos = 2;
    const long w = read_int();
    const long h = read_int();
    const long maxval = read_int();
    if (w <= 0 || h <= 0)
        throw IoError("invalid PGM dimensions: " + path.string());
    if (maxval <= 0 || maxval > 255)
        throw IoError("unsupported PGM max value (only 8-bit supported): " + path.string());
    ++pos;  // single whitespace after maxval
    const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (data.size() - pos < expected)
        throw IoError("truncated PGM pixel data: " + path.string());

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(img.pixels.data(), data.data() + pos, expected);
    return img;
}

inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    detail::write_file(path, out.data(), out.size());
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale, non-interlaced)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& in,
                                              std::size_t expected_size,
                                              const std::string& ctx) {
    std::vector<std::uint8_t> out(expected_size);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK)
        throw IoError("zlib init failed: " + ctx);
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected_size)
        throw IoError("corrupt compressed image data: " + ctx);
    return out;
}

inline std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& in) {
    uLongf bound = compressBound(static_cast<uLong>(in.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, in.data(), static_cast<uLong>(in.size()), 6) != Z_OK)
        throw IoError("zlib compression failed");
    out.resize(bound);
    return out;
}

inline int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace detail

inline GrayImage read_png(const std::filesystem::path& path) {
    static constexpr std::uint8_t kSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    const std::vector<std::uint8_t> data = detail::read_file(path);
    if (data.size() < 8 || std::memcmp(data.data(), kSig, 8) != 0)
        throw IoError("not a PNG file: " + path.string());

    std::size_t pos = 8;
    long w = 0, h = 0;
    bool have_header = false;
    std::vector<std::uint8_t> idat;

    while (pos + 8 <= data.size()) {
        const std::uint32_t len = detail::be32(&data[pos]);
        if (pos + 12 + len > data.size())
            throw IoError("truncated PNG chunk: " + path.string());
        const char* type = reinterpret_cast<const char*>(&data[pos + 4]);
        const std::uint8_t* payload = &data[pos + 8];
        const std::uint32_t stored_crc = detail::be32(&data[pos + 8 + len]);
        const std::uint32_t crc =
            crc32(crc32(0, &data[pos + 4], 4), payload, len);
        if (crc != stored_crc)
            throw IoError("PNG chunk CRC mismatch: " + path.string());

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13)
                throw IoError("malformed PNG header: " + path.string());
            w = detail::be32(payload);
            h = detail::be32(payload + 4);
            const int bit_depth = payload[8];
            const int color_type = payload[9];
            const int interlace = payload[12];
            if (color_type != 0)
                throw IoError("not an 8-bit grayscale PNG: " + path.string());
            if (bit_depth != 8)
                throw IoError("unsupported PNG bit depth (want 8): " + path.string());
            if (interlace != 0)
                throw IoError("interlaced PNG not supported: " + path.string());
            have_header = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (!have_header || w <= 0 || h <= 0)
        throw IoError("missing PNG header: " + path.string());

    const std::size_t stride = static_cast<std::size_t>(w) + 1;  // filter byte + row
    const std::vector<std::uint8_t> raw =
        detail::zlib_inflate(idat, stride * static_cast<std::size_t>(h), path.string());

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<std::uint8_t> prev(static_cast<std::size_t>(w), 0);
    for (long y = 0; y < h; ++y) {
        const std::uint8_t filter = raw[y * stride];
        const std::uint8_t* src = &raw[y * stride + 1];
        std::uint8_t* dst = &img.pixels[static_cast<std::size_t>(y) * w];
        for (long x = 0; x < w; ++x) {
            const int a = x > 0 ? dst[x - 1] : 0;   // left
            const int b = prev[x];                  // up
            const int c = x > 0 ? prev[x - 1] : 0;  // up-left
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += detail::paeth(a, b, c); break;
                default:
                    throw IoError("unsupported PNG filter type: " + path.string());
            }
            dst[x] = static_cast<std::uint8_t>(v & 0xFF);
        }
        std::memcpy(prev.data(), dst, static_cast<std::size_t>(w));
    }
    return img;
}

inline void write_png(const GrayImage& img, const std::filesystem::path& path) {
    static constexpr std::uint8_t kSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> out(kSig, kSig + 8);

    auto put_chunk = [&out](const char* type, const std::vector<std::uint8_t>& payload) {
        detail::put_be32(out, static_cast<std::uint32_t>(payload.size()));
        const std::size_t type_at = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), payload.begin(), payload.end());
        const std::uint32_t crc =
            crc32(0, &out[type_at], static_cast<uInt>(4 + payload.size()));
        detail::put_be32(out, crc);
    };

    std::vector<std::uint8_t> ihdr;
    detail::put_be32(ihdr, static_cast<std::uint32_t>(img.width));
    detail::put_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // color type: grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    put_chunk("IHDR", ihdr);

    // filter type 0 (None) for every scanline
    std::vector<std::uint8_t> raw;
    raw.reserve((static_cast<std::size_t>(img.width) + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = &img.pixels[static_cast<std::size_t>(y) * img.width];
        raw.insert(raw.end(), row, row + img.width);
    }
    put_chunk("IDAT", detail::zlib_deflate(raw));
    put_chunk("IEND", {});

    detail::write_file(path, out.data(), out.size());
}

/// Reads a grayscale image, choosing the decoder by file magic.
inline GrayImage read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.close();
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    if (static_cast<unsigned char>(magic[0]) == 137 && magic[1] == 'P') return read_png(path);
    throw IoError("unrecognized image format (want PGM P5 or 8-bit grayscale PNG): " +
                  path.string());
}

/// Writes PGM or PNG depending on the file extension.
inline void write_image(const GrayImage& img, const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".pgm")
        write_pgm(img, path);
    else if (ext == ".png")
        write_png(img, path);
    else
        throw IoError("unsupported image extension (want .pgm or .png): " + path.string());
}

}  // namespace palmtex
