#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace palmtex {

/// 8-bit grayscale image, row-major storage.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;

    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("GrayImage: dimensions must be positive");
        pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
    }

    GrayImage(int w, int h, std::vector<std::uint8_t> data)
        : width(w), height(h), pixels(std::move(data)) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("GrayImage: dimensions must be positive");
        if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
            throw std::invalid_argument("GrayImage: pixel buffer does not match dimensions");
    }

    bool empty() const { return pixels.empty(); }

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t& at(int row, int col) {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }

    bool operator==(const GrayImage&) const = default;
};

}  // namespace palmtex
