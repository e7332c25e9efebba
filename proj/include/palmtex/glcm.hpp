#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "palmtex/image.hpp"

namespace palmtex {

/// Image reduced to `levels` gray levels; every pixel value is < levels.
struct QuantizedImage {
    int width = 0;
    int height = 0;
    int levels = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

/// Spatial displacement between the two pixels of a co-occurring pair.
/// dx moves along columns, dy along rows; (1,0) is the horizontal neighbor
/// in the same row.
struct Offset {
    int dx = 1;
    int dy = 0;

    double angle() const { return std::atan2(static_cast<double>(dy), static_cast<double>(dx)); }

    bool operator==(const Offset&) const = default;
};

/// Directed pair counts over gray levels at a fixed offset. counts is
/// levels x levels row-major; total_pairs is the number of in-bounds pairs
/// (the sum of all counts).
struct CooccurrenceMatrix {
    int levels = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_pairs = 0;

    std::uint64_t at(int i, int j) const {
        return counts[static_cast<std::size_t>(i) * levels + j];
    }
};

/// Pair counts divided by total_pairs; entries sum to 1.
struct NormalizedCooccurrence {
    int levels = 0;
    std::vector<double> probs;

    double at(int i, int j) const {
        return probs[static_cast<std::size_t>(i) * levels + j];
    }
    double& at(int i, int j) {
        return probs[static_cast<std::size_t>(i) * levels + j];
    }
};

/// Marginal distributions of a normalized co-occurrence matrix.
/// px/py are row/column sums. psum has 2*levels-1 entries; psum[t] is the
/// total probability of cells with i + j == t + 2 in 1-based level indices
/// (k runs 2 .. 2*levels), equivalently i + j == t with 0-based indices.
/// pdiff[k] is the total probability of cells with |i - j| == k,
/// k = 0 .. levels-1.
struct Marginals {
    std::vector<double> px;
    std::vector<double> py;
    std::vector<double> psum;
    std::vector<double> pdiff;
};

/// Uniform quantization by floor division: level = intensity / step.
/// The number of levels is ceil(256 / step).
inline QuantizedImage quantize(const GrayImage& img, int step) {
    if (step < 1 || step > 256)
        throw std::invalid_argument("quantize: step must be in [1, 256]");
    if (img.empty())
        throw std::invalid_argument("quantize: empty image");
    QuantizedImage out;
    out.width = img.width;
    out.height = img.height;
    out.levels = (256 + step - 1) / step;
    out.pixels.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = static_cast<std::uint8_t>(img.pixels[i] / step);
    return out;
}

/// Directed co-occurrence counts: counts(i,j) is the number of positions
/// whose pixel has level i and whose offset neighbor (col + dx, row + dy)
/// lies inside the image and has level j. No symmetrization, no wraparound;
/// pairs reaching outside the image are skipped.
inline CooccurrenceMatrix cooccurrence(const QuantizedImage& img, Offset off) {
    if (img.width <= 0 || img.height <= 0 || img.levels <= 0)
        throw std::invalid_argument("cooccurrence: empty image");
    if (off.dx == 0 && off.dy == 0)
        throw std::invalid_argument("cooccurrence: offset must be nonzero");

    CooccurrenceMatrix m;
    m.levels = img.levels;
    m.counts.assign(static_cast<std::size_t>(img.levels) * img.levels, 0);
    for (int r = 0; r < img.height; ++r) {
        const int r2 = r + off.dy;
        if (r2 < 0 || r2 >= img.height) continue;
        for (int c = 0; c < img.width; ++c) {
            const int c2 = c + off.dx;
            if (c2 < 0 || c2 >= img.width) continue;
            ++m.counts[static_cast<std::size_t>(img.at(r, c)) * img.levels + img.at(r2, c2)];
            ++m.total_pairs;
        }
    }
    return m;
}

/// p(i,j) = counts(i,j) / total_pairs.
inline NormalizedCooccurrence normalize(const CooccurrenceMatrix& glcm) {
    if (glcm.total_pairs == 0)
        throw std::domain_error("normalize: co-occurrence matrix has no pairs");
    NormalizedCooccurrence p;
    p.levels = glcm.levels;
    p.probs.resize(glcm.counts.size());
    const double r = static_cast<double>(glcm.total_pairs);
    for (std::size_t i = 0; i < glcm.counts.size(); ++i)
        p.probs[i] = static_cast<double>(glcm.counts[i]) / r;
    return p;
}

inline Marginals marginals(const NormalizedCooccurrence& p) {
    const int ng = p.levels;
    Marginals m;
    m.px.assign(ng, 0.0);
    m.py.assign(ng, 0.0);
    m.psum.assign(2 * ng - 1, 0.0);
    m.pdiff.assign(ng, 0.0);
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            const double v = p.at(i, j);
            m.px[i] += v;
            m.py[j] += v;
            m.psum[i + j] += v;
            m.pdiff[i > j ? i - j : j - i] += v;
        }
    }
    return m;
}

}  // namespace palmtex
