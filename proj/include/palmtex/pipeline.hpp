#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "palmtex/haralick.hpp"

namespace palmtex {

/// Per-block extraction configuration. The defaults (16-pixel blocks,
/// quantization step 8, horizontal unit offset) are the standard setup.
struct ExtractionConfig {
    int block_size = 16;
    int quant_step = 8;
    Offset offset{1, 0};
};

/// kFeatureCount x M matrix; column j is the feature vector of block j in
/// row-major tile order.
struct FeatureMatrix {
    int cols = 0;
    std::vector<double> values;  // kFeatureCount rows, row-major

    FeatureMatrix() = default;
    explicit FeatureMatrix(int c) : cols(c), values(static_cast<std::size_t>(kFeatureCount) * c, 0.0) {}

    static constexpr int rows = kFeatureCount;

    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }

    void set_column(int c, const FeatureVector& fv) {
        for (int r = 0; r < kFeatureCount; ++r) at(r, c) = fv.f[r];
    }

    bool operator==(const FeatureMatrix&) const = default;
};

/// Splits an image into non-overlapping block_size x block_size tiles in
/// row-major tile order. Both dimensions must be divisible by block_size.
inline std::vector<GrayImage> tile(const GrayImage& img, int block_size) {
    if (block_size <= 0)
        throw std::invalid_argument("tile: block size must be positive");
    if (img.empty())
        throw std::invalid_argument("tile: empty image");
    if (img.width % block_size != 0 || img.height % block_size != 0)
        throw std::invalid_argument("tile: block size must divide both image dimensions");

    const int tiles_x = img.width / block_size;
    const int tiles_y = img.height / block_size;
    std::vector<GrayImage> blocks;
    blocks.reserve(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (int by = 0; by < tiles_y; ++by) {
        for (int bx = 0; bx < tiles_x; ++bx) {
            GrayImage block(block_size, block_size);
            for (int r = 0; r < block_size; ++r)
                for (int c = 0; c < block_size; ++c)
                    block.at(r, c) = img.at(by * block_size + r, bx * block_size + c);
            blocks.push_back(std::move(block));
        }
    }
    return blocks;
}

inline FeatureVector block_features(const GrayImage& block, const ExtractionConfig& cfg) {
    return features(normalize(cooccurrence(quantize(block, cfg.quant_step), cfg.offset)));
}

/// Column j of the result is the feature vector of block j:
/// features(normalize(cooccurrence(quantize(block)))).
inline FeatureMatrix extract_feature_matrix(const GrayImage& img,
                                            const ExtractionConfig& cfg = {}) {
    const std::vector<GrayImage> blocks = tile(img, cfg.block_size);
    FeatureMatrix fm(static_cast<int>(blocks.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b)
        fm.set_column(static_cast<int>(b), block_features(blocks[b], cfg));
    return fm;
}

/// Element-wise arithmetic mean of feature matrices of equal dimensions.
inline FeatureMatrix mean_feature_matrix(std::span<const FeatureMatrix> samples) {
    if (samples.empty())
        throw std::invalid_argument("mean_feature_matrix: no input matrices");
    FeatureMatrix mean(samples.front().cols);
    for (const FeatureMatrix& fm : samples) {
        if (fm.cols != mean.cols)
            throw std::invalid_argument("mean_feature_matrix: dimension mismatch");
        for (std::size_t i = 0; i < fm.values.size(); ++i)
            mean.values[i] += fm.values[i];
    }
    const double n = static_cast<double>(samples.size());
    for (double& v : mean.values) v /= n;
    return mean;
}

enum class Spectrum { Red = 0, Green = 1, Blue = 2, Nir = 3 };

inline constexpr std::array<Spectrum, 4> kAllSpectra{Spectrum::Red, Spectrum::Green,
                                                     Spectrum::Blue, Spectrum::Nir};

inline constexpr const char* to_string(Spectrum s) {
    switch (s) {
        case Spectrum::Red: return "red";
        case Spectrum::Green: return "green";
        case Spectrum::Blue: return "blue";
        case Spectrum::Nir: return "nir";
    }
    return "?";
}

inline std::optional<Spectrum> parse_spectrum(std::string_view name) {
    for (Spectrum s : kAllSpectra)
        if (name == to_string(s)) return s;
    return std::nullopt;
}

/// The four per-spectrum feature matrices of one palm capture.
struct MultispectralSample {
    std::string person_id;
    int sample_index = 0;  // 1-based
    std::array<FeatureMatrix, 4> spectra;  // indexed by Spectrum

    const FeatureMatrix& operator[](Spectrum s) const {
        return spectra[static_cast<int>(s)];
    }
    FeatureMatrix& operator[](Spectrum s) { return spectra[static_cast<int>(s)]; }
};

}  // namespace palmtex
