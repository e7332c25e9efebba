#include <catch2/catch_amalgamated.hpp>

#include <palmtex/pipeline.hpp>

#include "oracles.hpp"

using namespace palmtex;

TEST_CASE("tiling a 128x128 image into 16x16 blocks") {
    oracle::Rand rng(31);
    const GrayImage img = oracle::random_image(rng, 128, 128);
    const std::vector<GrayImage> blocks = tile(img, 16);
    REQUIRE(blocks.size() == 64);
    for (const GrayImage& b : blocks) {
        CHECK(b.width == 16);
        CHECK(b.height == 16);
    }

    // row-major block order: block index is (row / 16) * 8 + col / 16
    for (int br = 0; br < 8; ++br)
        for (int bc = 0; bc < 8; ++bc) {
            const GrayImage& b = blocks[static_cast<std::size_t>(br) * 8 + bc];
            for (int r = 0; r < 16; ++r)
                for (int c = 0; c < 16; ++c)
                    REQUIRE(b.at(r, c) == img.at(br * 16 + r, bc * 16 + c));
        }
}

TEST_CASE("tiling with block size equal to the image is the identity") {
    oracle::Rand rng(32);
    const GrayImage img = oracle::random_image(rng, 24, 24);
    const std::vector<GrayImage> blocks = tile(img, 24);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0] == img);
}

TEST_CASE("tiling validates its input") {
    const GrayImage img(32, 32);
    CHECK_THROWS_AS(tile(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(tile(img, -4), std::invalid_argument);
    CHECK_THROWS_AS(tile(img, 5), std::invalid_argument);    // 32 % 5 != 0
    CHECK_THROWS_AS(tile(img, 64), std::invalid_argument);   // larger than image
    CHECK_THROWS_AS(tile(GrayImage{}, 8), std::invalid_argument);
}

TEST_CASE("tiles reassemble into the original image") {
    oracle::Rand rng(33);
    const GrayImage img = oracle::random_image(rng, 48, 32);
    const std::vector<GrayImage> blocks = tile(img, 16);
    REQUIRE(blocks.size() == 6);

    GrayImage back(48, 32);
    const int per_row = 48 / 16;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const int br = static_cast<int>(i) / per_row;
        const int bc = static_cast<int>(i) % per_row;
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c)
                back.at(br * 16 + r, bc * 16 + c) = blocks[i].at(r, c);
    }
    CHECK(back == img);
}

TEST_CASE("feature matrix columns are per-block and independent") {
    oracle::Rand rng(34);
    const GrayImage img = oracle::random_image(rng, 64, 64);
    const ExtractionConfig cfg;  // 16x16 blocks, step 8, offset (1,0)
    const FeatureMatrix fm = extract_feature_matrix(img, cfg);
    REQUIRE(fm.cols == 16);
    REQUIRE(FeatureMatrix::rows == kFeatureCount);

    const std::vector<GrayImage> blocks = tile(img, cfg.block_size);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const FeatureVector f = block_features(blocks[b], cfg);
        for (int r = 0; r < kFeatureCount; ++r)
            REQUIRE(fm.at(r, static_cast<int>(b)) == f[r]);
    }

    // changing one block only changes its own column
    GrayImage altered = img;
    for (int r = 16; r < 32; ++r)
        for (int c = 32; c < 48; ++c) altered.at(r, c) = static_cast<std::uint8_t>(255 - altered.at(r, c));
    const FeatureMatrix fm2 = extract_feature_matrix(altered, cfg);
    const int changed = 1 * 4 + 2;  // block row 1, block col 2
    for (int b = 0; b < fm.cols; ++b) {
        for (int r = 0; r < kFeatureCount; ++r) {
            if (b == changed) continue;
            REQUIRE(fm2.at(r, b) == fm.at(r, b));
        }
    }
    bool any_diff = false;
    for (int r = 0; r < kFeatureCount; ++r)
        if (fm2.at(r, changed) != fm.at(r, changed)) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("extraction respects quantization and offset settings") {
    oracle::Rand rng(35);
    const GrayImage img = oracle::random_image(rng, 32, 32);
    ExtractionConfig cfg;
    cfg.block_size = 32;
    cfg.quant_step = 4;
    cfg.offset = Offset{0, 1};
    const FeatureMatrix fm = extract_feature_matrix(img, cfg);

    const FeatureVector want =
        features(normalize(cooccurrence(quantize(img, 4), Offset{0, 1})));
    for (int r = 0; r < kFeatureCount; ++r) REQUIRE(fm.at(r, 0) == want[r]);
}

TEST_CASE("constant image produces the degenerate feature column") {
    const GrayImage img(32, 32, 77);
    const FeatureMatrix fm = extract_feature_matrix(img, {});
    for (int b = 0; b < fm.cols; ++b) {
        CHECK(fm.at(0, b) == 1.0);   // angular second moment
        CHECK(fm.at(1, b) == 0.0);   // contrast
        CHECK(fm.at(2, b) == 0.0);   // correlation sentinel
        CHECK(fm.at(4, b) == 1.0);   // inverse difference moment
        CHECK(fm.at(8, b) == 0.0);   // entropy
        CHECK(fm.at(13, b) == 0.0);  // max correlation sentinel
    }
}

TEST_CASE("mean feature matrix") {
    oracle::Rand rng(36);
    FeatureMatrix a(3), b(3);
    for (int r = 0; r < kFeatureCount; ++r)
        for (int c = 0; c < 3; ++c) {
            a.at(r, c) = rng.uniform() * 10 - 5;
            b.at(r, c) = rng.uniform() * 10 - 5;
        }

    SECTION("mean of identical matrices is the matrix") {
        const std::vector<FeatureMatrix> two{a, a};
        const FeatureMatrix m = mean_feature_matrix(two);
        for (int r = 0; r < kFeatureCount; ++r)
            for (int c = 0; c < 3; ++c) REQUIRE(m.at(r, c) == a.at(r, c));
    }
    SECTION("mean of two matrices is the element-wise average") {
        const std::vector<FeatureMatrix> two{a, b};
        const FeatureMatrix m = mean_feature_matrix(two);
        for (int r = 0; r < kFeatureCount; ++r)
            for (int c = 0; c < 3; ++c)
                REQUIRE(m.at(r, c) == Catch::Approx((a.at(r, c) + b.at(r, c)) / 2).margin(1e-15));
    }
    SECTION("empty input and shape mismatches are rejected") {
        CHECK_THROWS_AS(mean_feature_matrix({}), std::invalid_argument);
        const std::vector<FeatureMatrix> bad{a, FeatureMatrix(4)};
        CHECK_THROWS_AS(mean_feature_matrix(bad), std::invalid_argument);
    }
}

TEST_CASE("spectrum names round-trip") {
    for (Spectrum s : kAllSpectra) CHECK(parse_spectrum(to_string(s)) == s);
    CHECK(parse_spectrum("red") == Spectrum::Red);
    CHECK(parse_spectrum("nir") == Spectrum::Nir);
    CHECK_FALSE(parse_spectrum("ultraviolet").has_value());
}

TEST_CASE("multispectral sample indexing") {
    MultispectralSample s;
    s.person_id = "007";
    s.spectra[3] = FeatureMatrix(2);
    s.spectra[3].at(5, 1) = 42.0;
    CHECK(s[Spectrum::Nir].at(5, 1) == 42.0);
}
