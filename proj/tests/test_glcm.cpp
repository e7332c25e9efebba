#include <catch2/catch_amalgamated.hpp>

#include <palmtex/glcm.hpp>

#include "oracles.hpp"

using namespace palmtex;

namespace {

QuantizedImage make_quantized(int w, int h, int levels, std::vector<std::uint8_t> px) {
    QuantizedImage img;
    img.width = w;
    img.height = h;
    img.levels = levels;
    img.pixels = std::move(px);
    return img;
}

}  // namespace

TEST_CASE("worked 4x4 example at offset (1,0)") {
    // Levels 1..3 in the classic writeup, stored 0-based here.
    const QuantizedImage img = make_quantized(4, 4, 3,
                                              {0, 0, 1, 0,
                                               1, 2, 0, 1,
                                               1, 0, 2, 1,
                                               2, 2, 1, 0});
    const CooccurrenceMatrix m = cooccurrence(img, Offset{1, 0});
    REQUIRE(m.levels == 3);
    REQUIRE(m.total_pairs == 12);

    const std::vector<std::uint64_t> want = {1, 2, 1,
                                             3, 0, 1,
                                             1, 2, 1};
    CHECK(m.counts == want);

    const NormalizedCooccurrence p = normalize(m);
    const Marginals mg = marginals(p);
    CHECK(mg.px[0] == Catch::Approx(4.0 / 12).margin(1e-15));
    CHECK(mg.px[1] == Catch::Approx(4.0 / 12).margin(1e-15));
    CHECK(mg.px[2] == Catch::Approx(4.0 / 12).margin(1e-15));
    CHECK(mg.py[0] == Catch::Approx(5.0 / 12).margin(1e-15));
    CHECK(mg.py[1] == Catch::Approx(4.0 / 12).margin(1e-15));
    CHECK(mg.py[2] == Catch::Approx(3.0 / 12).margin(1e-15));
}

TEST_CASE("quantization") {
    GrayImage img(2, 2);
    img.pixels = {0, 7, 8, 255};

    SECTION("step 8 gives 32 levels") {
        const QuantizedImage q = quantize(img, 8);
        REQUIRE(q.levels == 32);
        CHECK(q.pixels == std::vector<std::uint8_t>{0, 0, 1, 31});
    }
    SECTION("step 1 keeps every value") {
        const QuantizedImage q = quantize(img, 1);
        REQUIRE(q.levels == 256);
        CHECK(q.pixels == img.pixels);
    }
    SECTION("step 256 collapses to one level") {
        const QuantizedImage q = quantize(img, 256);
        REQUIRE(q.levels == 1);
        CHECK(q.pixels == std::vector<std::uint8_t>{0, 0, 0, 0});
    }
    SECTION("step bounds are enforced") {
        CHECK_THROWS_AS(quantize(img, 0), std::invalid_argument);
        CHECK_THROWS_AS(quantize(img, -3), std::invalid_argument);
        CHECK_THROWS_AS(quantize(img, 257), std::invalid_argument);
    }
    SECTION("level count is ceil(256 / step)") {
        CHECK(quantize(img, 3).levels == 86);
        CHECK(quantize(img, 100).levels == 3);
    }
}

TEST_CASE("cooccurrence rejects bad input") {
    const QuantizedImage img = make_quantized(2, 2, 2, {0, 1, 1, 0});
    CHECK_THROWS_AS(cooccurrence(img, Offset{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(cooccurrence(QuantizedImage{}, Offset{1, 0}), std::invalid_argument);
}

TEST_CASE("pair count equals (W - |dx|) * (H - |dy|)") {
    oracle::Rand rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + rng.below(20);
        const int h = 1 + rng.below(20);
        const GrayImage img = oracle::random_image(rng, w, h);
        const QuantizedImage q = quantize(img, 32);
        Offset off{rng.below(7) - 3, rng.below(7) - 3};
        if (off.dx == 0 && off.dy == 0) off.dx = 1;
        const CooccurrenceMatrix m = cooccurrence(q, off);

        const std::uint64_t expect =
            static_cast<std::uint64_t>(std::max(0, w - std::abs(off.dx))) *
            static_cast<std::uint64_t>(std::max(0, h - std::abs(off.dy)));
        CHECK(m.total_pairs == expect);

        std::uint64_t sum = 0;
        for (std::uint64_t c : m.counts) sum += c;
        CHECK(sum == m.total_pairs);
    }
}

TEST_CASE("counts match exhaustive pair enumeration") {
    oracle::Rand rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const int w = 2 + rng.below(15);
        const int h = 2 + rng.below(15);
        const GrayImage img = oracle::random_image(rng, w, h);
        const QuantizedImage q = quantize(img, 16);
        Offset off{rng.below(5) - 2, rng.below(5) - 2};
        if (off.dx == 0 && off.dy == 0) off = Offset{1, 0};

        const CooccurrenceMatrix m = cooccurrence(q, off);
        const auto want = oracle::cooccurrence_counts(q, off.dx, off.dy);
        for (int i = 0; i < q.levels; ++i)
            for (int j = 0; j < q.levels; ++j) REQUIRE(m.at(i, j) == want[i][j]);
    }
}

TEST_CASE("reversed offset transposes the counts") {
    oracle::Rand rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = oracle::random_image(rng, 9, 7);
        const QuantizedImage q = quantize(img, 64);
        const Offset off{1 + rng.below(3), rng.below(3) - 1};
        const CooccurrenceMatrix a = cooccurrence(q, off);
        const CooccurrenceMatrix b = cooccurrence(q, Offset{-off.dx, -off.dy});
        REQUIRE(a.total_pairs == b.total_pairs);
        for (int i = 0; i < q.levels; ++i)
            for (int j = 0; j < q.levels; ++j) REQUIRE(a.at(i, j) == b.at(j, i));
    }
}

TEST_CASE("transposing the image swaps the offset axes") {
    oracle::Rand rng(14);
    const GrayImage img = oracle::random_image(rng, 8, 6);
    GrayImage t(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) t.at(c, r) = img.at(r, c);

    const QuantizedImage q = quantize(img, 32);
    const QuantizedImage qt = quantize(t, 32);
    for (const Offset off : {Offset{1, 0}, Offset{0, 1}, Offset{2, 1}, Offset{-1, 2}}) {
        const CooccurrenceMatrix a = cooccurrence(q, off);
        const CooccurrenceMatrix b = cooccurrence(qt, Offset{off.dy, off.dx});
        CHECK(a.counts == b.counts);
    }
}

TEST_CASE("offset angle") {
    CHECK(Offset{1, 0}.angle() == Catch::Approx(0.0));
    CHECK(Offset{1, 1}.angle() == Catch::Approx(std::atan2(1.0, 1.0)));
    CHECK(Offset{0, 2}.angle() == Catch::Approx(std::atan2(1.0, 0.0)));
}

TEST_CASE("normalization") {
    SECTION("entries sum to 1") {
        oracle::Rand rng(15);
        const GrayImage img = oracle::random_image(rng, 12, 12);
        const NormalizedCooccurrence p = normalize(cooccurrence(quantize(img, 8), Offset{1, 0}));
        double sum = 0.0;
        for (double v : p.probs) sum += v;
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("zero pairs is an error") {
        const QuantizedImage q = make_quantized(1, 1, 4, {2});
        const CooccurrenceMatrix m = cooccurrence(q, Offset{1, 0});
        REQUIRE(m.total_pairs == 0);
        CHECK_THROWS_AS(normalize(m), std::domain_error);
    }
}

TEST_CASE("marginals agree with direct summation") {
    oracle::Rand rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const int ng = 2 + rng.below(15);
        const oracle::Grid g = oracle::random_distribution(rng, ng);
        const NormalizedCooccurrence p = oracle::to_normalized(g);
        const Marginals m = marginals(p);

        for (int i = 0; i < ng; ++i) {
            double rx = 0.0, ry = 0.0;
            for (int j = 0; j < ng; ++j) {
                rx += g[i][j];
                ry += g[j][i];
            }
            REQUIRE(m.px[i] == Catch::Approx(rx).margin(1e-15));
            REQUIRE(m.py[i] == Catch::Approx(ry).margin(1e-15));
        }
        // psum[t] covers 1-based sums k = t + 2; pdiff[k] covers |i - j| = k
        for (int t = 0; t <= 2 * (ng - 1); ++t) {
            double want = 0.0;
            for (int i = 0; i < ng; ++i)
                for (int j = 0; j < ng; ++j)
                    if ((i + 1) + (j + 1) == t + 2) want += g[i][j];
            REQUIRE(m.psum[t] == Catch::Approx(want).margin(1e-15));
        }
        for (int k = 0; k < ng; ++k) {
            double want = 0.0;
            for (int i = 0; i < ng; ++i)
                for (int j = 0; j < ng; ++j)
                    if (std::abs(i - j) == k) want += g[i][j];
            REQUIRE(m.pdiff[k] == Catch::Approx(want).margin(1e-15));
        }

        double sx = 0.0, sy = 0.0, ss = 0.0, sd = 0.0;
        for (double v : m.px) sx += v;
        for (double v : m.py) sy += v;
        for (double v : m.psum) ss += v;
        for (double v : m.pdiff) sd += v;
        REQUIRE(sx == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(sy == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(ss == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(sd == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("out of range offsets produce empty matrices") {
    const QuantizedImage q = make_quantized(3, 3, 2, {0, 1, 0, 1, 0, 1, 0, 1, 0});
    const CooccurrenceMatrix m = cooccurrence(q, Offset{5, 0});
    CHECK(m.total_pairs == 0);
    for (std::uint64_t c : m.counts) CHECK(c == 0);
}
