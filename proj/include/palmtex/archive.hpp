#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "palmtex/classify.hpp"
#include "palmtex/image_io.hpp"
#include "palmtex/pipeline.hpp"

namespace palmtex {

/// Extracted feature matrices for a set of samples, with the extraction
/// settings they were produced under.
struct FeatureArchive {
    ExtractionConfig config;
    std::vector<MultispectralSample> samples;
};

/// Trained classifier state: per-person mean matrices plus weights and the
/// extraction settings the templates expect.
struct TemplateArchive {
    ExtractionConfig config;
    WeightMode mode = WeightMode::Uniform;
    ClassifierWeights weights;
    std::vector<PersonTemplate> templates;
};

namespace detail {

inline constexpr char kFeatureMagic[8] = {'P', 'T', 'X', 'F', 'E', 'A', 'T', '\n'};
inline constexpr char kTemplateMagic[8] = {'P', 'T', 'X', 'T', 'M', 'P', 'L', '\n'};
inline constexpr std::uint32_t kArchiveVersion = 1;

struct ByteWriter {
    std::vector<std::uint8_t> buf;

    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf.insert(buf.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
};

struct ByteReader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;
    std::string path;

    void need(std::size_t n) const {
        if (buf.size() - pos < n) throw IoError("truncated archive: " + path);
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
        pos += n;
        return s;
    }
};

inline void write_config(ByteWriter& w, const ExtractionConfig& cfg) {
    w.u32(static_cast<std::uint32_t>(cfg.block_size));
    w.u32(static_cast<std::uint32_t>(cfg.quant_step));
    w.i32(cfg.offset.dx);
    w.i32(cfg.offset.dy);
}

inline ExtractionConfig read_config(ByteReader& r) {
    ExtractionConfig cfg;
    cfg.block_size = static_cast<int>(r.u32());
    cfg.quant_step = static_cast<int>(r.u32());
    cfg.offset.dx = r.i32();
    cfg.offset.dy = r.i32();
    return cfg;
}

inline void write_matrix(ByteWriter& w, const FeatureMatrix& m) {
    w.u32(static_cast<std::uint32_t>(m.cols));
    for (double v : m.values) w.f64(v);
}

inline FeatureMatrix read_matrix(ByteReader& r) {
    const std::uint32_t cols = r.u32();
    if (cols == 0 || cols > (1u << 24)) throw IoError("bad matrix size in archive: " + r.path);
    FeatureMatrix m(static_cast<int>(cols));
    for (double& v : m.values) v = r.f64();
    return m;
}

inline void check_magic(ByteReader& r, const char (&magic)[8], const char* kind) {
    char got[8];
    r.raw(got, 8);
    if (std::memcmp(got, magic, 8) != 0)
        throw IoError(std::string("not a ") + kind + " archive: " + r.path);
    const std::uint32_t version = r.u32();
    if (version != kArchiveVersion)
        throw IoError(std::string("unsupported ") + kind + " archive version " +
                      std::to_string(version) + ": " + r.path);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Feature archives
// ---------------------------------------------------------------------------

inline void write_features(const FeatureArchive& ar, const std::filesystem::path& path) {
    detail::ByteWriter w;
    w.raw(detail::kFeatureMagic, 8);
    w.u32(detail::kArchiveVersion);
    detail::write_config(w, ar.config);
    w.u32(static_cast<std::uint32_t>(ar.samples.size()));
    for (const MultispectralSample& s : ar.samples) {
        w.str(s.person_id);
        w.i32(s.sample_index);
        for (const FeatureMatrix& m : s.spectra) detail::write_matrix(w, m);
    }
    detail::write_file(path, w.buf.data(), w.buf.size());
}

inline FeatureArchive read_features(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> buf = detail::read_file(path);
    detail::ByteReader r{buf, 0, path.string()};
    detail::check_magic(r, detail::kFeatureMagic, "feature");

    FeatureArchive ar;
    ar.config = detail::read_config(r);
    const std::uint32_t n = r.u32();
    ar.samples.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        MultispectralSample s;
        s.person_id = r.str();
        s.sample_index = r.i32();
        for (FeatureMatrix& m : s.spectra) m = detail::read_matrix(r);
        ar.samples.push_back(std::move(s));
    }
    return ar;
}

// ---------------------------------------------------------------------------
// Template archives
// ---------------------------------------------------------------------------

inline void write_templates(const TemplateArchive& ar, const std::filesystem::path& path) {
    detail::ByteWriter w;
    w.raw(detail::kTemplateMagic, 8);
    w.u32(detail::kArchiveVersion);
    detail::write_config(w, ar.config);
    w.u32(ar.mode == WeightMode::Uniform ? 0u : 1u);
    for (double v : ar.weights.w) w.f64(v);
    for (double v : ar.weights.alpha) w.f64(v);
    w.u32(static_cast<std::uint32_t>(ar.templates.size()));
    for (const PersonTemplate& t : ar.templates) {
        w.str(t.person_id);
        for (const FeatureMatrix& m : t.spectra) detail::write_matrix(w, m);
    }
    detail::write_file(path, w.buf.data(), w.buf.size());
}

inline TemplateArchive read_templates(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> buf = detail::read_file(path);
    detail::ByteReader r{buf, 0, path.string()};
    detail::check_magic(r, detail::kTemplateMagic, "template");

    TemplateArchive ar;
    ar.config = detail::read_config(r);
    ar.mode = r.u32() == 0 ? WeightMode::Uniform : WeightMode::PerRowAccuracy;
    for (double& v : ar.weights.w) v = r.f64();
    for (double& v : ar.weights.alpha) v = r.f64();
    const std::uint32_t n = r.u32();
    ar.templates.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        PersonTemplate t;
        t.person_id = r.str();
        for (FeatureMatrix& m : t.spectra) m = detail::read_matrix(r);
        ar.templates.push_back(std::move(t));
    }
    return ar;
}

}  // namespace palmtex
