#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "palmtex/image_io.hpp"
#include "palmtex/pipeline.hpp"

namespace palmtex {

namespace fs = std::filesystem;

/// File listing of one dataset: per person, the per-spectrum image paths in
/// sample order. Paths are relative to root.
struct ManifestPerson {
    std::string id;
    std::array<std::vector<fs::path>, 4> files;  // indexed by Spectrum
};

struct DatasetManifest {
    fs::path root;
    std::vector<ManifestPerson> persons;
};

/// One palm capture as loaded from disk: four grayscale images.
struct RawSample {
    std::string person_id;
    int sample_index = 0;  // 1-based
    std::array<GrayImage, 4> images;  // indexed by Spectrum

    const GrayImage& operator[](Spectrum s) const { return images[static_cast<int>(s)]; }
    GrayImage& operator[](Spectrum s) { return images[static_cast<int>(s)]; }
};

// ---------------------------------------------------------------------------
// Manifest discovery and parsing
// ---------------------------------------------------------------------------

/// Builds a manifest by scanning the standard layout
/// root/<person_id>/<spectrum>/<sample>.<ext>, persons and samples sorted by
/// name.
inline DatasetManifest scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root))
        throw IoError("dataset root is not a directory: " + root.string());

    DatasetManifest mf;
    mf.root = root;
    std::vector<std::string> person_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) person_dirs.push_back(entry.path().filename().string());
    std::sort(person_dirs.begin(), person_dirs.end());

    for (const std::string& pid : person_dirs) {
        ManifestPerson person;
        person.id = pid;
        for (Spectrum s : kAllSpectra) {
            const fs::path dir = root / pid / to_string(s);
            if (!fs::is_directory(dir))
                throw IoError("missing spectrum directory: " + dir.string());
            std::vector<std::string> names;
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
            std::sort(names.begin(), names.end());
            for (const std::string& name : names)
                person.files[static_cast<int>(s)].push_back(fs::path(pid) / to_string(s) / name);
        }
        mf.persons.push_back(std::move(person));
    }
    if (mf.persons.empty())
        throw IoError("no persons found under dataset root: " + root.string());
    return mf;
}

inline DatasetManifest read_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw IoError("cannot open manifest: " + manifest_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "palmtex-manifest")
        throw IoError("not a palmtex manifest: " + manifest_path.string());
    if (j.value("version", 0) != 1)
        throw IoError("unsupported manifest version: " + manifest_path.string());

    DatasetManifest mf;
    mf.root = manifest_path.parent_path();
    for (const auto& jp : j.at("persons")) {
        ManifestPerson person;
        person.id = jp.at("id").get<std::string>();
        for (Spectrum s : kAllSpectra) {
            const auto& paths = jp.at("spectra").at(to_string(s));
            for (const auto& p : paths)
                person.files[static_cast<int>(s)].push_back(fs::path(p.get<std::string>()));
        }
        mf.persons.push_back(std::move(person));
    }
    if (mf.persons.empty())
        throw IoError("manifest lists no persons: " + manifest_path.string());
    return mf;
}

inline void write_manifest(const DatasetManifest& mf, const fs::path& manifest_path) {
    nlohmann::json j;
    j["format"] = "palmtex-manifest";
    j["version"] = 1;
    j["persons"] = nlohmann::json::array();
    for (const ManifestPerson& person : mf.persons) {
        nlohmann::json jp;
        jp["id"] = person.id;
        for (Spectrum s : kAllSpectra) {
            auto& arr = jp["spectra"][to_string(s)];
            arr = nlohmann::json::array();
            for (const fs::path& p : person.files[static_cast<int>(s)])
                arr.push_back(p.generic_string());
        }
        j["persons"].push_back(std::move(jp));
    }
    std::ofstream out(manifest_path);
    if (!out)
        throw IoError("cannot write manifest: " + manifest_path.string());
    out << j.dump(2) << "\n";
}

/// Accepts either a dataset directory (standard layout) or a manifest JSON
/// file.
inline DatasetManifest open_dataset(const fs::path& path) {
    if (fs::is_directory(path)) {
        const fs::path mf = path / "manifest.json";
        if (fs::is_regular_file(mf)) return read_manifest(mf);
        return scan_dataset(path);
    }
    return read_manifest(path);
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

struct LoadOptions {
    int expected_width = 128;
    int expected_height = 128;
    bool check_size = true;
};

/// Decodes every referenced image, grouped into one RawSample per
/// (person, sample index). Ordering is stable: person id, then sample index,
/// then spectrum.
inline std::vector<RawSample> load(const DatasetManifest& mf, const LoadOptions& opt = {}) {
    std::vector<RawSample> out;
    for (const ManifestPerson& person : mf.persons) {
        const std::size_t n = person.files[0].size();
        for (Spectrum s : kAllSpectra) {
            if (person.files[static_cast<int>(s)].size() != n)
                throw IoError("person " + person.id + ": spectrum " + to_string(s) +
                              " has a different sample count");
        }
        if (n == 0)
            throw IoError("person " + person.id + " has no samples");

        for (std::size_t i = 0; i < n; ++i) {
            RawSample sample;
            sample.person_id = person.id;
            sample.sample_index = static_cast<int>(i) + 1;
            for (Spectrum s : kAllSpectra) {
                const fs::path path = mf.root / person.files[static_cast<int>(s)][i];
                GrayImage img = read_image(path);
                if (opt.check_size &&
                    (img.width != opt.expected_width || img.height != opt.expected_height)) {
                    throw IoError("unexpected image size " + std::to_string(img.width) + "x" +
                                  std::to_string(img.height) + " (want " +
                                  std::to_string(opt.expected_width) + "x" +
                                  std::to_string(opt.expected_height) + "): " + path.string());
                }
                sample[s] = std::move(img);
            }
            out.push_back(std::move(sample));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Synthetic dataset knobs. Each person gets a base grating orientation and
/// frequency; each spectrum views it with a fixed frequency multiplier and
/// orientation shift; each sample adds phase/orientation/frequency jitter
/// and pixel noise. Larger jitter and noise make the classes harder to
/// separate.
struct SynthConfig {
    int num_persons = 50;
    int samples_per_person = 12;
    int image_size = 128;
    double freq_min = 6.0;             // cycles per image, person grid low end
    double freq_max = 26.0;            // cycles per image, person grid high end
    double amplitude = 52.0;           // grating amplitude in gray levels
    double orientation_jitter = 0.005;  // radians, per sample
    double freq_jitter = 0.06;         // cycles, per sample
    double noise_sigma = 6.0;          // gray levels, per pixel
    std::uint64_t seed = 1;
};

namespace detail {

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }
    double normal(double sigma) {
        // Box-Muller; one draw per call keeps the stream layout simple
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
    SplitMix64 rng{a ^ (b * 0x9E3779B97F4A7C15ULL) ^ (c * 0xC2B2AE3D27D4EB4FULL) ^
                   (d * 0x165667B19E3779F9ULL)};
    return rng.next();
}

}  // namespace detail

inline std::vector<RawSample> synthesize(const SynthConfig& cfg) {
    if (cfg.num_persons <= 0 || cfg.samples_per_person <= 0)
        throw std::invalid_argument("synthesize: need at least one person and one sample");
    if (cfg.image_size <= 0)
        throw std::invalid_argument("synthesize: image size must be positive");

    // Spectrum views of the person grating: frequency multiplier and
    // orientation shift.
    static constexpr std::array<double, 4> kFreqMul{1.00, 1.21, 1.44, 1.69};
    static constexpr std::array<double, 4> kAngleShift{0.00, 0.30, 0.60, 0.90};
    constexpr double kPi = 3.14159265358979323846;
    constexpr double kGolden = 0.6180339887498949;

    const int size = cfg.image_size;
    const double span = cfg.freq_max - cfg.freq_min;

    std::vector<RawSample> out;
    out.reserve(static_cast<std::size_t>(cfg.num_persons) * cfg.samples_per_person);
    int digits = 1;
    for (int n = cfg.num_persons; n >= 10; n /= 10) ++digits;
    digits = std::max(digits, 3);

    for (int p = 0; p < cfg.num_persons; ++p) {
        // Person identity: evenly spaced frequency grid, golden-ratio
        // orientation spread, small seed-dependent detune.
        detail::SplitMix64 prng{detail::mix_seed(cfg.seed, 0x706572u, p)};
        const double grid = cfg.num_persons > 1
                                ? static_cast<double>(p) / (cfg.num_persons - 1)
                                : 0.5;
        const double freq_base = cfg.freq_min + span * grid +
                                 (prng.uniform() - 0.5) * 0.2 * span /
                                     std::max(cfg.num_persons - 1, 1);
        const double theta_base = kPi * std::fmod(p * kGolden + prng.uniform() * 0.01, 1.0);

        std::string id = std::to_string(p + 1);
        id.insert(0, static_cast<std::size_t>(digits) - id.size(), '0');

        for (int t = 0; t < cfg.samples_per_person; ++t) {
            RawSample sample;
            sample.person_id = id;
            sample.sample_index = t + 1;
            for (Spectrum sp : kAllSpectra) {
                const int si = static_cast<int>(sp);
                detail::SplitMix64 rng{detail::mix_seed(cfg.seed, p, t, si + 1)};
                const double phase = rng.uniform() * 2.0 * kPi;
                const double theta =
                    theta_base + kAngleShift[si] + rng.normal(cfg.orientation_jitter);
                const double freq = (freq_base + rng.normal(cfg.freq_jitter)) * kFreqMul[si];
                const double fx = 2.0 * kPi * freq * std::cos(theta) / size;
                const double fy = 2.0 * kPi * freq * std::sin(theta) / size;

                GrayImage img(size, size);
                for (int y = 0; y < size; ++y) {
                    for (int x = 0; x < size; ++x) {
                        double v = 128.0 + cfg.amplitude * std::sin(fx * x + fy * y + phase);
                        if (cfg.noise_sigma > 0.0) v += rng.normal(cfg.noise_sigma);
                        img.at(y, x) = static_cast<std::uint8_t>(
                            std::clamp(std::lround(v), 0L, 255L));
                    }
                }
                sample[sp] = std::move(img);
            }
            out.push_back(std::move(sample));
        }
    }
    return out;
}

/// Writes samples in the standard layout plus a manifest.json; the returned
/// manifest points at the written files. ext is "png" or "pgm".
inline DatasetManifest write_dataset(const std::vector<RawSample>& samples, const fs::path& root,
                                     const std::string& ext = "png") {
    if (samples.empty())
        throw std::invalid_argument("write_dataset: no samples");

    DatasetManifest mf;
    mf.root = root;
    std::map<std::string, ManifestPerson> persons;
    int max_index = 0;
    for (const RawSample& s : samples) max_index = std::max(max_index, s.sample_index);
    const int digits = max_index >= 100 ? 3 : 2;

    for (const RawSample& sample : samples) {
        ManifestPerson& person = persons[sample.person_id];
        person.id = sample.person_id;
        std::string name = std::to_string(sample.sample_index);
        name.insert(0, static_cast<std::size_t>(digits) - std::min<std::size_t>(digits, name.size()), '0');
        name += "." + ext;
        for (Spectrum s : kAllSpectra) {
            const fs::path rel = fs::path(sample.person_id) / to_string(s) / name;
            fs::create_directories(root / rel.parent_path());
            write_image(sample[s], root / rel);
            person.files[static_cast<int>(s)].push_back(rel);
        }
    }
    for (auto& [id, person] : persons) mf.persons.push_back(std::move(person));
    write_manifest(mf, root / "manifest.json");
    return mf;
}

// ---------------------------------------------------------------------------
// Train/test splits
// ---------------------------------------------------------------------------

enum class SplitScheme { RandomRepeats, CircularAdjacent };

struct SplitSpec {
    int train_count = 6;
    SplitScheme scheme = SplitScheme::CircularAdjacent;
    int repeats = 10;          // RandomRepeats only
    std::uint64_t seed = 0;    // RandomRepeats only
};

/// One train/test partition of the per-person sample indices (0-based).
struct Fold {
    std::vector<int> train;
    std::vector<int> test;
};

/// RandomRepeats: `repeats` independent folds, each a uniform random choice
/// of train_count indices. CircularAdjacent: num_samples folds; fold k trains
/// on the contiguous window {k, k+1, ..., k+train_count-1} modulo
/// num_samples.
inline std::vector<Fold> splits(int num_samples, const SplitSpec& spec) {
    if (num_samples < 2)
        throw std::invalid_argument("splits: need at least 2 samples");
    if (spec.train_count < 1 || spec.train_count >= num_samples)
        throw std::invalid_argument("splits: train count must be in [1, num_samples - 1]");

    std::vector<Fold> folds;
    auto finish = [num_samples](std::vector<int> train) {
        std::sort(train.begin(), train.end());
        Fold fold;
        fold.train = std::move(train);
        std::size_t next = 0;
        for (int i = 0; i < num_samples; ++i) {
            if (next < fold.train.size() && fold.train[next] == i)
                ++next;
            else
                fold.test.push_back(i);
        }
        return fold;
    };

    if (spec.scheme == SplitScheme::CircularAdjacent) {
        for (int k = 0; k < num_samples; ++k) {
            std::vector<int> train(spec.train_count);
            for (int i = 0; i < spec.train_count; ++i) train[i] = (k + i) % num_samples;
            folds.push_back(finish(std::move(train)));
        }
    } else {
        if (spec.repeats < 1)
            throw std::invalid_argument("splits: repeats must be at least 1");
        for (int rep = 0; rep < spec.repeats; ++rep) {
            detail::SplitMix64 rng{detail::mix_seed(spec.seed, 0x73706c74u, rep)};
            std::vector<int> order(num_samples);
            for (int i = 0; i < num_samples; ++i) order[i] = i;
            for (int i = num_samples - 1; i > 0; --i)
                std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
            folds.push_back(finish(
                std::vector<int>(order.begin(), order.begin() + spec.train_count)));
        }
    }
    return folds;
}

inline constexpr const char* to_string(SplitScheme s) {
    return s == SplitScheme::RandomRepeats ? "random_repeats" : "circular_adjacent";
}

}  // namespace palmtex
