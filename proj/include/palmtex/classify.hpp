#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "palmtex/pipeline.hpp"

namespace palmtex {

/// Per-person enrollment template: the element-wise mean of the training
/// feature matrices, one per spectrum.
struct PersonTemplate {
    std::string person_id;
    std::array<FeatureMatrix, 4> spectra;

    const FeatureMatrix& operator[](Spectrum s) const {
        return spectra[static_cast<int>(s)];
    }
    FeatureMatrix& operator[](Spectrum s) { return spectra[static_cast<int>(s)]; }
};

/// Row weights of the classifiers: w is the feature importance factor,
/// alpha the per-row normalizing factor (reciprocal mean magnitude).
struct ClassifierWeights {
    std::array<double, kFeatureCount> w;
    std::array<double, kFeatureCount> alpha;

    ClassifierWeights() {
        w.fill(1.0);
        alpha.fill(1.0);
    }
};

struct IdentificationResult {
    std::string predicted_id;
    /// One entry per candidate, in template order: distance for the minimum
    /// distance classifier, total vote score for weighted majority voting.
    std::vector<std::pair<std::string, double>> scores;
    std::chrono::duration<double> elapsed{0.0};
};

/// All training samples of one person.
struct PersonSamples {
    std::string person_id;
    std::vector<MultispectralSample> samples;
};

enum class WeightMode { Uniform, PerRowAccuracy };

inline constexpr const char* to_string(WeightMode m) {
    return m == WeightMode::Uniform ? "uniform" : "per_row_accuracy";
}

/// Weighted squared distance between a test sample and a template, averaged
/// over the four spectra. Row m contributes w[m] * alpha[m] * (difference)^2
/// summed over its columns.
inline double mdc_distance(const MultispectralSample& test, const PersonTemplate& tpl,
                           const ClassifierWeights& wts) {
    double total = 0.0;
    for (Spectrum s : kAllSpectra) {
        const FeatureMatrix& a = test[s];
        const FeatureMatrix& b = tpl[s];
        if (a.cols != b.cols)
            throw std::invalid_argument("mdc_distance: feature matrix dimension mismatch");
        for (int r = 0; r < kFeatureCount; ++r) {
            const double wa = wts.w[r] * wts.alpha[r];
            double row = 0.0;
            for (int c = 0; c < a.cols; ++c) {
                const double d = a.at(r, c) - b.at(r, c);
                row += d * d;
            }
            total += wa * row;
        }
    }
    return total / static_cast<double>(kAllSpectra.size());
}

/// Predicts the template with minimal mdc_distance; ties go to the
/// lexicographically lowest person id.
inline IdentificationResult mdc_identify(const MultispectralSample& test,
                                         std::span<const PersonTemplate> templates,
                                         const ClassifierWeights& wts) {
    if (templates.empty())
        throw std::invalid_argument("mdc_identify: no templates");
    const auto start = std::chrono::steady_clock::now();

    IdentificationResult res;
    res.scores.reserve(templates.size());
    const PersonTemplate* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const PersonTemplate& tpl : templates) {
        const double d = mdc_distance(test, tpl, wts);
        res.scores.emplace_back(tpl.person_id, d);
        if (d < best_d || (d == best_d && best && tpl.person_id < best->person_id)) {
            best_d = d;
            best = &tpl;
        }
    }
    res.predicted_id = best->person_id;
    res.elapsed = std::chrono::steady_clock::now() - start;
    return res;
}

/// Weighted majority voting: for every spectrum and every feature row, the
/// template whose row is nearest in Euclidean norm receives that row's
/// weight. The prediction is the candidate with the highest total score;
/// per-vote and total ties go to the lexicographically lowest person id.
inline IdentificationResult wmv_identify(const MultispectralSample& test,
                                         std::span<const PersonTemplate> templates,
                                         const ClassifierWeights& wts) {
    if (templates.empty())
        throw std::invalid_argument("wmv_identify: no templates");
    const auto start = std::chrono::steady_clock::now();

    const std::size_t n = templates.size();
    // votes[k][r]: number of spectra in which row r elected template k
    std::vector<std::array<int, kFeatureCount>> votes(n);
    for (auto& v : votes) v.fill(0);

    for (Spectrum s : kAllSpectra) {
        const FeatureMatrix& a = test[s];
        for (int r = 0; r < kFeatureCount; ++r) {
            std::size_t best_k = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                const FeatureMatrix& b = templates[k][s];
                if (a.cols != b.cols)
                    throw std::invalid_argument("wmv_identify: feature matrix dimension mismatch");
                double d = 0.0;
                for (int c = 0; c < a.cols; ++c) {
                    const double diff = a.at(r, c) - b.at(r, c);
                    d += diff * diff;
                }
                if (d < best_d ||
                    (d == best_d && templates[k].person_id < templates[best_k].person_id)) {
                    best_d = d;
                    best_k = k;
                }
            }
            ++votes[best_k][r];
        }
    }

    IdentificationResult res;
    res.scores.reserve(n);
    std::size_t best_k = 0;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        double s_k = 0.0;
        for (int r = 0; r < kFeatureCount; ++r)
            s_k += wts.w[r] * votes[k][r];
        res.scores.emplace_back(templates[k].person_id, s_k);
        if (s_k > best_s || (s_k == best_s && templates[k].person_id < templates[best_k].person_id)) {
            best_s = s_k;
            best_k = k;
        }
    }
    res.predicted_id = templates[best_k].person_id;
    res.elapsed = std::chrono::steady_clock::now() - start;
    return res;
}

/// Mean of each person's training feature matrices, per spectrum, in input
/// order.
inline std::vector<PersonTemplate> make_templates(std::span<const PersonSamples> training) {
    std::vector<PersonTemplate> templates;
    templates.reserve(training.size());
    for (const PersonSamples& person : training) {
        if (person.samples.empty())
            throw std::invalid_argument("make_templates: person " + person.person_id +
                                        " has no samples");
        PersonTemplate tpl;
        tpl.person_id = person.person_id;
        for (Spectrum s : kAllSpectra) {
            std::vector<FeatureMatrix> mats;
            mats.reserve(person.samples.size());
            for (const MultispectralSample& sample : person.samples)
                mats.push_back(sample[s]);
            tpl[s] = mean_feature_matrix(mats);
        }
        templates.push_back(std::move(tpl));
    }
    return templates;
}

namespace detail {

/// Leave-one-out identification accuracy over the training set using only
/// feature row `row` (unweighted single-row minimum distance).
inline double single_row_loo_accuracy(std::span<const PersonSamples> training, int row) {
    const std::size_t np = training.size();
    const int cols = training.front().samples.front()[Spectrum::Red].cols;

    // Per person and spectrum, the column-wise sum of the row over samples.
    std::vector<std::array<std::vector<double>, 4>> row_sums(np);
    for (std::size_t p = 0; p < np; ++p) {
        for (Spectrum s : kAllSpectra) {
            auto& sum = row_sums[p][static_cast<int>(s)];
            sum.assign(cols, 0.0);
            for (const MultispectralSample& sample : training[p].samples)
                for (int c = 0; c < cols; ++c)
                    sum[c] += sample[s].at(row, c);
        }
    }

    std::size_t correct = 0, total = 0;
    for (std::size_t p = 0; p < np; ++p) {
        const auto m_p = static_cast<double>(training[p].samples.size());
        for (const MultispectralSample& held_out : training[p].samples) {
            std::size_t best_k = 0;
            double best_d = std::numeric_limits<double>::infinity();
            bool have_best = false;
            for (std::size_t k = 0; k < np; ++k) {
                const double m_k = static_cast<double>(training[k].samples.size());
                double d = 0.0;
                for (Spectrum s : kAllSpectra) {
                    const int si = static_cast<int>(s);
                    const auto& sum = row_sums[k][si];
                    for (int c = 0; c < cols; ++c) {
                        const double test_v = held_out[s].at(row, c);
                        const double tpl_v = (k == p) ? (sum[c] - test_v) / (m_p - 1.0)
                                                      : sum[c] / m_k;
                        const double diff = test_v - tpl_v;
                        d += diff * diff;
                    }
                }
                if (!have_best || d < best_d ||
                    (d == best_d &&
                     training[k].person_id < training[best_k].person_id)) {
                    best_d = d;
                    best_k = k;
                    have_best = true;
                }
            }
            if (training[best_k].person_id == training[p].person_id) ++correct;
            ++total;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace detail

/// Learns the classifier weights from training samples. alpha[m] is the
/// reciprocal of the mean absolute value of feature m over all training
/// samples, spectra and blocks (floored at 1e-12). Uniform mode sets every
/// w to 1; per-row-accuracy mode sets w[m] to the leave-one-out
/// identification accuracy within the training set using row m alone.
inline ClassifierWeights learn_weights(std::span<const PersonSamples> training,
                                       WeightMode mode) {
    if (training.empty())
        throw std::invalid_argument("learn_weights: no training data");
    for (const PersonSamples& person : training)
        if (person.samples.empty())
            throw std::invalid_argument("learn_weights: person " + person.person_id +
                                        " has no samples");

    ClassifierWeights wts;
    std::array<double, kFeatureCount> mean_abs{};
    std::uint64_t count = 0;
    for (const PersonSamples& person : training) {
        for (const MultispectralSample& sample : person.samples) {
            for (Spectrum s : kAllSpectra) {
                const FeatureMatrix& fm = sample[s];
                for (int r = 0; r < kFeatureCount; ++r)
                    for (int c = 0; c < fm.cols; ++c)
                        mean_abs[r] += std::abs(fm.at(r, c));
            }
            count += static_cast<std::uint64_t>(sample[Spectrum::Red].cols) * kAllSpectra.size();
        }
    }
    for (int r = 0; r < kFeatureCount; ++r)
        wts.alpha[r] = 1.0 / std::max(mean_abs[r] / static_cast<double>(count), 1e-12);

    if (mode == WeightMode::Uniform) {
        wts.w.fill(1.0);
        return wts;
    }

    if (training.size() < 2)
        throw std::invalid_argument("learn_weights: per-row accuracy needs at least 2 persons");
    for (const PersonSamples& person : training)
        if (person.samples.size() < 2)
            throw std::invalid_argument(
                "learn_weights: per-row accuracy needs at least 2 samples per person (person " +
                person.person_id + ")");

    for (int r = 0; r < kFeatureCount; ++r)
        wts.w[r] = detail::single_row_loo_accuracy(training, r);
    return wts;
}

}  // namespace palmtex
