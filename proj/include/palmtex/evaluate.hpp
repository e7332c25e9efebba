#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "palmtex/classify.hpp"
#include "palmtex/dataset.hpp"
#include "palmtex/pipeline.hpp"

namespace palmtex {

enum class Classifier { Mdc, Wmv };

inline constexpr const char* to_string(Classifier c) {
    return c == Classifier::Mdc ? "mdc" : "wmv";
}

inline Classifier parse_classifier(std::string_view name) {
    if (name == "mdc") return Classifier::Mdc;
    if (name == "wmv") return Classifier::Wmv;
    throw std::invalid_argument("unknown classifier: " + std::string(name));
}

/// Groups per-sample feature matrices by person, preserving person order of
/// first appearance. All persons must end up with the same sample count.
inline std::vector<PersonSamples> group_by_person(const std::vector<MultispectralSample>& samples) {
    std::vector<PersonSamples> persons;
    for (const MultispectralSample& s : samples) {
        PersonSamples* slot = nullptr;
        for (PersonSamples& p : persons)
            if (p.person_id == s.person_id) slot = &p;
        if (!slot) {
            persons.push_back(PersonSamples{s.person_id, {}});
            slot = &persons.back();
        }
        slot->samples.push_back(s);
    }
    if (persons.empty())
        throw std::invalid_argument("group_by_person: no samples");
    for (const PersonSamples& p : persons)
        if (p.samples.size() != persons.front().samples.size())
            throw std::invalid_argument("group_by_person: person " + p.person_id +
                                        " has a different sample count");
    return persons;
}

namespace detail {

inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(count) - 1);
    for (int t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
}

}  // namespace detail

struct FoldOutcome {
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    double seconds = 0;  // summed per-query identification time
};

/// Trains on fold.train of every person and identifies every fold.test
/// sample.
inline FoldOutcome run_fold(const std::vector<PersonSamples>& persons, const Fold& fold,
                            Classifier classifier, WeightMode mode, int threads = 1) {
    std::vector<PersonSamples> training;
    training.reserve(persons.size());
    for (const PersonSamples& p : persons) {
        PersonSamples t;
        t.person_id = p.person_id;
        for (int idx : fold.train) t.samples.push_back(p.samples.at(static_cast<std::size_t>(idx)));
        training.push_back(std::move(t));
    }
    const std::vector<PersonTemplate> templates = make_templates(training);
    const ClassifierWeights weights = learn_weights(training, mode);

    struct Query {
        const MultispectralSample* sample;
        const std::string* truth;
    };
    std::vector<Query> queries;
    for (const PersonSamples& p : persons)
        for (int idx : fold.test)
            queries.push_back({&p.samples.at(static_cast<std::size_t>(idx)), &p.person_id});

    std::vector<std::uint8_t> hits(queries.size(), 0);
    std::vector<double> times(queries.size(), 0.0);
    detail::parallel_for(queries.size(), threads, [&](std::size_t i) {
        const IdentificationResult r =
            classifier == Classifier::Mdc
                ? mdc_identify(*queries[i].sample, templates, weights)
                : wmv_identify(*queries[i].sample, templates, weights);
        hits[i] = r.predicted_id == *queries[i].truth ? 1 : 0;
        times[i] = std::chrono::duration<double>(r.elapsed).count();
    });

    FoldOutcome out;
    out.total = queries.size();
    for (std::size_t i = 0; i < queries.size(); ++i) {
        out.correct += hits[i];
        out.seconds += times[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid evaluation
// ---------------------------------------------------------------------------

struct EvalOptions {
    int train_min = 4;
    int train_max = 10;
    /// Forces one scheme for every cell; unset picks per classifier
    /// (adjacent windows for MDC, random repeats for WMV).
    std::optional<SplitScheme> scheme;
    int repeats = 10;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct EvalCell {
    int train_count = 0;
    Classifier classifier = Classifier::Mdc;
    WeightMode mode = WeightMode::Uniform;
    SplitScheme scheme = SplitScheme::CircularAdjacent;
    int folds = 0;
    std::uint64_t tests = 0;
    std::uint64_t correct = 0;
    double accuracy = 0;
    double seconds_per_test = 0;
};

struct EvalReport {
    ExtractionConfig config;
    int num_persons = 0;
    int samples_per_person = 0;
    EvalOptions options;
    std::vector<EvalCell> cells;
};

/// Sweeps train_count x {MDC, WMV} x {uniform, per-row-accuracy weights},
/// averaging accuracy over the folds of the chosen split scheme.
inline EvalReport evaluate_grid(const std::vector<PersonSamples>& persons,
                                const ExtractionConfig& config, const EvalOptions& opt = {}) {
    const int num_samples = static_cast<int>(persons.front().samples.size());
    if (opt.train_min < 1 || opt.train_max >= num_samples || opt.train_min > opt.train_max)
        throw std::invalid_argument("evaluate_grid: train count range must fit in [1, " +
                                    std::to_string(num_samples - 1) + "]");

    EvalReport report;
    report.config = config;
    report.num_persons = static_cast<int>(persons.size());
    report.samples_per_person = num_samples;
    report.options = opt;

    for (int m = opt.train_min; m <= opt.train_max; ++m) {
        for (Classifier cls : {Classifier::Mdc, Classifier::Wmv}) {
            const SplitScheme scheme = opt.scheme.value_or(
                cls == Classifier::Mdc ? SplitScheme::CircularAdjacent
                                       : SplitScheme::RandomRepeats);
            SplitSpec spec;
            spec.train_count = m;
            spec.scheme = scheme;
            spec.repeats = opt.repeats;
            spec.seed = opt.seed;
            const std::vector<Fold> folds = splits(num_samples, spec);

            for (WeightMode mode : {WeightMode::Uniform, WeightMode::PerRowAccuracy}) {
                EvalCell cell;
                cell.train_count = m;
                cell.classifier = cls;
                cell.mode = mode;
                cell.scheme = scheme;
                cell.folds = static_cast<int>(folds.size());
                double seconds = 0;
                for (const Fold& fold : folds) {
                    const FoldOutcome outcome = run_fold(persons, fold, cls, mode, opt.threads);
                    cell.tests += outcome.total;
                    cell.correct += outcome.correct;
                    seconds += outcome.seconds;
                }
                cell.accuracy = cell.tests ? static_cast<double>(cell.correct) / cell.tests : 0.0;
                cell.seconds_per_test = cell.tests ? seconds / cell.tests : 0.0;
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline const EvalCell* find_cell(const EvalReport& r, int train_count, Classifier cls,
                                 WeightMode mode) {
    for (const EvalCell& c : r.cells)
        if (c.train_count == train_count && c.classifier == cls && c.mode == mode) return &c;
    return nullptr;
}

/// Accuracy grid, one row per training count and one column per
/// classifier/weighting pair.
inline std::string report_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "# palmtex-report 1\n";
    out << "train_count,mdc_uniform,mdc_weighted,wmv_uniform,wmv_weighted\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (int m = r.options.train_min; m <= r.options.train_max; ++m) {
        out << m;
        for (Classifier cls : {Classifier::Mdc, Classifier::Wmv}) {
            for (WeightMode mode : {WeightMode::Uniform, WeightMode::PerRowAccuracy}) {
                const EvalCell* c = find_cell(r, m, cls, mode);
                out << ",";
                if (c) out << c->accuracy;
            }
        }
        out << "\n";
    }
    return out.str();
}

/// Long-format accuracy table, convenient for plotting tools.
inline std::string report_plot_data(const EvalReport& r) {
    std::ostringstream out;
    out << "classifier,weights,scheme,train_count,accuracy,seconds_per_test\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const EvalCell& c : r.cells)
        out << to_string(c.classifier) << "," << to_string(c.mode) << "," << to_string(c.scheme)
            << "," << c.train_count << "," << c.accuracy << "," << c.seconds_per_test << "\n";
    return out.str();
}

inline nlohmann::json report_json(const EvalReport& r) {
    nlohmann::json j;
    j["format"] = "palmtex-report";
    j["version"] = 1;
    j["extraction"] = {{"block_size", r.config.block_size},
                       {"quant_step", r.config.quant_step},
                       {"offset", {r.config.offset.dx, r.config.offset.dy}}};
    j["dataset"] = {{"persons", r.num_persons}, {"samples_per_person", r.samples_per_person}};
    j["cells"] = nlohmann::json::array();
    for (const EvalCell& c : r.cells) {
        j["cells"].push_back({{"train_count", c.train_count},
                              {"classifier", to_string(c.classifier)},
                              {"weights", to_string(c.mode)},
                              {"scheme", to_string(c.scheme)},
                              {"folds", c.folds},
                              {"tests", c.tests},
                              {"correct", c.correct},
                              {"accuracy", c.accuracy},
                              {"seconds_per_test", c.seconds_per_test}});
    }
    return j;
}

}  // namespace palmtex
