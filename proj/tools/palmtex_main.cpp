#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <palmtex/palmtex.hpp>

namespace {

using namespace palmtex;

Offset parse_offset(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--offset", "expected DX,DY (for example 1,0)");
    try {
        Offset off{std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
        if (off.dx == 0 && off.dy == 0)
            throw CLI::ValidationError("--offset", "offset must be nonzero");
        return off;
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError("--offset", "expected DX,DY (for example 1,0)");
    } catch (const std::out_of_range&) {
        throw CLI::ValidationError("--offset", "offset out of range");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write: " + path.string());
    out << text;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    std::string format = "png";
    SynthConfig cfg;
};

void run_synth(const SynthArgs& a) {
    const std::vector<RawSample> samples = synthesize(a.cfg);
    write_dataset(samples, a.out, a.format);
    std::cout << "wrote " << samples.size() << " samples (" << a.cfg.num_persons
              << " persons x " << a.cfg.samples_per_person << " x 4 spectra) to " << a.out
              << "\n";
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::string dataset;
    std::string out;
    std::string offset = "1,0";
    int image_size = 128;
    bool no_size_check = false;
    int threads = 1;
    ExtractionConfig cfg;
};

void run_extract(ExtractArgs& a) {
    a.cfg.offset = parse_offset(a.offset);
    LoadOptions lo;
    lo.expected_width = a.image_size;
    lo.expected_height = a.image_size;
    lo.check_size = !a.no_size_check;

    const DatasetManifest mf = open_dataset(a.dataset);
    const std::vector<RawSample> raw = load(mf, lo);

    FeatureArchive ar;
    ar.config = a.cfg;
    ar.samples.resize(raw.size());
    detail::parallel_for(raw.size(), a.threads, [&](std::size_t i) {
        MultispectralSample& s = ar.samples[i];
        s.person_id = raw[i].person_id;
        s.sample_index = raw[i].sample_index;
        for (Spectrum sp : kAllSpectra)
            s.spectra[static_cast<int>(sp)] = extract_feature_matrix(raw[i][sp], a.cfg);
    });
    write_features(ar, a.out);
    std::cout << "extracted " << ar.samples.size() << " samples ("
              << ar.samples.front().spectra[0].cols << " blocks per image) to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string features;
    std::string out;
    std::string weights = "uniform";
    int train_count = 0;  // 0: use every sample
};

WeightMode parse_weight_mode(const std::string& name) {
    if (name == "uniform") return WeightMode::Uniform;
    if (name == "per_row_accuracy") return WeightMode::PerRowAccuracy;
    throw CLI::ValidationError("--weights", "expected uniform or per_row_accuracy");
}

void run_train(const TrainArgs& a) {
    const FeatureArchive ar = read_features(a.features);
    std::vector<PersonSamples> persons = group_by_person(ar.samples);
    if (a.train_count > 0) {
        for (PersonSamples& p : persons) {
            if (static_cast<std::size_t>(a.train_count) > p.samples.size())
                throw std::invalid_argument("person " + p.person_id + " has only " +
                                            std::to_string(p.samples.size()) + " samples");
            p.samples.resize(static_cast<std::size_t>(a.train_count));
        }
    }
    const WeightMode mode = parse_weight_mode(a.weights);

    TemplateArchive out;
    out.config = ar.config;
    out.mode = mode;
    out.weights = learn_weights(persons, mode);
    out.templates = make_templates(persons);
    write_templates(out, a.out);
    std::cout << "trained " << out.templates.size() << " templates ("
              << persons.front().samples.size() << " samples each, " << to_string(mode)
              << " weights) to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// identify
// ---------------------------------------------------------------------------

struct IdentifyArgs {
    std::string templates;
    std::string classifier = "wmv";
    std::array<std::string, 4> images;  // indexed by Spectrum
    int top = 5;
};

void run_identify(const IdentifyArgs& a) {
    for (Spectrum s : kAllSpectra)
        if (a.images[static_cast<int>(s)].empty())
            throw std::invalid_argument(std::string("missing --") + to_string(s) +
                                        " image (all four spectra are required)");

    const TemplateArchive ar = read_templates(a.templates);
    const Classifier cls = parse_classifier(a.classifier);

    MultispectralSample query;
    query.person_id = "?";
    for (Spectrum s : kAllSpectra) {
        const GrayImage img = read_image(a.images[static_cast<int>(s)]);
        query.spectra[static_cast<int>(s)] = extract_feature_matrix(img, ar.config);
    }

    const IdentificationResult res = cls == Classifier::Mdc
                                         ? mdc_identify(query, ar.templates, ar.weights)
                                         : wmv_identify(query, ar.templates, ar.weights);

    std::vector<std::pair<std::string, double>> ranked = res.scores;
    const bool ascending = cls == Classifier::Mdc;  // distance: lower is better
    std::sort(ranked.begin(), ranked.end(), [&](const auto& l, const auto& r) {
        if (l.second != r.second) return ascending ? l.second < r.second : l.second > r.second;
        return l.first < r.first;
    });

    std::cout << "predicted: " << res.predicted_id << "\n";
    const int n = std::min<int>(a.top, static_cast<int>(ranked.size()));
    for (int i = 0; i < n; ++i)
        std::cout << "  " << (i + 1) << ". " << ranked[i].first << "  "
                  << (ascending ? "distance " : "score ") << ranked[i].second << "\n";
    std::cout << "elapsed: " << res.elapsed.count() * 1e3 << " ms\n";
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string features;
    std::string scheme = "auto";
    std::string out;
    std::string csv;
    std::string plot_data;
    int train_count = 0;  // 0: sweep train_min..train_max
    EvalOptions opt;
};

void run_evaluate(EvaluateArgs& a) {
    if (a.scheme == "random")
        a.opt.scheme = SplitScheme::RandomRepeats;
    else if (a.scheme == "adjacent")
        a.opt.scheme = SplitScheme::CircularAdjacent;
    else if (a.scheme != "auto")
        throw CLI::ValidationError("--scheme", "expected auto, random or adjacent");
    if (a.train_count > 0) {
        a.opt.train_min = a.train_count;
        a.opt.train_max = a.train_count;
    }

    const FeatureArchive ar = read_features(a.features);
    const std::vector<PersonSamples> persons = group_by_person(ar.samples);
    const EvalReport report = evaluate_grid(persons, ar.config, a.opt);

    std::cout << report_csv(report);
    if (!a.out.empty()) write_text(a.out, report_json(report).dump(2) + "\n");
    if (!a.csv.empty()) write_text(a.csv, report_csv(report));
    if (!a.plot_data.empty()) write_text(a.plot_data, report_plot_data(report));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"texture feature palmprint identification"};
    app.set_version_flag("--version", palmtex::kVersion);
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic multispectral dataset");
    synth->add_option("--out", synth_args.out, "output dataset directory")->required();
    synth->add_option("--persons", synth_args.cfg.num_persons, "number of persons");
    synth->add_option("--samples", synth_args.cfg.samples_per_person, "samples per person");
    synth->add_option("--size", synth_args.cfg.image_size, "image width and height");
    synth->add_option("--seed", synth_args.cfg.seed, "generator seed");
    synth->add_option("--format", synth_args.format, "image format: png or pgm")
        ->check(CLI::IsMember({"png", "pgm"}));
    synth->add_option("--noise", synth_args.cfg.noise_sigma, "pixel noise sigma");
    synth->add_option("--amplitude", synth_args.cfg.amplitude, "grating amplitude");
    synth->callback([&] { run_synth(synth_args); });

    ExtractArgs extract_args;
    CLI::App* extract =
        app.add_subcommand("extract", "compute block texture features for a dataset");
    extract->add_option("--dataset", extract_args.dataset, "dataset directory or manifest")
        ->required();
    extract->add_option("--out", extract_args.out, "output feature archive")->required();
    extract->add_option("--block-size", extract_args.cfg.block_size, "square block side");
    extract->add_option("--quant-step", extract_args.cfg.quant_step, "gray level bin width");
    extract->add_option("--offset", extract_args.offset, "co-occurrence offset DX,DY");
    extract->add_option("--image-size", extract_args.image_size, "expected image side");
    extract->add_flag("--no-size-check", extract_args.no_size_check,
                      "accept any image dimensions");
    extract->add_option("--threads", extract_args.threads, "worker threads");
    extract->callback([&] { run_extract(extract_args); });

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "build person templates from features");
    train->add_option("--features", train_args.features, "feature archive")->required();
    train->add_option("--out", train_args.out, "output template archive")->required();
    train->add_option("--weights", train_args.weights,
                      "weight mode: uniform or per_row_accuracy");
    train->add_option("--train-count", train_args.train_count,
                      "use only the first N samples per person");
    train->callback([&] { run_train(train_args); });

    IdentifyArgs identify_args;
    CLI::App* identify = app.add_subcommand("identify", "match one palm capture to templates");
    identify->add_option("--templates", identify_args.templates, "template archive")->required();
    identify->add_option("--classifier", identify_args.classifier, "mdc or wmv")
        ->check(CLI::IsMember({"mdc", "wmv"}));
    identify->add_option("--red", identify_args.images[0], "red channel image");
    identify->add_option("--green", identify_args.images[1], "green channel image");
    identify->add_option("--blue", identify_args.images[2], "blue channel image");
    identify->add_option("--nir", identify_args.images[3], "near infrared image");
    identify->add_option("--top", identify_args.top, "ranked matches to print");
    identify->callback([&] { run_identify(identify_args); });

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "accuracy sweep over training counts");
    evaluate->add_option("--features", eval_args.features, "feature archive")->required();
    evaluate->add_option("--train-min", eval_args.opt.train_min, "smallest training count");
    evaluate->add_option("--train-max", eval_args.opt.train_max, "largest training count");
    evaluate->add_option("--train-count", eval_args.train_count,
                         "evaluate a single training count");
    evaluate->add_option("--scheme", eval_args.scheme,
                         "split scheme: auto, random or adjacent");
    evaluate->add_option("--repeats", eval_args.opt.repeats, "random scheme fold count");
    evaluate->add_option("--seed", eval_args.opt.seed, "random scheme seed");
    evaluate->add_option("--threads", eval_args.opt.threads, "worker threads");
    evaluate->add_option("--out", eval_args.out, "write JSON report here");
    evaluate->add_option("--csv", eval_args.csv, "write CSV accuracy grid here");
    evaluate->add_option("--plot-data", eval_args.plot_data, "write long format CSV here");
    evaluate->callback([&] { run_evaluate(eval_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
