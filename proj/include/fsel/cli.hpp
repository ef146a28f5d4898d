/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/cli.hpp
 *
 * Copyright 2026 The faceselect authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fsel/config.hpp"
#include "fsel/error.hpp"
#include "fsel/evaluation.hpp"
#include "fsel/features.hpp"
#include "fsel/io.hpp"
#include "fsel/landmarks.hpp"
#include "fsel/selection.hpp"
#include "fsel/svm.hpp"
#include "fsel/synth.hpp"

namespace fsel {

// Exit codes used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;    // bad arguments, files, or formats
inline constexpr int kExitInternalError = 3; // anything else

/// Classifier flags shared by select and evaluate. gamma is either a
/// positive number or the literal "scale".
struct SvmCliOptions {
    double c = 1.0;
    std::string gamma = "scale";
    bool calibrate = false;
    double tolerance = 1e-3;
    std::uint64_t max_passes = 1000;

    SvmConfig to_config() const {
        if (!(c > 0.0))
            throw input_error("--c must be positive");
        SvmConfig config;
        config.cost = c;
        if (gamma != "scale") {
            const auto value = parse_double(gamma);
            if (!value || !(*value > 0.0))
                throw input_error("--gamma must be a positive number or \"scale\"");
            config.gamma = *value;
        }
        config.calibrate = calibrate;
        config.tolerance = tolerance;
        config.max_passes = static_cast<std::size_t>(max_passes);
        return config;
    }
};

namespace detail {

inline std::string class_count_summary(const Dataset& dataset) {
    std::string out;
    for (std::size_t k = 0; k < kClassCount; ++k) {
        if (dataset.class_counts[k] == 0)
            continue;
        if (!out.empty())
            out += ", ";
        out += std::to_string(dataset.class_counts[k]) + " " + std::string(kLabelNames[k]);
    }
    return out;
}

inline void fill_svm_keys(KeyValueConfig& kv, const SvmCliOptions& svm) {
    kv.set_double("c", svm.c);
    kv.set("gamma", svm.gamma);
    kv.set_bool("calibrate", svm.calibrate);
    kv.set_double("tolerance", svm.tolerance);
    kv.set_uint("max_passes", svm.max_passes);
}

inline std::vector<std::string> class_names_for(const ConfusionMatrix& matrix) {
    std::vector<std::string> names;
    for (const int code : matrix.classes)
        names.push_back(std::string(label_name(static_cast<ExpressionLabel>(code))));
    return names;
}

} // namespace detail

// --- extract ---------------------------------------------------------------

struct ExtractOptions {
    std::string manifest;
    std::string out;
};

/// Loads a manifest and writes the full delta-feature matrix as CSV.
inline void run_extract(const ExtractOptions& options, std::ostream& log = std::cout) {
    const Dataset dataset = load_manifest(options.manifest);
    const FeatureMatrix matrix = extract_features(dataset);
    atomic_write_file(options.out, feature_csv(matrix));

    KeyValueConfig kv;
    kv.set("command", "extract");
    kv.set("manifest", options.manifest);
    kv.set("out", options.out);
    kv.save(options.out + ".config");

    log << "examples: " << matrix.size() << " (" << detail::class_count_summary(dataset) << ")\n";
    log << "features per example: " << matrix.dimension() << "\n";
    log << "wrote " << options.out << "\n";
}

// --- select ------------------------------------------------------------------

struct SelectOptions {
    std::string manifest;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t threads = 0;
    double train_ratio = 0.6;
    std::uint64_t max_features = 0;
    double min_improvement = 0.0;
    bool grid_search = false; // sweep cost/gamma on the split before selecting
    SvmCliOptions svm;
};

/// Runs the greedy forward selection and writes subset.txt, trace.csv,
/// trace.txt and select.config into the output directory.
inline void run_select(const SelectOptions& options, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const Dataset dataset = load_manifest(options.manifest);
    const FeatureMatrix matrix = extract_features(dataset);

    SelectionConfig config;
    config.train_ratio = options.train_ratio;
    config.seed = options.seed;
    config.svm = options.svm.to_config();
    config.max_features = static_cast<std::size_t>(options.max_features);
    config.min_improvement = options.min_improvement;
    config.threads = static_cast<std::size_t>(options.threads);

    log << "examples: " << matrix.size() << " (" << detail::class_count_summary(dataset) << ")\n";
    log << "candidate features: " << matrix.dimension() << "\n";
    if (options.grid_search) {
        const Split split = stratified_split(matrix.labels, config.train_ratio, config.seed);
        const GridSearchResult grid = grid_search_svm(matrix, {}, split, config.svm);
        config.svm.cost = grid.cost;
        config.svm.gamma = grid.gamma;
        log << "grid search: c=" << format_double(grid.cost)
            << " gamma=" << format_double(grid.gamma)
            << " (full-set split accuracy " << format_double(grid.accuracy) << ")\n";
    }
    const SelectionTrace trace = sfs(matrix, config);

    fs::create_directories(options.out_dir);
    const fs::path dir(options.out_dir);
    save_subset(dir / "subset.txt", matrix.landmark_count, trace.final_subset);
    atomic_write_file(dir / "trace.csv", trace_to_csv(trace));
    atomic_write_file(dir / "trace.txt", render_trace(trace));

    KeyValueConfig kv;
    kv.set("command", "select");
    kv.set("manifest", options.manifest);
    kv.set("out_dir", options.out_dir);
    kv.set_uint("seed", options.seed);
    kv.set_uint("threads", options.threads);
    kv.set_double("train_ratio", options.train_ratio);
    kv.set_uint("max_features", options.max_features);
    kv.set_double("min_improvement", options.min_improvement);
    kv.set_bool("grid_search", options.grid_search);
    detail::fill_svm_keys(kv, options.svm);
    kv.save(dir / "select.config");

    log << render_trace(trace);
    log << "selected " << trace.final_subset.size() << " feature(s)";
    if (!trace.steps.empty())
        log << ", split accuracy " << format_double(trace.steps.back().accuracy);
    log << "\n";
    log << "wrote " << (dir / "subset.txt").string() << "\n";
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateOptions {
    std::string manifest;
    std::string subset;
    std::string out_dir;
    std::uint64_t folds = 10;
    std::uint64_t seed = 0;
    std::uint64_t threads = 0;
    bool grid_search = false; // sweep cost/gamma on a 0.6/0.4 split first
    SvmCliOptions svm;
};

/// Cross-validates a saved subset and writes confusion.txt,
/// confusion_counts.csv, summary.txt and evaluate.config.
inline void run_evaluate(const EvaluateOptions& options, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const SubsetFile subset = load_subset(options.subset);
    const Dataset dataset = load_manifest(options.manifest);
    if (subset.landmark_count != dataset.landmark_count)
        throw input_error("subset is for " + std::to_string(subset.landmark_count) +
                          " landmarks but the manifest has " +
                          std::to_string(dataset.landmark_count));
    const FeatureMatrix matrix = extract_features(dataset);

    EvalConfig config;
    config.folds = static_cast<std::size_t>(options.folds);
    config.seed = options.seed;
    config.svm = options.svm.to_config();
    config.threads = static_cast<std::size_t>(options.threads);
    if (options.grid_search) {
        std::vector<std::size_t> flats;
        for (const FeatureIndex& f : subset.features)
            flats.push_back(flat_index(f, matrix.landmark_count));
        const Split split = stratified_split(matrix.labels, 0.6, config.seed);
        const GridSearchResult grid = grid_search_svm(matrix, flats, split, config.svm);
        config.svm.cost = grid.cost;
        config.svm.gamma = grid.gamma;
        log << "grid search: c=" << format_double(grid.cost)
            << " gamma=" << format_double(grid.gamma) << " (split accuracy "
            << format_double(grid.accuracy) << ")\n";
    }

    const CvResult result = cross_validate(matrix, subset.features, config);
    const std::vector<std::string> names = detail::class_names_for(result.matrix);

    fs::create_directories(options.out_dir);
    const fs::path dir(options.out_dir);
    atomic_write_file(dir / "confusion.txt", render_confusion(result.matrix, names));
    atomic_write_file(dir / "confusion_counts.csv", counts_csv(result.matrix, names));
    atomic_write_file(dir / "summary.txt", summary_line(result) + "\n");

    KeyValueConfig kv;
    kv.set("command", "evaluate");
    kv.set("manifest", options.manifest);
    kv.set("subset", options.subset);
    kv.set("out_dir", options.out_dir);
    kv.set_uint("folds", options.folds);
    kv.set_uint("seed", options.seed);
    kv.set_uint("threads", options.threads);
    kv.set_bool("grid_search", options.grid_search);
    detail::fill_svm_keys(kv, options.svm);
    kv.save(dir / "evaluate.config");

    log << render_confusion(result.matrix, names);
    log << summary_line(result) << "\n";
}

// --- report -------------------------------------------------------------------

struct ReportOptions {
    std::string manifest;
    std::string subset;
    std::string trace;     // optional trace.csv for the accuracy trajectory
    std::string plot_data; // optional output file for external plotting
};

/// Prints the selected features in human terms plus, when a trace is given,
/// the accuracy trajectory. With --plot-data, also writes a CSV of feature
/// endpoints against the dataset's mean neutral face for external plotting.
inline void run_report(const ReportOptions& options, std::ostream& log = std::cout) {
    const SubsetFile subset = load_subset(options.subset);
    const Dataset dataset = load_manifest(options.manifest);
    if (subset.landmark_count != dataset.landmark_count)
        throw input_error("subset is for " + std::to_string(subset.landmark_count) +
                          " landmarks but the manifest has " +
                          std::to_string(dataset.landmark_count));

    for (std::size_t k = 0; k < subset.features.size(); ++k)
        log << "feature " << k + 1 << ": " << describe_feature(subset.features[k]) << "\n";

    if (!options.trace.empty()) {
        const SelectionTrace trace = parse_trace_csv(read_file(options.trace));
        log << "accuracy trajectory:";
        for (const SelectionStep& step : trace.steps)
            log << " " << format_double(step.accuracy);
        log << "\n";
    }

    if (!options.plot_data.empty()) {
        // mean neutral landmark positions over the dataset
        std::vector<Point> mean(dataset.landmark_count, Point{0.0, 0.0});
        for (const SequenceExample& example : dataset.examples)
            for (std::size_t k = 0; k < dataset.landmark_count; ++k) {
                mean[k].x += example.neutral.points[k].x;
                mean[k].y += example.neutral.points[k].y;
            }
        for (Point& p : mean) {
            p.x /= static_cast<double>(dataset.examples.size());
            p.y /= static_cast<double>(dataset.examples.size());
        }
        std::string csv = "i,j,axis,x_i,y_i,x_j,y_j\n";
        for (const FeatureIndex& f : subset.features) {
            csv += std::to_string(f.i) + ',' + std::to_string(f.j) + ',' + axis_code(f.axis) +
                   ',' + format_double(mean[f.i].x) + ',' + format_double(mean[f.i].y) + ',' +
                   format_double(mean[f.j].x) + ',' + format_double(mean[f.j].y) + '\n';
        }
        atomic_write_file(options.plot_data, csv);

        KeyValueConfig kv;
        kv.set("command", "report");
        kv.set("manifest", options.manifest);
        kv.set("subset", options.subset);
        kv.set("trace", options.trace);
        kv.set("plot_data", options.plot_data);
        kv.save(options.plot_data + ".config");
        log << "wrote " << options.plot_data << "\n";
    }
}

// --- synth --------------------------------------------------------------------

struct SynthOptions {
    std::string out_dir;
    std::uint64_t landmarks = 20;
    std::uint64_t classes = 7;
    std::uint64_t examples_per_class = 40;
    std::uint64_t planted = 7;
    double displacement = 6.0;
    double noise_sigma = 0.5;
    std::uint64_t seed = 0;
    std::string format = "pts";
};

/// Generates a synthetic dataset on disk: frame files, a manifest that
/// round-trips through the normal ingestion path, and planted.txt with the
/// ground-truth features in subset-file format.
inline void run_synth(const SynthOptions& options, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    SynthSpec spec;
    spec.landmark_count = static_cast<std::size_t>(options.landmarks);
    spec.class_count = static_cast<std::size_t>(options.classes);
    spec.examples_per_class = static_cast<std::size_t>(options.examples_per_class);
    spec.noise_sigma = options.noise_sigma;
    spec.seed = options.seed;
    try {
        spec.planted = default_planted(spec.landmark_count, spec.class_count,
                                       static_cast<std::size_t>(options.planted),
                                       options.displacement);
        validate(spec);
    } catch (const std::invalid_argument& err) {
        throw input_error(err.what());
    }

    const std::vector<SequenceExample> examples = generate(spec);
    fs::create_directories(options.out_dir);
    const fs::path dir(options.out_dir);
    const fs::path manifest_path =
        write_synth_dataset(examples, spec.landmark_count, dir, options.format);

    std::vector<FeatureIndex> planted_features;
    for (const PlantedFeature& planted : spec.planted)
        planted_features.push_back(planted.feature);
    save_subset(dir / "planted.txt", spec.landmark_count, planted_features);

    KeyValueConfig kv;
    kv.set("command", "synth");
    kv.set("out_dir", options.out_dir);
    kv.set_uint("landmarks", options.landmarks);
    kv.set_uint("classes", options.classes);
    kv.set_uint("examples_per_class", options.examples_per_class);
    kv.set_uint("planted", options.planted);
    kv.set_double("displacement", options.displacement);
    kv.set_double("noise_sigma", options.noise_sigma);
    kv.set_uint("seed", options.seed);
    kv.set("format", options.format);
    kv.save(dir / "synth.config");

    log << "wrote " << examples.size() << " examples to " << manifest_path.string() << "\n";
    log << "ground-truth features in " << (dir / "planted.txt").string() << "\n";
}

} // namespace fsel
