/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: tools/faceselect.cpp
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
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fsel/faceselect.hpp"

namespace {

// Command-line values win over the config file, which wins over defaults.
struct ConfigOverlay {
    fsel::KeyValueConfig file;

    void apply(const CLI::Option* option, const char* key, std::string& value) const {
        if (option->count() == 0 && file.has(key))
            value = file.get(key);
    }
    void apply(const CLI::Option* option, const char* key, double& value) const {
        if (option->count() == 0 && file.has(key))
            value = file.get_double(key);
    }
    void apply(const CLI::Option* option, const char* key, std::uint64_t& value) const {
        if (option->count() == 0 && file.has(key))
            value = file.get_uint(key);
    }
    void apply(const CLI::Option* option, const char* key, bool& value) const {
        if (option->count() == 0 && file.has(key))
            value = file.get_bool(key);
    }
};

struct SvmFlagSet {
    fsel::SvmCliOptions options;
    CLI::Option* c = nullptr;
    CLI::Option* gamma = nullptr;
    CLI::Option* calibrate = nullptr;
    CLI::Option* tolerance = nullptr;
    CLI::Option* max_passes = nullptr;

    void add_to(CLI::App& app) {
        c = app.add_option("--c", options.c, "soft-margin cost C (default 1)");
        gamma = app.add_option("--gamma", options.gamma,
                               "RBF width: a positive number or \"scale\" (default scale)");
        calibrate = app.add_flag("--calibrate", options.calibrate,
                                 "fit per-pair sigmoids for posterior estimates");
        tolerance = app.add_option("--tolerance", options.tolerance,
                                   "solver KKT stopping threshold (default 1e-3)");
        max_passes = app.add_option("--max-passes", options.max_passes,
                                    "solver update cap in passes over the data (default 1000)");
    }

    void overlay(const ConfigOverlay& overlay) {
        overlay.apply(c, "c", options.c);
        overlay.apply(gamma, "gamma", options.gamma);
        overlay.apply(calibrate, "calibrate", options.calibrate);
        overlay.apply(tolerance, "tolerance", options.tolerance);
        overlay.apply(max_passes, "max_passes", options.max_passes);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"greedy selection of spatial facial-expression features"};
    app.require_subcommand(1);

    std::string config_path;

    // extract
    auto* extract = app.add_subcommand("extract", "write the full delta-feature matrix as CSV");
    fsel::ExtractOptions extract_options;
    extract->add_option("--config", config_path, "key=value config file");
    auto* ex_manifest = extract->add_option("--manifest", extract_options.manifest, "dataset manifest");
    auto* ex_out = extract->add_option("--out", extract_options.out, "output CSV path");

    // select
    auto* select = app.add_subcommand("select", "greedy forward selection of a feature subset");
    fsel::SelectOptions select_options;
    SvmFlagSet select_svm;
    select->add_option("--config", config_path, "key=value config file");
    auto* se_manifest = select->add_option("--manifest", select_options.manifest, "dataset manifest");
    auto* se_out = select->add_option("--out-dir", select_options.out_dir, "output directory");
    auto* se_seed = select->add_option("--seed", select_options.seed, "split shuffle seed (default 0)");
    auto* se_threads = select->add_option("--threads", select_options.threads,
                                          "worker threads; 0 = all cores (never affects results)");
    auto* se_ratio = select->add_option("--train-ratio", select_options.train_ratio,
                                        "training fraction per class (default 0.6)");
    auto* se_max = select->add_option("--max-features", select_options.max_features,
                                      "stop after this many features; 0 = no cap");
    auto* se_min = select->add_option("--min-improvement", select_options.min_improvement,
                                      "required accuracy gain to keep going (default 0)");
    auto* se_grid = select->add_flag("--grid-search", select_options.grid_search,
                                     "sweep c and gamma on the split before selecting");
    select_svm.add_to(*select);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "cross-validate a saved feature subset");
    fsel::EvaluateOptions evaluate_options;
    SvmFlagSet evaluate_svm;
    evaluate->add_option("--config", config_path, "key=value config file");
    auto* ev_manifest = evaluate->add_option("--manifest", evaluate_options.manifest, "dataset manifest");
    auto* ev_subset = evaluate->add_option("--subset", evaluate_options.subset, "subset file");
    auto* ev_out = evaluate->add_option("--out-dir", evaluate_options.out_dir, "output directory");
    auto* ev_folds = evaluate->add_option("--folds", evaluate_options.folds, "fold count (default 10)");
    auto* ev_seed = evaluate->add_option("--seed", evaluate_options.seed, "fold shuffle seed (default 0)");
    auto* ev_threads = evaluate->add_option("--threads", evaluate_options.threads,
                                            "worker threads; 0 = all cores (never affects results)");
    auto* ev_grid = evaluate->add_flag("--grid-search", evaluate_options.grid_search,
                                       "sweep c and gamma on a held-out split first");
    evaluate_svm.add_to(*evaluate);

    // report
    auto* report = app.add_subcommand("report", "describe a saved subset in human terms");
    fsel::ReportOptions report_options;
    report->add_option("--config", config_path, "key=value config file");
    auto* re_manifest = report->add_option("--manifest", report_options.manifest, "dataset manifest");
    auto* re_subset = report->add_option("--subset", report_options.subset, "subset file");
    auto* re_trace = report->add_option("--trace", report_options.trace, "trace.csv for the accuracy trajectory");
    auto* re_plot = report->add_option("--plot-data", report_options.plot_data,
                                       "write feature endpoints against the mean neutral face");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with planted features");
    fsel::SynthOptions synth_options;
    synth->add_option("--config", config_path, "key=value config file");
    auto* sy_out = synth->add_option("--out-dir", synth_options.out_dir, "output directory");
    auto* sy_landmarks = synth->add_option("--landmarks", synth_options.landmarks, "landmark count (default 20)");
    auto* sy_classes = synth->add_option("--classes", synth_options.classes, "class count, up to 7 (default 7)");
    auto* sy_per_class = synth->add_option("--per-class", synth_options.examples_per_class,
                                           "examples per class (default 40)");
    auto* sy_planted = synth->add_option("--planted", synth_options.planted,
                                         "number of planted informative features (default 7)");
    auto* sy_disp = synth->add_option("--displacement", synth_options.displacement,
                                      "planted displacement magnitude (default 6)");
    auto* sy_noise = synth->add_option("--noise-sigma", synth_options.noise_sigma,
                                       "apex coordinate noise (default 0.5)");
    auto* sy_seed = synth->add_option("--seed", synth_options.seed, "generator seed (default 0)");
    auto* sy_format = synth->add_option("--format", synth_options.format, "frame format: pts or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? fsel::kExitOk : fsel::kExitInputError;
    }

    try {
        ConfigOverlay overlay;
        if (!config_path.empty())
            overlay.file = fsel::KeyValueConfig::load(config_path);

        if (extract->parsed()) {
            overlay.apply(ex_manifest, "manifest", extract_options.manifest);
            overlay.apply(ex_out, "out", extract_options.out);
            if (extract_options.manifest.empty() || extract_options.out.empty())
                throw fsel::input_error("extract: --manifest and --out are required");
            fsel::run_extract(extract_options);
        } else if (select->parsed()) {
            overlay.apply(se_manifest, "manifest", select_options.manifest);
            overlay.apply(se_out, "out_dir", select_options.out_dir);
            overlay.apply(se_seed, "seed", select_options.seed);
            overlay.apply(se_threads, "threads", select_options.threads);
            overlay.apply(se_ratio, "train_ratio", select_options.train_ratio);
            overlay.apply(se_max, "max_features", select_options.max_features);
            overlay.apply(se_min, "min_improvement", select_options.min_improvement);
            overlay.apply(se_grid, "grid_search", select_options.grid_search);
            select_svm.overlay(overlay);
            select_options.svm = select_svm.options;
            if (select_options.manifest.empty() || select_options.out_dir.empty())
                throw fsel::input_error("select: --manifest and --out-dir are required");
            fsel::run_select(select_options);
        } else if (evaluate->parsed()) {
            overlay.apply(ev_manifest, "manifest", evaluate_options.manifest);
            overlay.apply(ev_subset, "subset", evaluate_options.subset);
            overlay.apply(ev_out, "out_dir", evaluate_options.out_dir);
            overlay.apply(ev_folds, "folds", evaluate_options.folds);
            overlay.apply(ev_seed, "seed", evaluate_options.seed);
            overlay.apply(ev_threads, "threads", evaluate_options.threads);
            overlay.apply(ev_grid, "grid_search", evaluate_options.grid_search);
            evaluate_svm.overlay(overlay);
            evaluate_options.svm = evaluate_svm.options;
            if (evaluate_options.manifest.empty() || evaluate_options.subset.empty() ||
                evaluate_options.out_dir.empty())
                throw fsel::input_error("evaluate: --manifest, --subset and --out-dir are required");
            fsel::run_evaluate(evaluate_options);
        } else if (report->parsed()) {
            overlay.apply(re_manifest, "manifest", report_options.manifest);
            overlay.apply(re_subset, "subset", report_options.subset);
            overlay.apply(re_trace, "trace", report_options.trace);
            overlay.apply(re_plot, "plot_data", report_options.plot_data);
            if (report_options.manifest.empty() || report_options.subset.empty())
                throw fsel::input_error("report: --manifest and --subset are required");
            fsel::run_report(report_options);
        } else if (synth->parsed()) {
            overlay.apply(sy_out, "out_dir", synth_options.out_dir);
            overlay.apply(sy_landmarks, "landmarks", synth_options.landmarks);
            overlay.apply(sy_classes, "classes", synth_options.classes);
            overlay.apply(sy_per_class, "examples_per_class", synth_options.examples_per_class);
            overlay.apply(sy_planted, "planted", synth_options.planted);
            overlay.apply(sy_disp, "displacement", synth_options.displacement);
            overlay.apply(sy_noise, "noise_sigma", synth_options.noise_sigma);
            overlay.apply(sy_seed, "seed", synth_options.seed);
            overlay.apply(sy_format, "format", synth_options.format);
            if (synth_options.out_dir.empty())
                throw fsel::input_error("synth: --out-dir is required");
            fsel::run_synth(synth_options);
        }
        return fsel::kExitOk;
    } catch (const fsel::input_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return fsel::kExitInputError;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return fsel::kExitInternalError;
    }
}
