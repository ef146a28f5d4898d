/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/selection.hpp
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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/features.hpp"
#include "fsel/io.hpp"
#include "fsel/parallel.hpp"
#include "fsel/rng.hpp"
#include "fsel/svm.hpp"
#include "fsel/text.hpp"

namespace fsel {

struct SelectionConfig {
    double train_ratio = 0.6;     // fraction of each class assigned to the training side
    std::uint64_t seed = 0;       // split shuffle seed, recorded in the trace
    SvmConfig svm;                // wrapper classifier settings
    std::size_t max_features = 0; // 0 = no cap
    double min_improvement = 0.0; // a candidate must beat the current accuracy by more than this
    std::size_t threads = 0;      // 0 = all hardware threads; never affects results
};

inline void validate(const SelectionConfig& config) {
    if (!(config.train_ratio > 0.0 && config.train_ratio < 1.0))
        throw std::invalid_argument("selection: train_ratio must be in (0, 1)");
    if (config.min_improvement < 0.0)
        throw std::invalid_argument("selection: min_improvement must be nonnegative");
    validate(config.svm);
}

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Splits example indices into train/test sides class by class, preserving
/// the class frequencies of the input. Per class of n examples the train
/// side gets round(train_ratio * n), clamped to [1, n-1]; membership is a
/// seeded uniform shuffle within the class. Both index lists come back
/// sorted so downstream training order matches dataset order.
inline Split stratified_split(std::span<const int> labels, double train_ratio,
                              std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw std::invalid_argument("stratified_split: train_ratio must be in (0, 1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t k = 0; k < labels.size(); ++k)
        by_class[labels[k]].push_back(k);
    for (const auto& [code, members] : by_class)
        if (members.size() < 2)
            throw input_error("stratified_split: class " + std::to_string(code) + " has " +
                              std::to_string(members.size()) + " example(s); need at least 2");

    Rng rng(seed);
    Split split;
    for (auto& [code, members] : by_class) {
        det_shuffle(members, rng);
        const auto n = static_cast<double>(members.size());
        const long rounded = std::lround(train_ratio * n);
        const std::size_t take = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1L, rounded)),
                                                         1, members.size() - 1);
        split.train.insert(split.train.end(), members.begin(), members.begin() + take);
        split.test.insert(split.test.end(), members.begin() + take, members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

/// Wrapper score of one candidate subset: train the multiclass SVM on the
/// projected and per-example L2-normalized training rows, then return the
/// fraction of test rows classified correctly. Normalization happens after
/// projection, never before.
inline double score_subset(const FeatureMatrix& features, std::span<const std::size_t> subset,
                           const Split& split, const SvmConfig& svm_config) {
    if (subset.empty())
        throw std::invalid_argument("score_subset: empty subset");
    if (split.train.empty() || split.test.empty())
        throw std::invalid_argument("score_subset: empty split side");
    detail::check_flat_subset(subset, features.dimension());

    std::vector<std::vector<double>> train_rows;
    std::vector<int> train_labels;
    train_rows.reserve(split.train.size());
    train_labels.reserve(split.train.size());
    for (const std::size_t idx : split.train) {
        std::vector<double> row;
        project_flat(features.rows[idx], subset, row);
        l2_normalize_inplace(row);
        train_rows.push_back(std::move(row));
        train_labels.push_back(features.labels[idx]);
    }
    const SvmModel model = train_multiclass(train_rows, train_labels, svm_config);

    std::size_t correct = 0;
    std::vector<double> row;
    for (const std::size_t idx : split.test) {
        project_flat(features.rows[idx], subset, row);
        l2_normalize_inplace(row);
        if (predict(model, row) == features.labels[idx])
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.test.size());
}

inline double score_subset(const FeatureMatrix& features, std::span<const FeatureIndex> subset,
                           const Split& split, const SvmConfig& svm_config) {
    std::vector<std::size_t> flats;
    flats.reserve(subset.size());
    for (const FeatureIndex& f : subset)
        flats.push_back(flat_index(f, features.landmark_count));
    return score_subset(features, flats, split, svm_config);
}

/// Winner of the coarse hyperparameter sweep.
struct GridSearchResult {
    double cost = 1.0;
    double gamma = 1.0;
    double accuracy = 0.0;
};

/// Coarse, deterministic grid search over the classifier hyperparameters:
/// cost in {0.1, 1, 10, 100} crossed with gamma in {0.01, 0.1, 1, 10}
/// times the data-derived scale value. Each combination is scored like any
/// candidate subset (train side -> test side of the given split); ties keep
/// the earliest combination in sweep order. `subset` empty means the full
/// feature set. Off by default everywhere; the CLI exposes it behind
/// --grid-search.
inline GridSearchResult grid_search_svm(const FeatureMatrix& features,
                                        std::span<const std::size_t> subset, const Split& split,
                                        const SvmConfig& base) {
    std::vector<std::size_t> flats(subset.begin(), subset.end());
    if (flats.empty()) {
        flats.resize(features.dimension());
        for (std::size_t k = 0; k < flats.size(); ++k)
            flats[k] = k;
    }

    // the scale reference gamma, computed exactly as the trainer would on
    // the projected, normalized training rows
    std::vector<std::vector<double>> train_rows;
    train_rows.reserve(split.train.size());
    for (const std::size_t idx : split.train) {
        std::vector<double> row;
        project_flat(features.rows[idx], flats, row);
        l2_normalize_inplace(row);
        train_rows.push_back(std::move(row));
    }
    const double scale = resolve_gamma(train_rows);

    GridSearchResult best;
    best.accuracy = -1.0;
    for (const double cost : {0.1, 1.0, 10.0, 100.0}) {
        for (const double multiplier : {0.01, 0.1, 1.0, 10.0}) {
            SvmConfig config = base;
            config.cost = cost;
            config.gamma = multiplier * scale;
            const double accuracy = score_subset(features, flats, split, config);
            if (accuracy > best.accuracy) {
                best.cost = cost;
                best.gamma = multiplier * scale;
                best.accuracy = accuracy;
            }
        }
    }
    return best;
}

struct SelectionStep {
    FeatureIndex feature;
    std::size_t flat = 0;
    double accuracy = 0.0;
    std::size_t candidates_evaluated = 0;
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    std::vector<FeatureIndex> final_subset; // selection order
    std::vector<std::size_t> final_flats;   // same order, flat encoding
    std::uint64_t seed = 0;
    double train_ratio = 0.0;
};

/// Sequential forward selection. Each iteration scores every not-yet-chosen
/// candidate appended to the current subset on one fixed stratified split,
/// takes the candidate with the highest test accuracy (ties to the lowest
/// flat index), and stops when the best candidate no longer improves on the
/// current accuracy by more than min_improvement (the empty subset counts
/// as accuracy 0). Candidate evaluations run in parallel; the reduction
/// compares (accuracy, flat index) pairs, so the outcome is identical for
/// any thread count.
///
/// `pool` restricts the candidate set to the given flat indices; empty
/// means every feature. The candidates-excluded-by-pool never enter the
/// subset, which keeps controlled experiments (known-informative features
/// against known-noise features) well defined.
inline SelectionTrace sfs(const FeatureMatrix& features, const SelectionConfig& config,
                          std::span<const std::size_t> pool = {}) {
    validate(config);
    if (features.size() == 0 || features.dimension() == 0)
        throw input_error("sfs: empty feature matrix");
    if (features.dimension() != feature_dimension(features.landmark_count))
        throw std::invalid_argument("sfs: matrix dimension does not match its landmark count");

    std::vector<std::size_t> candidates;
    if (pool.empty()) {
        candidates.resize(features.dimension());
        for (std::size_t k = 0; k < candidates.size(); ++k)
            candidates[k] = k;
    } else {
        candidates.assign(pool.begin(), pool.end());
        std::sort(candidates.begin(), candidates.end());
        detail::check_flat_subset(candidates, features.dimension());
    }

    const Split split = stratified_split(features.labels, config.train_ratio, config.seed);
    const std::size_t threads = resolve_threads(config.threads);

    SelectionTrace trace;
    trace.seed = config.seed;
    trace.train_ratio = config.train_ratio;
    double current_accuracy = 0.0;
    std::vector<std::size_t> selected;

    while (config.max_features == 0 || selected.size() < config.max_features) {
        if (candidates.empty())
            break;
        std::vector<double> accuracies(candidates.size());
        parallel_for(candidates.size(), threads, [&](std::size_t c) {
            std::vector<std::size_t> attempt = selected;
            attempt.push_back(candidates[c]);
            accuracies[c] = score_subset(features, attempt, split, config.svm);
        });
        // candidates are sorted ascending, so the first maximum is the
        // lowest flat index among ties
        std::size_t best = 0;
        for (std::size_t c = 1; c < candidates.size(); ++c)
            if (accuracies[c] > accuracies[best])
                best = c;
        if (!(accuracies[best] > current_accuracy + config.min_improvement))
            break;
        const std::size_t chosen = candidates[best];
        current_accuracy = accuracies[best];
        trace.steps.push_back(SelectionStep{feature_from_flat(chosen, features.landmark_count),
                                            chosen, current_accuracy, candidates.size()});
        selected.push_back(chosen);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    }

    trace.final_flats = selected;
    for (const std::size_t flat : selected)
        trace.final_subset.push_back(feature_from_flat(flat, features.landmark_count));
    return trace;
}

// --- subset files -------------------------------------------------------
//
// Line 1: landmarks=<L>
// Then one feature per line, `i,j,axis` with axis in {h, v}, in selection
// order.

struct SubsetFile {
    std::size_t landmark_count = 0;
    std::vector<FeatureIndex> features;
};

inline std::string subset_to_string(std::size_t landmark_count,
                                    std::span<const FeatureIndex> subset) {
    std::string out = "landmarks=" + std::to_string(landmark_count) + "\n";
    for (const FeatureIndex& f : subset) {
        flat_index(f, landmark_count); // bounds check
        out += std::to_string(f.i) + ',' + std::to_string(f.j) + ',' + axis_code(f.axis) + '\n';
    }
    return out;
}

inline SubsetFile parse_subset(std::string_view text) {
    const std::vector<std::string_view> lines = split_lines(text);
    if (lines.empty() || !trim(lines[0]).starts_with("landmarks="))
        throw input_error("subset file: first line must be \"landmarks=<count>\"");
    const auto count = parse_uint(trim(lines[0]).substr(10));
    if (!count || *count < 2)
        throw input_error("subset file: invalid landmark count");

    SubsetFile subset;
    subset.landmark_count = static_cast<std::size_t>(*count);
    std::vector<std::size_t> flats;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::string_view line = trim(lines[k]);
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            throw input_error("subset file: line " + std::to_string(k + 1) +
                              ": expected \"i,j,axis\"");
        const auto i = parse_uint(trim(fields[0]));
        const auto j = parse_uint(trim(fields[1]));
        if (!i || !j)
            throw input_error("subset file: line " + std::to_string(k + 1) + ": bad landmark ordinal");
        FeatureIndex feature{static_cast<std::size_t>(*i), static_cast<std::size_t>(*j),
                             axis_from_code(trim(fields[2]))};
        std::size_t flat;
        try {
            flat = flat_index(feature, subset.landmark_count);
        } catch (const std::invalid_argument& err) {
            throw input_error("subset file: line " + std::to_string(k + 1) + ": " + err.what());
        }
        if (std::find(flats.begin(), flats.end(), flat) != flats.end())
            throw input_error("subset file: line " + std::to_string(k + 1) + ": duplicate feature");
        flats.push_back(flat);
        subset.features.push_back(feature);
    }
    return subset;
}

inline void save_subset(const std::filesystem::path& path, std::size_t landmark_count,
                        std::span<const FeatureIndex> subset) {
    atomic_write_file(path, subset_to_string(landmark_count, subset));
}

inline SubsetFile load_subset(const std::filesystem::path& path) {
    try {
        return parse_subset(read_file(path));
    } catch (const input_error& err) {
        throw input_error(path.string() + ": " + err.what());
    }
}

// --- trace reports --------------------------------------------------------

inline std::string trace_to_csv(const SelectionTrace& trace) {
    std::string out = "step,i,j,axis,flat,accuracy,candidates_evaluated\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const SelectionStep& step = trace.steps[k];
        out += std::to_string(k + 1) + ',' + std::to_string(step.feature.i) + ',' +
               std::to_string(step.feature.j) + ',' + axis_code(step.feature.axis) + ',' +
               std::to_string(step.flat) + ',' + format_double(step.accuracy) + ',' +
               std::to_string(step.candidates_evaluated) + '\n';
    }
    return out;
}

inline SelectionTrace parse_trace_csv(std::string_view text) {
    const std::vector<std::string_view> lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != "step,i,j,axis,flat,accuracy,candidates_evaluated")
        throw input_error("trace csv: missing header");
    SelectionTrace trace;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::string_view line = trim(lines[k]);
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        if (fields.size() != 7)
            throw input_error("trace csv: line " + std::to_string(k + 1) + ": expected 7 columns");
        SelectionStep step;
        const auto i = parse_uint(fields[1]);
        const auto j = parse_uint(fields[2]);
        const auto flat = parse_uint(fields[4]);
        const auto accuracy = parse_double(fields[5]);
        const auto evaluated = parse_uint(fields[6]);
        if (!i || !j || !flat || !accuracy || !evaluated)
            throw input_error("trace csv: line " + std::to_string(k + 1) + ": bad value");
        step.feature = FeatureIndex{static_cast<std::size_t>(*i), static_cast<std::size_t>(*j),
                                    axis_from_code(fields[3])};
        step.flat = static_cast<std::size_t>(*flat);
        step.accuracy = *accuracy;
        step.candidates_evaluated = static_cast<std::size_t>(*evaluated);
        trace.steps.push_back(step);
        trace.final_subset.push_back(step.feature);
        trace.final_flats.push_back(step.flat);
    }
    return trace;
}

/// Human-readable selection table.
inline std::string render_trace(const SelectionTrace& trace) {
    std::string out = "step  accuracy  feature\n";
    char buf[32];
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const SelectionStep& step = trace.steps[k];
        std::snprintf(buf, sizeof buf, "%4zu  %8.4f  ", k + 1, step.accuracy);
        out += buf;
        out += describe_feature(step.feature);
        out += '\n';
    }
    return out;
}

} // namespace fsel
