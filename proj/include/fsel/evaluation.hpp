/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/evaluation.hpp
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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/features.hpp"
#include "fsel/parallel.hpp"
#include "fsel/rng.hpp"
#include "fsel/svm.hpp"
#include "fsel/text.hpp"

namespace fsel {

struct EvalConfig {
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    SvmConfig svm;
    std::size_t threads = 0; // 0 = all hardware threads; never affects results
};

/// Stratified fold assignment: within each class, a seeded shuffle is dealt
/// round-robin across folds, so per-class fold sizes differ by at most one
/// and every class appears in every training side. Returns the test index
/// set of each fold, each sorted ascending; the sets partition [0, n).
inline std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels,
                                                              std::size_t folds,
                                                              std::uint64_t seed) {
    if (folds < 2)
        throw std::invalid_argument("stratified_kfold: need at least 2 folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t k = 0; k < labels.size(); ++k)
        by_class[labels[k]].push_back(k);
    for (const auto& [code, members] : by_class)
        if (members.size() < folds)
            throw input_error("stratified_kfold: class " + std::to_string(code) + " has " +
                              std::to_string(members.size()) + " examples, fewer than folds=" +
                              std::to_string(folds));

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> test_folds(folds);
    for (auto& [code, members] : by_class) {
        det_shuffle(members, rng);
        for (std::size_t k = 0; k < members.size(); ++k)
            test_folds[k % folds].push_back(members[k]);
    }
    for (auto& fold : test_folds)
        std::sort(fold.begin(), fold.end());
    return test_folds;
}

/// Confusion counts over one evaluation run. Rows are true classes, columns
/// predicted, both in the order of `classes`.
struct ConfusionMatrix {
    std::vector<int> classes;
    std::vector<std::vector<std::uint64_t>> counts;

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto& row : counts)
            for (const std::uint64_t c : row)
                sum += c;
        return sum;
    }

    std::uint64_t diagonal() const {
        std::uint64_t sum = 0;
        for (std::size_t k = 0; k < counts.size(); ++k)
            sum += counts[k][k];
        return sum;
    }

    /// Rows divided by their sums; a row with no examples stays all-zero
    /// (see empty_rows).
    std::vector<std::vector<double>> row_normalized() const {
        std::vector<std::vector<double>> out(counts.size(),
                                             std::vector<double>(counts.size(), 0.0));
        for (std::size_t r = 0; r < counts.size(); ++r) {
            std::uint64_t row_sum = 0;
            for (const std::uint64_t c : counts[r])
                row_sum += c;
            if (row_sum == 0)
                continue;
            for (std::size_t c = 0; c < counts[r].size(); ++c)
                out[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(row_sum);
        }
        return out;
    }

    std::vector<bool> empty_rows() const {
        std::vector<bool> out(counts.size(), true);
        for (std::size_t r = 0; r < counts.size(); ++r)
            for (const std::uint64_t c : counts[r])
                if (c != 0) {
                    out[r] = false;
                    break;
                }
        return out;
    }
};

struct CvMetrics {
    double accuracy = 0.0;
    std::vector<double> per_class; // diagonal of the row-normalized matrix; NaN for empty rows
    double mean_class_accuracy = 0.0; // mean over classes that were actually tested
};

inline CvMetrics metrics_from(const ConfusionMatrix& matrix) {
    CvMetrics metrics;
    const std::uint64_t total = matrix.total();
    metrics.accuracy =
        total == 0 ? 0.0 : static_cast<double>(matrix.diagonal()) / static_cast<double>(total);
    const auto normalized = matrix.row_normalized();
    const auto empty = matrix.empty_rows();
    double class_sum = 0.0;
    std::size_t class_count = 0;
    for (std::size_t r = 0; r < matrix.counts.size(); ++r) {
        if (empty[r]) {
            metrics.per_class.push_back(std::nan(""));
            continue;
        }
        metrics.per_class.push_back(normalized[r][r]);
        class_sum += normalized[r][r];
        ++class_count;
    }
    metrics.mean_class_accuracy = class_count == 0 ? 0.0 : class_sum / static_cast<double>(class_count);
    return metrics;
}

struct CvResult {
    ConfusionMatrix matrix;
    CvMetrics metrics;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
};

/// Stratified k-fold cross-validation of one fixed feature subset. Every
/// fold trains on the other folds' rows (projected onto the subset and
/// L2-normalized per example, fold-locally) and predicts its own test rows;
/// counts accumulate into a single confusion matrix, so every example is
/// predicted exactly once per run. Folds run in parallel; the per-fold
/// count matrices merge by integer addition, which commutes, so the result
/// is independent of the thread count.
inline CvResult cross_validate(const FeatureMatrix& features, std::span<const std::size_t> subset,
                               const EvalConfig& config) {
    if (subset.empty())
        throw input_error("cross_validate: empty subset");
    validate(config.svm);
    detail::check_flat_subset(subset, features.dimension());
    const auto test_folds = stratified_kfold(features.labels, config.folds, config.seed);

    CvResult result;
    result.folds = config.folds;
    result.seed = config.seed;
    result.matrix.classes.assign(features.labels.begin(), features.labels.end());
    std::sort(result.matrix.classes.begin(), result.matrix.classes.end());
    result.matrix.classes.erase(
        std::unique(result.matrix.classes.begin(), result.matrix.classes.end()),
        result.matrix.classes.end());
    const std::size_t k = result.matrix.classes.size();
    result.matrix.counts.assign(k, std::vector<std::uint64_t>(k, 0));
    const auto class_row = [&](int code) {
        const auto it = std::lower_bound(result.matrix.classes.begin(),
                                         result.matrix.classes.end(), code);
        return static_cast<std::size_t>(it - result.matrix.classes.begin());
    };

    std::vector<std::vector<std::vector<std::uint64_t>>> fold_counts(
        test_folds.size(), std::vector<std::vector<std::uint64_t>>(
                               k, std::vector<std::uint64_t>(k, 0)));
    parallel_for(test_folds.size(), config.threads, [&](std::size_t f) {
        const auto& fold = test_folds[f];
        std::vector<bool> in_test(features.size(), false);
        for (const std::size_t idx : fold)
            in_test[idx] = true;

        std::vector<std::vector<double>> train_rows;
        std::vector<int> train_labels;
        for (std::size_t idx = 0; idx < features.size(); ++idx) {
            if (in_test[idx])
                continue;
            std::vector<double> row;
            project_flat(features.rows[idx], subset, row);
            l2_normalize_inplace(row);
            train_rows.push_back(std::move(row));
            train_labels.push_back(features.labels[idx]);
        }
        const SvmModel model = train_multiclass(train_rows, train_labels, config.svm);

        std::vector<double> row;
        for (const std::size_t idx : fold) {
            project_flat(features.rows[idx], subset, row);
            l2_normalize_inplace(row);
            const int predicted = predict(model, row);
            fold_counts[f][class_row(features.labels[idx])][class_row(predicted)] += 1;
        }
    });
    for (const auto& counts : fold_counts)
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c)
                result.matrix.counts[r][c] += counts[r][c];
    result.metrics = metrics_from(result.matrix);
    return result;
}

inline CvResult cross_validate(const FeatureMatrix& features,
                               std::span<const FeatureIndex> subset, const EvalConfig& config) {
    std::vector<std::size_t> flats;
    flats.reserve(subset.size());
    for (const FeatureIndex& f : subset)
        flats.push_back(flat_index(f, features.landmark_count));
    return cross_validate(features, flats, config);
}

/// Rounds half away from zero at two decimals; this is the rule used by
/// the rendered confusion table.
inline double round2(double value) {
    return std::round(value * 100.0) / 100.0;
}

/// Text table of the row-normalized matrix, two decimals per cell, rows
/// and columns in `labels` order (which must align with matrix.classes).
inline std::string render_confusion(const ConfusionMatrix& matrix,
                                    std::span<const std::string> labels) {
    if (labels.size() != matrix.classes.size())
        throw std::invalid_argument("render_confusion: label count does not match matrix");
    std::size_t width = 0;
    for (const std::string& name : labels)
        width = std::max(width, name.size());
    width = std::max<std::size_t>(width, 5);

    const auto normalized = matrix.row_normalized();
    std::string out(width + 2, ' ');
    char buf[64];
    for (const std::string& name : labels) {
        std::snprintf(buf, sizeof buf, "%*s", static_cast<int>(width), name.c_str());
        out += buf;
        out += "  ";
    }
    out += '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%-*s  ", static_cast<int>(width), labels[r].c_str());
        out += buf;
        for (std::size_t c = 0; c < labels.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%*.2f  ", static_cast<int>(width), round2(normalized[r][c]));
            out += buf;
        }
        out += '\n';
    }
    const auto empty = matrix.empty_rows();
    for (std::size_t r = 0; r < labels.size(); ++r)
        if (empty[r])
            out += "note: no examples of class " + labels[r] + "\n";
    return out;
}

/// Raw counts as CSV: header `label,<predicted...>`, one row per true class.
inline std::string counts_csv(const ConfusionMatrix& matrix, std::span<const std::string> labels) {
    if (labels.size() != matrix.classes.size())
        throw std::invalid_argument("counts_csv: label count does not match matrix");
    std::string out = "label";
    for (const std::string& name : labels)
        out += ',' + name;
    out += '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out += labels[r];
        for (std::size_t c = 0; c < labels.size(); ++c)
            out += ',' + std::to_string(matrix.counts[r][c]);
        out += '\n';
    }
    return out;
}

inline std::string summary_line(const CvResult& result) {
    return "accuracy=" + format_double(result.metrics.accuracy) +
           " mean_class_accuracy=" + format_double(result.metrics.mean_class_accuracy) +
           " folds=" + std::to_string(result.folds) + " seed=" + std::to_string(result.seed);
}

} // namespace fsel
