/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/features.hpp
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
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/landmarks.hpp"
#include "fsel/text.hpp"

namespace fsel {

enum class Axis : std::uint8_t { horizontal = 0, vertical = 1 };

inline char axis_code(Axis axis) {
    return axis == Axis::horizontal ? 'h' : 'v';
}

inline const char* axis_name(Axis axis) {
    return axis == Axis::horizontal ? "horizontal" : "vertical";
}

inline Axis axis_from_code(std::string_view code) {
    if (code == "h")
        return Axis::horizontal;
    if (code == "v")
        return Axis::vertical;
    throw input_error("unknown axis code \"" + std::string(code) + "\" (expected h or v)");
}

/// One delta-distance feature: a landmark pair observed on one axis.
/// i < j always; the feature's sign convention is fixed by that ordering
/// (value is x_j - x_i on the horizontal axis, y_j - y_i on the vertical).
struct FeatureIndex {
    std::size_t i = 0;
    std::size_t j = 0;
    Axis axis = Axis::horizontal;
    friend bool operator==(const FeatureIndex&, const FeatureIndex&) = default;
};

inline constexpr std::size_t pair_count(std::size_t landmark_count) {
    return landmark_count * (landmark_count - 1) / 2;
}

/// Full feature dimension: every i < j pair on both axes.
inline constexpr std::size_t feature_dimension(std::size_t landmark_count) {
    return 2 * pair_count(landmark_count);
}

/// Lexicographic rank of (i, j) among all i < j pairs; a bijection onto
/// [0, pair_count).
inline std::size_t pair_rank(std::size_t i, std::size_t j, std::size_t landmark_count) {
    if (i >= j || j >= landmark_count)
        throw std::invalid_argument("pair_rank: need i < j < landmark count, got (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ") with " +
                                    std::to_string(landmark_count) + " landmarks");
    return i * landmark_count - i * (i + 1) / 2 + (j - i - 1);
}

inline std::pair<std::size_t, std::size_t> pair_unrank(std::size_t rank, std::size_t landmark_count) {
    if (rank >= pair_count(landmark_count))
        throw std::invalid_argument("pair_unrank: rank " + std::to_string(rank) +
                                    " out of range for " + std::to_string(landmark_count) +
                                    " landmarks");
    std::size_t i = 0;
    std::size_t row = landmark_count - 1; // pairs whose first element is i
    while (rank >= row) {
        rank -= row;
        ++i;
        --row;
    }
    return {i, i + 1 + rank};
}

/// Flat encoding: the horizontal block of pair ranks first, then the
/// vertical block. Inverse of feature_from_flat.
inline std::size_t flat_index(const FeatureIndex& feature, std::size_t landmark_count) {
    const std::size_t rank = pair_rank(feature.i, feature.j, landmark_count);
    return feature.axis == Axis::horizontal ? rank : pair_count(landmark_count) + rank;
}

inline FeatureIndex feature_from_flat(std::size_t flat, std::size_t landmark_count) {
    const std::size_t pairs = pair_count(landmark_count);
    if (flat >= 2 * pairs)
        throw std::invalid_argument("feature_from_flat: index " + std::to_string(flat) +
                                    " out of range for " + std::to_string(landmark_count) +
                                    " landmarks (dimension " + std::to_string(2 * pairs) + ")");
    const Axis axis = flat < pairs ? Axis::horizontal : Axis::vertical;
    const auto [i, j] = pair_unrank(flat % pairs, landmark_count);
    return FeatureIndex{i, j, axis};
}

/// Human-readable feature description, e.g. "landmark 21 <-> landmark 22, vertical".
inline std::string describe_feature(const FeatureIndex& feature) {
    return "landmark " + std::to_string(feature.i) + " <-> landmark " + std::to_string(feature.j) +
           ", " + axis_name(feature.axis);
}

/// Signed horizontal and vertical differences over every landmark pair,
/// horizontal block first. Because only differences enter, translating the
/// whole frame leaves the vector unchanged.
inline std::vector<double> distance_vector(const LandmarkFrame& frame) {
    const std::size_t n = frame.points.size();
    const std::size_t pairs = pair_count(n);
    std::vector<double> out(2 * pairs);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = frame.points[i];
        for (std::size_t j = i + 1; j < n; ++j, ++rank) {
            const Point& b = frame.points[j];
            out[rank] = b.x - a.x;
            out[pairs + rank] = b.y - a.y;
        }
    }
    return out;
}

/// The expression-caused displacement: apex pair distances minus neutral
/// pair distances, elementwise. Each frame's own translation cancels inside
/// its distance vector, so independent translations of either frame do not
/// change the result.
inline std::vector<double> delta_features(const LandmarkFrame& neutral, const LandmarkFrame& apex) {
    if (neutral.points.size() != apex.points.size())
        throw input_error("delta_features: landmark count mismatch (neutral " +
                          std::to_string(neutral.points.size()) + ", apex " +
                          std::to_string(apex.points.size()) + ")");
    std::vector<double> delta = distance_vector(apex);
    const std::vector<double> base = distance_vector(neutral);
    for (std::size_t k = 0; k < delta.size(); ++k)
        delta[k] -= base[k];
    return delta;
}

namespace detail {

inline void check_flat_subset(std::span<const std::size_t> flats, std::size_t dimension) {
    std::vector<std::size_t> sorted(flats.begin(), flats.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("feature subset contains a duplicate index");
    if (!sorted.empty() && sorted.back() >= dimension)
        throw std::invalid_argument("feature subset index " + std::to_string(sorted.back()) +
                                    " out of range (dimension " + std::to_string(dimension) + ")");
}

} // namespace detail

/// Gathers the subset's entries, in subset order, from a full feature
/// vector. The subset must be duplicate-free and in range.
inline std::vector<double> project(std::span<const double> full,
                                   std::span<const FeatureIndex> subset,
                                   std::size_t landmark_count) {
    if (full.size() != feature_dimension(landmark_count))
        throw std::invalid_argument("project: input has length " + std::to_string(full.size()) +
                                    ", expected the full dimension " +
                                    std::to_string(feature_dimension(landmark_count)));
    std::vector<std::size_t> flats;
    flats.reserve(subset.size());
    for (const FeatureIndex& f : subset)
        flats.push_back(flat_index(f, landmark_count));
    detail::check_flat_subset(flats, full.size());
    std::vector<double> out;
    out.reserve(flats.size());
    for (const std::size_t flat : flats)
        out.push_back(full[flat]);
    return out;
}

/// Fast path for the selection loop: flat indices already validated.
inline void project_flat(std::span<const double> full, std::span<const std::size_t> flats,
                         std::vector<double>& out) {
    out.resize(flats.size());
    for (std::size_t k = 0; k < flats.size(); ++k)
        out[k] = full[flats[k]];
}

/// Scales to unit Euclidean norm. The zero vector is returned unchanged so
/// a degenerate apex == neutral example flows through the classifier
/// instead of producing NaNs. Division (not reciprocal multiplication)
/// keeps each entry correctly rounded.
inline void l2_normalize_inplace(std::vector<double>& values) {
    double sum_sq = 0.0;
    for (const double v : values) {
        if (!std::isfinite(v))
            throw input_error("l2_normalize: non-finite entry");
        sum_sq += v * v;
    }
    if (sum_sq == 0.0)
        return;
    const double norm = std::sqrt(sum_sq);
    for (double& v : values)
        v /= norm;
}

inline std::vector<double> l2_normalize(std::vector<double> values) {
    l2_normalize_inplace(values);
    return values;
}

/// Full delta-feature vectors for a whole dataset, row per example in
/// manifest order. This is the working representation for selection and
/// evaluation; rows stay un-normalized so subsets can be projected first
/// and normalized after, per the pipeline order.
struct FeatureMatrix {
    std::size_t landmark_count = 0;
    std::vector<std::string> ids;
    std::vector<int> labels; // class codes
    std::vector<std::vector<double>> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }
};

inline FeatureMatrix extract_features(std::span<const SequenceExample> examples,
                                      std::size_t landmark_count) {
    FeatureMatrix matrix;
    matrix.landmark_count = landmark_count;
    matrix.ids.reserve(examples.size());
    matrix.labels.reserve(examples.size());
    matrix.rows.reserve(examples.size());
    for (const SequenceExample& example : examples) {
        if (example.neutral.points.size() != landmark_count)
            throw input_error("example \"" + example.id + "\": expected " +
                              std::to_string(landmark_count) + " landmarks");
        matrix.ids.push_back(example.id);
        matrix.labels.push_back(static_cast<int>(example.label));
        matrix.rows.push_back(delta_features(example.neutral, example.apex));
    }
    return matrix;
}

inline FeatureMatrix extract_features(const Dataset& dataset) {
    return extract_features(dataset.examples, dataset.landmark_count);
}

/// CSV export: header `id,label,f0..f{D-1}` in flat-index order, one row
/// per example. Values are printed in shortest round-trip form.
inline std::string feature_csv(const FeatureMatrix& matrix) {
    std::string out = "id,label";
    const std::size_t dim = matrix.dimension();
    for (std::size_t k = 0; k < dim; ++k)
        out += ",f" + std::to_string(k);
    out += '\n';
    for (std::size_t row = 0; row < matrix.size(); ++row) {
        out += matrix.ids[row];
        out += ',';
        out += label_name(static_cast<ExpressionLabel>(matrix.labels[row]));
        for (const double v : matrix.rows[row]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

} // namespace fsel
