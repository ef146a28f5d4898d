/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/landmarks.hpp
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

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/io.hpp"
#include "fsel/text.hpp"

namespace fsel {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// One face's landmark coordinates for a single image, in dataset order.
/// The landmark count is a dataset-level constant (68 for the usual
/// annotation scheme) and is validated when a dataset is assembled, not
/// here, so synthetic datasets can use small counts.
struct LandmarkFrame {
    std::vector<Point> points;
    friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

inline void validate_frame(const LandmarkFrame& frame) {
    if (frame.points.empty())
        throw input_error("landmark frame has no points");
    for (const Point& p : frame.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw input_error("landmark frame contains a non-finite coordinate");
}

/// The seven expression classes, coded 0..6 in alphabetical order. The
/// mapping is fixed; everything downstream (confusion matrices, reports,
/// pairwise classifiers) relies on it.
enum class ExpressionLabel : int {
    anger = 0,
    contempt = 1,
    disgust = 2,
    fear = 3,
    happiness = 4,
    sadness = 5,
    surprise = 6,
};

inline constexpr std::size_t kClassCount = 7;

inline constexpr std::array<std::string_view, kClassCount> kLabelNames = {
    "anger", "contempt", "disgust", "fear", "happiness", "sadness", "surprise",
};

inline std::string_view label_name(ExpressionLabel label) {
    return kLabelNames[static_cast<std::size_t>(label)];
}

inline ExpressionLabel parse_label(std::string_view text) {
    for (std::size_t k = 0; k < kClassCount; ++k)
        if (text == kLabelNames[k])
            return static_cast<ExpressionLabel>(k);
    std::string msg = "unknown expression label \"";
    msg += text;
    msg += "\"; valid labels:";
    for (std::size_t k = 0; k < kClassCount; ++k) {
        msg += k == 0 ? " " : ", ";
        msg += kLabelNames[k];
    }
    throw input_error(msg);
}

/// A labeled neutral/apex frame pair. Only the first (fully neutral) and
/// last (fully expressive) frames of a sequence are used. The subject id is
/// carried for bookkeeping; evaluation folds are random and stratified, not
/// subject-disjoint.
struct SequenceExample {
    std::string id;
    std::string subject;
    ExpressionLabel label = ExpressionLabel::anger;
    LandmarkFrame neutral;
    LandmarkFrame apex;
};

namespace detail {

inline double parse_coordinate(std::string_view token, std::size_t line_no, const char* what) {
    const auto value = parse_double(token);
    if (!value)
        throw input_error(std::string("line ") + std::to_string(line_no) + ": non-numeric " +
                          what + " \"" + std::string(token) + "\"");
    return *value;
}

inline std::vector<std::string_view> fields_of(std::string_view line) {
    std::vector<std::string_view> fields = split(line, ',');
    for (auto& f : fields)
        f = trim(f);
    return fields;
}

} // namespace detail

/**
 * Parses the plain points format:
 *
 *     version: 1
 *     n_points: 68
 *     {
 *     x y
 *     ...
 *     }
 *
 * Coordinates are whitespace-separated decimals. LF and CRLF line endings
 * are both accepted; errors name the offending 1-based line.
 */
inline LandmarkFrame parse_pts(std::string_view text) {
    const std::vector<std::string_view> lines = split_lines(text);
    if (lines.size() < 3)
        throw input_error("pts: truncated header (need version, n_points and '{' lines)");
    if (!trim(lines[0]).starts_with("version:"))
        throw input_error("line 1: expected \"version:\" header");
    const std::string_view count_line = trim(lines[1]);
    if (!count_line.starts_with("n_points:"))
        throw input_error("line 2: expected \"n_points:\" header");
    const auto declared = parse_uint(trim(count_line.substr(9)));
    if (!declared || *declared == 0)
        throw input_error("line 2: invalid point count");
    if (trim(lines[2]) != "{")
        throw input_error("line 3: expected \"{\"");

    LandmarkFrame frame;
    frame.points.reserve(*declared);
    std::size_t k = 3;
    for (; k < lines.size(); ++k) {
        const std::string_view line = trim(lines[k]);
        if (line == "}")
            break;
        if (line.empty())
            throw input_error("line " + std::to_string(k + 1) + ": blank line inside point list");
        const std::size_t space = line.find_first_of(" \t");
        if (space == std::string_view::npos)
            throw input_error("line " + std::to_string(k + 1) + ": expected \"x y\"");
        Point p;
        p.x = detail::parse_coordinate(trim(line.substr(0, space)), k + 1, "x coordinate");
        p.y = detail::parse_coordinate(trim(line.substr(space + 1)), k + 1, "y coordinate");
        frame.points.push_back(p);
    }
    if (k == lines.size())
        throw input_error("pts: missing closing \"}\"");
    for (std::size_t rest = k + 1; rest < lines.size(); ++rest)
        if (!trim(lines[rest]).empty())
            throw input_error("line " + std::to_string(rest + 1) + ": content after \"}\"");
    if (frame.points.size() != *declared)
        throw input_error("pts: point count mismatch (n_points: " + std::to_string(*declared) +
                          ", found " + std::to_string(frame.points.size()) + ")");
    return frame;
}

inline std::string write_pts(const LandmarkFrame& frame) {
    std::string out = "version: 1\nn_points: " + std::to_string(frame.points.size()) + "\n{\n";
    for (const Point& p : frame.points) {
        out += format_double(p.x);
        out += ' ';
        out += format_double(p.y);
        out += '\n';
    }
    out += "}\n";
    return out;
}

/// Parses the one-pair-per-line CSV frame format: `x,y` rows, with one
/// optional literal `x,y` header line.
inline LandmarkFrame parse_csv_frame(std::string_view text) {
    const std::vector<std::string_view> lines = split_lines(text);
    LandmarkFrame frame;
    bool first = true;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string_view line = trim(lines[k]);
        if (line.empty())
            continue;
        if (first && line == "x,y") {
            first = false;
            continue;
        }
        first = false;
        const auto fields = detail::fields_of(line);
        if (fields.size() != 2)
            throw input_error("line " + std::to_string(k + 1) + ": expected 2 columns, found " +
                              std::to_string(fields.size()));
        Point p;
        p.x = detail::parse_coordinate(fields[0], k + 1, "x coordinate");
        p.y = detail::parse_coordinate(fields[1], k + 1, "y coordinate");
        frame.points.push_back(p);
    }
    if (frame.points.empty())
        throw input_error("csv frame: no points");
    return frame;
}

inline std::string write_csv_frame(const LandmarkFrame& frame) {
    std::string out;
    for (const Point& p : frame.points) {
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    return out;
}

/// Loads a frame file, choosing the parser by extension (.pts or .csv).
inline LandmarkFrame load_frame(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    try {
        if (ext == ".pts")
            return parse_pts(read_file(path));
        if (ext == ".csv")
            return parse_csv_frame(read_file(path));
    } catch (const input_error& err) {
        throw input_error(path.string() + ": " + err.what());
    }
    throw input_error(path.string() + ": unknown frame format (expected .pts or .csv)");
}

/// One manifest row, unresolved. Paths are relative to the manifest file.
struct ManifestEntry {
    std::string id;
    std::string subject;
    std::string label;
    std::string neutral_path;
    std::string apex_path;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::size_t landmark_count = 0; // 0 = infer from the first loaded frame
};

inline constexpr std::string_view kManifestHeader = "id,subject,label,neutral_path,apex_path";

/**
 * Parses a dataset manifest:
 *
 *     # landmarks=68            (optional directive; other comments ignored)
 *     id,subject,label,neutral_path,apex_path
 *     S005_001,S005,disgust,frames/S005_001_n.pts,frames/S005_001_a.pts
 *
 * Labels are the lowercase class names. Fields must not contain commas.
 */
inline DatasetManifest parse_manifest(std::string_view text) {
    DatasetManifest manifest;
    bool header_seen = false;
    const std::vector<std::string_view> lines = split_lines(text);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string_view line = trim(lines[k]);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            const std::string_view body = trim(line.substr(1));
            if (body.starts_with("landmarks=")) {
                const auto count = parse_uint(trim(body.substr(10)));
                if (!count || *count < 2)
                    throw input_error("line " + std::to_string(k + 1) +
                                      ": invalid landmarks directive");
                manifest.landmark_count = static_cast<std::size_t>(*count);
            }
            continue;
        }
        if (!header_seen) {
            if (line != kManifestHeader)
                throw input_error("line " + std::to_string(k + 1) + ": expected header \"" +
                                  std::string(kManifestHeader) + "\"");
            header_seen = true;
            continue;
        }
        const auto fields = detail::fields_of(line);
        if (fields.size() != 5)
            throw input_error("line " + std::to_string(k + 1) + ": expected 5 columns, found " +
                              std::to_string(fields.size()));
        ManifestEntry entry;
        entry.id = std::string(fields[0]);
        entry.subject = std::string(fields[1]);
        entry.label = std::string(fields[2]);
        entry.neutral_path = std::string(fields[3]);
        entry.apex_path = std::string(fields[4]);
        if (entry.id.empty())
            throw input_error("line " + std::to_string(k + 1) + ": empty id");
        manifest.entries.push_back(std::move(entry));
    }
    if (!header_seen)
        throw input_error("manifest: missing header line");
    return manifest;
}

inline std::string write_manifest(const DatasetManifest& manifest) {
    std::string out;
    if (manifest.landmark_count != 0)
        out += "# landmarks=" + std::to_string(manifest.landmark_count) + "\n";
    out += std::string(kManifestHeader) + "\n";
    for (const ManifestEntry& e : manifest.entries) {
        out += e.id + ',' + e.subject + ',' + e.label + ',' + e.neutral_path + ',' +
               e.apex_path + '\n';
    }
    return out;
}

/// A fully loaded dataset: examples in manifest order plus the per-class
/// tallies used for reporting and split sanity checks.
struct Dataset {
    std::vector<SequenceExample> examples;
    std::size_t landmark_count = 0;
    std::array<std::size_t, kClassCount> class_counts{};
};

/// Loads a manifest and every frame it references. Frames are validated
/// against a single dataset-wide landmark count: the manifest's
/// `# landmarks=` directive when present, otherwise the first frame's count.
inline Dataset load_manifest(const std::filesystem::path& path) {
    const DatasetManifest manifest = parse_manifest(read_file(path));
    if (manifest.entries.empty())
        throw input_error(path.string() + ": no examples");
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path()
                                                              : std::filesystem::path(".");

    Dataset dataset;
    dataset.landmark_count = manifest.landmark_count;
    std::unordered_set<std::string> seen_ids;
    for (const ManifestEntry& entry : manifest.entries) {
        if (!seen_ids.insert(entry.id).second)
            throw input_error(path.string() + ": duplicate id \"" + entry.id + "\"");
        SequenceExample example;
        example.id = entry.id;
        example.subject = entry.subject;
        example.label = parse_label(entry.label);
        example.neutral = load_frame(base / entry.neutral_path);
        example.apex = load_frame(base / entry.apex_path);
        validate_frame(example.neutral);
        validate_frame(example.apex);
        if (example.neutral.points.size() != example.apex.points.size())
            throw input_error("example \"" + entry.id + "\": neutral has " +
                              std::to_string(example.neutral.points.size()) + " landmarks, apex has " +
                              std::to_string(example.apex.points.size()));
        if (dataset.landmark_count == 0)
            dataset.landmark_count = example.neutral.points.size();
        if (example.neutral.points.size() != dataset.landmark_count)
            throw input_error("example \"" + entry.id + "\": expected " +
                              std::to_string(dataset.landmark_count) + " landmarks, found " +
                              std::to_string(example.neutral.points.size()));
        dataset.class_counts[static_cast<std::size_t>(example.label)]++;
        dataset.examples.push_back(std::move(example));
    }
    return dataset;
}

} // namespace fsel
