/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: tests/test_landmarks.cpp
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
#include <catch2/catch_amalgamated.hpp>

#include "fsel/io.hpp"
#include "fsel/landmarks.hpp"
#include "helpers.hpp"

using namespace fsel;

namespace {

std::string pts_text(std::size_t declared, std::size_t actual) {
    std::string text = "version: 1\nn_points: " + std::to_string(declared) + "\n{\n";
    for (std::size_t k = 0; k < actual; ++k)
        text += std::to_string(k) + " " + std::to_string(2 * k) + "\n";
    text += "}\n";
    return text;
}

} // namespace

TEST_CASE("pts: well-formed 68-point file parses in order") {
    const LandmarkFrame frame = parse_pts(pts_text(68, 68));
    REQUIRE(frame.points.size() == 68);
    CHECK(frame.points[0] == Point{0.0, 0.0});
    CHECK(frame.points[67] == Point{67.0, 134.0});
}

TEST_CASE("pts: declared and actual point counts must match") {
    REQUIRE_THROWS_WITH(parse_pts(pts_text(68, 67)),
                        Catch::Matchers::ContainsSubstring("point count mismatch"));
}

TEST_CASE("pts: an all-zero frame is well-formed") {
    std::string text = "version: 1\nn_points: 3\n{\n0 0\n0 0\n0 0\n}\n";
    const LandmarkFrame frame = parse_pts(text);
    REQUIRE(frame.points.size() == 3);
    for (const Point& p : frame.points)
        CHECK(p == Point{0.0, 0.0});
}

TEST_CASE("pts: malformed inputs name the offending line") {
    CHECK_THROWS_WITH(parse_pts("bogus\nn_points: 1\n{\n0 0\n}\n"),
                      Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_pts("version: 1\nbogus\n{\n0 0\n}\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_pts("version: 1\nn_points: 2\n{\n0 0\n1 oops\n}\n"),
                      Catch::Matchers::ContainsSubstring("line 5"));
    CHECK_THROWS(parse_pts("version: 1\nn_points: 1\n{\n0 0\n"));
}

TEST_CASE("pts: CRLF input parses identically") {
    const std::string lf = pts_text(4, 4);
    std::string crlf;
    for (const char c : lf) {
        if (c == '\n')
            crlf += '\r';
        crlf += c;
    }
    CHECK(parse_pts(lf) == parse_pts(crlf));
}

TEST_CASE("csv frame: identity rows") {
    std::string text;
    for (int k = 0; k < 68; ++k)
        text += std::to_string(k) + "," + std::to_string(k) + "\n";
    const LandmarkFrame frame = parse_csv_frame(text);
    REQUIRE(frame.points.size() == 68);
    CHECK(frame.points[0] == Point{0.0, 0.0});
    CHECK(frame.points[67] == Point{67.0, 67.0});

    SECTION("a leading x,y header is tolerated") {
        const LandmarkFrame with_header = parse_csv_frame("x,y\n" + text);
        CHECK(with_header == frame);
    }
}

TEST_CASE("csv frame: empty input is an error") {
    REQUIRE_THROWS_WITH(parse_csv_frame(""), Catch::Matchers::ContainsSubstring("no points"));
    REQUIRE_THROWS_WITH(parse_csv_frame("x,y\n"), Catch::Matchers::ContainsSubstring("no points"));
}

TEST_CASE("csv frame: bad rows are rejected with line numbers") {
    CHECK_THROWS_WITH(parse_csv_frame("1,2\n3\n"), Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_csv_frame("1,2,3\n"), Catch::Matchers::ContainsSubstring("found 3"));
    CHECK_THROWS_WITH(parse_csv_frame("1,zap\n"), Catch::Matchers::ContainsSubstring("non-numeric"));
}

TEST_CASE("frames round-trip through both formats bit-exactly") {
    Rng rng(20260810);
    for (int round = 0; round < 50; ++round) {
        LandmarkFrame frame;
        const std::size_t n = 2 + uniform_below(rng, 70);
        for (std::size_t k = 0; k < n; ++k)
            frame.points.push_back(Point{uniform_real(rng, -1e4, 1e4) / 3.0,
                                         uniform_real(rng, -1e4, 1e4) / 7.0});
        CHECK(parse_pts(write_pts(frame)) == frame);
        CHECK(parse_csv_frame(write_csv_frame(frame)) == frame);
    }
}

TEST_CASE("parsing is deterministic") {
    const std::string text = pts_text(10, 10);
    CHECK(parse_pts(text) == parse_pts(text));
}

TEST_CASE("labels: codes are fixed and alphabetical") {
    CHECK(static_cast<int>(ExpressionLabel::anger) == 0);
    CHECK(static_cast<int>(ExpressionLabel::contempt) == 1);
    CHECK(static_cast<int>(ExpressionLabel::disgust) == 2);
    CHECK(static_cast<int>(ExpressionLabel::fear) == 3);
    CHECK(static_cast<int>(ExpressionLabel::happiness) == 4);
    CHECK(static_cast<int>(ExpressionLabel::sadness) == 5);
    CHECK(static_cast<int>(ExpressionLabel::surprise) == 6);
    for (std::size_t k = 0; k < kClassCount; ++k)
        CHECK(parse_label(kLabelNames[k]) == static_cast<ExpressionLabel>(k));
}

TEST_CASE("labels: unknown names list the valid set") {
    try {
        parse_label("joy");
        FAIL("expected input_error");
    } catch (const input_error& err) {
        const std::string msg = err.what();
        for (const auto name : kLabelNames)
            CHECK(msg.find(name) != std::string::npos);
    }
}

namespace {

/// Writes one neutral and one apex frame plus a manifest with the given
/// label sequence; all entries share the two frame files.
std::filesystem::path write_manifest_fixture(const testutil::TempDir& dir,
                                             const std::vector<std::string>& labels,
                                             std::size_t landmark_count = 5) {
    LandmarkFrame frame;
    for (std::size_t k = 0; k < landmark_count; ++k)
        frame.points.push_back(Point{static_cast<double>(k), 1.0});
    atomic_write_file(dir.path() / "n.pts", write_pts(frame));
    atomic_write_file(dir.path() / "a.pts", write_pts(frame));
    DatasetManifest manifest;
    for (std::size_t k = 0; k < labels.size(); ++k)
        manifest.entries.push_back(
            ManifestEntry{"id" + std::to_string(k), "subj" + std::to_string(k % 9), labels[k],
                          "n.pts", "a.pts"});
    const auto path = dir.path() / "manifest.csv";
    atomic_write_file(path, write_manifest(manifest));
    return path;
}

} // namespace

TEST_CASE("manifest: single valid entry loads") {
    testutil::TempDir dir("manifest_single");
    const auto path = write_manifest_fixture(dir, {"happiness"});
    const Dataset dataset = load_manifest(path);
    REQUIRE(dataset.examples.size() == 1);
    CHECK(dataset.examples[0].id == "id0");
    CHECK(dataset.examples[0].label == ExpressionLabel::happiness);
    CHECK(dataset.landmark_count == 5);
    CHECK(dataset.class_counts[4] == 1);
}

TEST_CASE("manifest: the standard benchmark class shape tallies correctly") {
    // 327 examples split 45/19/59/25/69/28/82 across the seven classes
    const std::array<std::size_t, kClassCount> expected = {45, 19, 59, 25, 69, 28, 82};
    std::vector<std::string> labels;
    for (std::size_t cls = 0; cls < kClassCount; ++cls)
        for (std::size_t k = 0; k < expected[cls]; ++k)
            labels.push_back(std::string(kLabelNames[cls]));
    testutil::TempDir dir("manifest_ck_shape");
    const Dataset dataset = load_manifest(write_manifest_fixture(dir, labels));
    CHECK(dataset.examples.size() == 327);
    CHECK(dataset.class_counts == expected);
}

TEST_CASE("manifest: entry order is preserved") {
    testutil::TempDir dir("manifest_order");
    const auto path = write_manifest_fixture(dir, {"surprise", "anger", "fear"});
    const Dataset dataset = load_manifest(path);
    REQUIRE(dataset.examples.size() == 3);
    CHECK(dataset.examples[0].id == "id0");
    CHECK(dataset.examples[1].id == "id1");
    CHECK(dataset.examples[2].id == "id2");
    CHECK(dataset.examples[0].label == ExpressionLabel::surprise);
}

TEST_CASE("manifest: unknown label is rejected with the valid list") {
    testutil::TempDir dir("manifest_badlabel");
    const auto path = write_manifest_fixture(dir, {"joy"});
    REQUIRE_THROWS_WITH(load_manifest(path), Catch::Matchers::ContainsSubstring("sadness"));
}

TEST_CASE("manifest: duplicate ids are rejected") {
    testutil::TempDir dir("manifest_dup");
    write_manifest_fixture(dir, {"anger"});
    std::string text = read_file(dir.path() / "manifest.csv");
    text += "id0,subj,anger,n.pts,a.pts\n";
    atomic_write_file(dir.path() / "manifest.csv", text);
    REQUIRE_THROWS_WITH(load_manifest(dir.path() / "manifest.csv"),
                        Catch::Matchers::ContainsSubstring("duplicate id"));
}

TEST_CASE("manifest: missing frame file is reported") {
    testutil::TempDir dir("manifest_missing");
    const auto path = write_manifest_fixture(dir, {"anger"});
    std::filesystem::remove(dir.path() / "a.pts");
    REQUIRE_THROWS_AS(load_manifest(path), input_error);
}

TEST_CASE("manifest: landmarks directive must match the frames") {
    testutil::TempDir dir("manifest_directive");
    write_manifest_fixture(dir, {"anger"});
    const std::string text = "# landmarks=68\n" + read_file(dir.path() / "manifest.csv");
    atomic_write_file(dir.path() / "manifest.csv", text);
    REQUIRE_THROWS_WITH(load_manifest(dir.path() / "manifest.csv"),
                        Catch::Matchers::ContainsSubstring("expected 68 landmarks"));
}

TEST_CASE("manifest: header-only file has no examples") {
    testutil::TempDir dir("manifest_empty");
    const auto path = dir.path() / "manifest.csv";
    atomic_write_file(path, std::string(kManifestHeader) + "\n");
    REQUIRE_THROWS_WITH(load_manifest(path), Catch::Matchers::ContainsSubstring("no examples"));
}

TEST_CASE("validate_frame rejects non-finite coordinates") {
    LandmarkFrame frame = testutil::make_frame({{0.0, 0.0}, {1.0, 1.0}});
    CHECK_NOTHROW(validate_frame(frame));
    frame.points[1].y = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate_frame(frame), input_error);
    frame.points[1].y = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate_frame(frame), input_error);
}
