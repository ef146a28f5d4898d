/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: tests/test_features.cpp
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

#include "fsel/features.hpp"
#include "helpers.hpp"

using namespace fsel;

namespace {

/// Independent rank oracle: enumerate all i < j pairs in lexicographic
/// order and count.
std::size_t rank_by_enumeration(std::size_t ti, std::size_t tj, std::size_t landmarks) {
    std::size_t rank = 0;
    for (std::size_t i = 0; i < landmarks; ++i)
        for (std::size_t j = i + 1; j < landmarks; ++j) {
            if (i == ti && j == tj)
                return rank;
            ++rank;
        }
    FAIL("pair not found");
    return 0;
}

} // namespace

TEST_CASE("pair_rank: first and last pairs for 68 landmarks") {
    CHECK(pair_count(68) == 2278);
    CHECK(feature_dimension(68) == 4556);
    CHECK(pair_rank(0, 1, 68) == 0);
    CHECK(pair_rank(66, 67, 68) == 2277);
    CHECK(pair_rank(66, 67, 68) == rank_by_enumeration(66, 67, 68));
}

TEST_CASE("pair_rank: small-case oracle agreement") {
    CHECK(pair_rank(0, 2, 4) == 1);
    CHECK(pair_rank(0, 2, 4) == rank_by_enumeration(0, 2, 4));
    for (const std::size_t landmarks : {2u, 3u, 5u, 9u})
        for (std::size_t i = 0; i < landmarks; ++i)
            for (std::size_t j = i + 1; j < landmarks; ++j)
                CHECK(pair_rank(i, j, landmarks) == rank_by_enumeration(i, j, landmarks));
}

TEST_CASE("pair_rank: domain errors") {
    CHECK_THROWS_AS(pair_rank(3, 3, 10), std::invalid_argument);
    CHECK_THROWS_AS(pair_rank(4, 3, 10), std::invalid_argument);
    CHECK_THROWS_AS(pair_rank(0, 10, 10), std::invalid_argument);
    CHECK_THROWS_AS(feature_from_flat(feature_dimension(10), 10), std::invalid_argument);
}

TEST_CASE("flat encoding and decoding are mutually inverse") {
    for (const std::size_t landmarks : {2u, 4u, 7u, 68u}) {
        const std::size_t dim = feature_dimension(landmarks);
        for (std::size_t flat = 0; flat < dim; ++flat) {
            const FeatureIndex f = feature_from_flat(flat, landmarks);
            REQUIRE(f.i < f.j);
            REQUIRE(f.j < landmarks);
            REQUIRE(flat_index(f, landmarks) == flat);
        }
    }
}

TEST_CASE("distance_vector: coincident points give the zero vector") {
    const LandmarkFrame frame = testutil::make_frame({{3, 4}, {3, 4}, {3, 4}, {3, 4}});
    for (const double v : distance_vector(frame))
        CHECK(v == 0.0);
}

TEST_CASE("distance_vector: three-point hand-computed case") {
    const LandmarkFrame frame = testutil::make_frame({{0, 0}, {1, 0}, {0, 2}});
    const std::vector<double> expected = {1.0, 0.0, -1.0, 0.0, 2.0, 2.0};
    CHECK(distance_vector(frame) == expected);
}

TEST_CASE("distance_vector: translation of the frame changes nothing") {
    Rng rng(7);
    const LandmarkFrame frame = testutil::random_int_frame(rng, 12, -100, 100);
    CHECK(distance_vector(frame) == distance_vector(testutil::translated(frame, 17.0, -41.0)));
}

TEST_CASE("distance_vector: sign convention is antisymmetric in the pair order") {
    Rng rng(8);
    const LandmarkFrame frame = testutil::random_int_frame(rng, 9, -50, 50);
    const std::vector<double> dv = distance_vector(frame);
    const std::size_t pairs = pair_count(9);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = i + 1; j < 9; ++j) {
            const std::size_t rank = pair_rank(i, j, 9);
            CHECK(dv[rank] == frame.points[j].x - frame.points[i].x);
            CHECK(dv[rank] == -(frame.points[i].x - frame.points[j].x));
            CHECK(dv[pairs + rank] == frame.points[j].y - frame.points[i].y);
        }
}

TEST_CASE("delta_features: identical frames give the zero vector") {
    Rng rng(9);
    const LandmarkFrame frame = testutil::random_int_frame(rng, 10, -30, 30);
    for (const double v : delta_features(frame, frame))
        CHECK(v == 0.0);
}

TEST_CASE("delta_features: 68 landmarks produce 4556 entries") {
    Rng rng(10);
    const LandmarkFrame neutral = testutil::random_int_frame(rng, 68, 0, 400);
    const LandmarkFrame apex = testutil::random_int_frame(rng, 68, 0, 400);
    CHECK(delta_features(neutral, apex).size() == 4556);
}

TEST_CASE("delta_features: widening mouth corners shows up with the right sign") {
    // landmarks 48 and 54 are 10 apart at rest and 14 apart at apex
    Rng rng(11);
    LandmarkFrame neutral = testutil::random_int_frame(rng, 68, 0, 400);
    neutral.points[48] = Point{100.0, 200.0};
    neutral.points[54] = Point{110.0, 200.0};
    LandmarkFrame apex = neutral;
    apex.points[48] = Point{98.0, 200.0};
    apex.points[54] = Point{112.0, 200.0};
    const std::vector<double> delta = delta_features(neutral, apex);
    const std::size_t flat = flat_index(FeatureIndex{48, 54, Axis::horizontal}, 68);
    CHECK(delta[flat] == 4.0);

    // narrowing by the same amount flips the sign
    LandmarkFrame narrow = neutral;
    narrow.points[48] = Point{102.0, 200.0};
    narrow.points[54] = Point{108.0, 200.0};
    CHECK(delta_features(neutral, narrow)[flat] == -4.0);
}

TEST_CASE("delta_features: independent frame translations cancel exactly") {
    Rng rng(12);
    for (int round = 0; round < 20; ++round) {
        const LandmarkFrame neutral = testutil::random_int_frame(rng, 8, -500, 500);
        const LandmarkFrame apex = testutil::random_int_frame(rng, 8, -500, 500);
        const auto base = delta_features(neutral, apex);
        const auto shifted = delta_features(testutil::translated(neutral, 31.0, -7.0),
                                            testutil::translated(apex, -12.0, 44.0));
        CHECK(base == shifted);
    }
}

TEST_CASE("delta_features: landmark count mismatch is an error") {
    const LandmarkFrame three = testutil::make_frame({{0, 0}, {1, 0}, {2, 0}});
    const LandmarkFrame four = testutil::make_frame({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK_THROWS_AS(delta_features(three, four), input_error);
}

TEST_CASE("project: identity, empty and reordering subsets") {
    Rng rng(13);
    const LandmarkFrame neutral = testutil::random_int_frame(rng, 68, 0, 300);
    const LandmarkFrame apex = testutil::random_int_frame(rng, 68, 0, 300);
    const std::vector<double> full = delta_features(neutral, apex);

    SECTION("all indices in flat order reproduce the input") {
        std::vector<FeatureIndex> all;
        for (std::size_t flat = 0; flat < full.size(); ++flat)
            all.push_back(feature_from_flat(flat, 68));
        CHECK(project(full, all, 68) == full);
    }
    SECTION("the empty subset projects to the empty vector") {
        CHECK(project(full, {}, 68).empty());
    }
    SECTION("subset order is preserved") {
        const std::vector<FeatureIndex> subset = {feature_from_flat(4555, 68),
                                                  feature_from_flat(0, 68)};
        const std::vector<double> projected = project(full, subset, 68);
        REQUIRE(projected.size() == 2);
        CHECK(projected[0] == full[4555]);
        CHECK(projected[1] == full[0]);
    }
}

TEST_CASE("project: duplicates and bad indices are rejected") {
    const std::vector<double> full(feature_dimension(4), 1.0);
    const FeatureIndex f{0, 1, Axis::horizontal};
    CHECK_THROWS_AS(project(full, std::vector<FeatureIndex>{f, f}, 4), std::invalid_argument);
    CHECK_THROWS_AS(project(full, std::vector<FeatureIndex>{FeatureIndex{0, 9, Axis::vertical}}, 4),
                    std::invalid_argument);
    const std::vector<double> short_vector(3, 0.0);
    CHECK_THROWS_AS(project(short_vector, std::vector<FeatureIndex>{f}, 4), std::invalid_argument);
}

TEST_CASE("l2_normalize: 3-4-5 triangle") {
    const std::vector<double> result = l2_normalize({3.0, 4.0});
    CHECK(result[0] == 0.6);
    CHECK(result[1] == 0.8);
}

TEST_CASE("l2_normalize: the zero vector stays zero") {
    const std::vector<double> result = l2_normalize({0.0, 0.0, 0.0});
    for (const double v : result)
        CHECK(v == 0.0);
}

TEST_CASE("l2_normalize: random nonzero vectors come out unit length") {
    Rng rng(14);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> v(1 + uniform_below(rng, 30));
        for (double& x : v)
            x = uniform_real(rng, -100.0, 100.0);
        v[0] += 1.0; // ensure nonzero
        const std::vector<double> unit = l2_normalize(v);
        double sum_sq = 0.0;
        for (const double x : unit)
            sum_sq += x * x;
        CHECK(std::abs(std::sqrt(sum_sq) - 1.0) <= 1e-12);
    }
}

TEST_CASE("l2_normalize: non-finite input is rejected") {
    CHECK_THROWS_AS(l2_normalize({1.0, std::numeric_limits<double>::infinity()}), input_error);
}

TEST_CASE("extract_features + feature_csv layout") {
    SequenceExample example;
    example.id = "e0";
    example.subject = "s0";
    example.label = ExpressionLabel::fear;
    example.neutral = testutil::make_frame({{0, 0}, {1, 0}, {0, 2}});
    example.apex = testutil::make_frame({{0, 0}, {2, 0}, {0, 2}});
    const std::vector<SequenceExample> examples = {example};
    const FeatureMatrix matrix = extract_features(examples, 3);
    REQUIRE(matrix.size() == 1);
    REQUIRE(matrix.dimension() == 6);
    CHECK(matrix.labels[0] == 3);
    CHECK(matrix.rows[0][pair_rank(0, 1, 3)] == 1.0);

    const std::string csv = feature_csv(matrix);
    CHECK(csv.starts_with("id,label,f0,f1,f2,f3,f4,f5\n"));
    CHECK(csv.find("e0,fear,1,") != std::string::npos);
}
