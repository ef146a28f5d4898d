/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: tests/test_synth.cpp
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

#include <set>

#include "fsel/evaluation.hpp"
#include "fsel/synth.hpp"
#include "helpers.hpp"

using namespace fsel;

namespace {

SynthSpec basic_spec() {
    SynthSpec spec;
    spec.landmark_count = 8;
    spec.class_count = 2;
    spec.examples_per_class = 12;
    spec.planted.push_back(PlantedFeature{FeatureIndex{0, 1, Axis::horizontal}, {0.0, 6.0}});
    spec.noise_sigma = 0.0;
    spec.seed = 5;
    return spec;
}

} // namespace

TEST_CASE("generate: counts and labels follow the requested shape") {
    SynthSpec spec;
    spec.landmark_count = 20;
    spec.class_count = 7;
    spec.examples_per_class = 40;
    spec.seed = 1;
    const auto examples = generate(spec);
    CHECK(examples.size() == 280);
    std::array<std::size_t, kClassCount> counts{};
    for (const SequenceExample& example : examples) {
        counts[static_cast<std::size_t>(example.label)]++;
        CHECK(example.neutral.points.size() == 20);
        CHECK(example.apex.points.size() == 20);
    }
    for (const std::size_t count : counts)
        CHECK(count == 40);
}

TEST_CASE("generate: deterministic per seed") {
    const SynthSpec spec = basic_spec();
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].neutral == b[k].neutral);
        CHECK(a[k].apex == b[k].apex);
    }
    SynthSpec other = spec;
    other.seed = 6;
    CHECK(generate(other)[0].neutral != a[0].neutral);
}

TEST_CASE("generate: with zero noise the planted delta is exact and separating") {
    const SynthSpec spec = basic_spec();
    const auto examples = generate(spec);
    const std::size_t planted_flat = flat_index(spec.planted[0].feature, spec.landmark_count);
    for (const SequenceExample& example : examples) {
        const auto delta = delta_features(example.neutral, example.apex);
        const double expected =
            spec.planted[0].class_means[static_cast<std::size_t>(example.label)];
        CHECK(delta[planted_flat] == Catch::Approx(expected).margin(1e-12));
    }
    // and the planted feature alone separates the classes
    const FeatureMatrix matrix = extract_features(examples, spec.landmark_count);
    const Split split = stratified_split(matrix.labels, 0.6, 3);
    SvmConfig config;
    CHECK(score_subset(matrix, std::vector<std::size_t>{planted_flat}, split, config) == 1.0);
}

TEST_CASE("generate: invalid planted features are rejected") {
    SynthSpec spec = basic_spec();
    spec.planted[0].feature = FeatureIndex{0, 9, Axis::horizontal}; // j out of range for 8
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = basic_spec();
    spec.planted[0].class_means = {1.0}; // wrong arity
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("default_planted: disjoint pairs with signed zero-sum class means") {
    const auto planted = default_planted(20, 7, 7, 6.0);
    REQUIRE(planted.size() == 7);
    std::set<std::size_t> used;
    for (std::size_t t = 0; t < planted.size(); ++t) {
        CHECK(used.insert(planted[t].feature.i).second);
        CHECK(used.insert(planted[t].feature.j).second);
        double sum = 0.0;
        for (std::size_t cls = 0; cls < 7; ++cls) {
            CHECK(planted[t].class_means[cls] == (cls == t ? 6.0 : -1.0));
            sum += planted[t].class_means[cls];
        }
        CHECK(sum == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(default_planted(10, 7, 7, 6.0), std::invalid_argument);
}

TEST_CASE("noise_pool: avoids planted landmarks entirely") {
    const auto planted = default_planted(34, 7, 7, 6.0);
    const auto pool = noise_pool(34, planted, 193);
    REQUIRE(pool.size() == 193);
    std::set<std::size_t> touched;
    for (const PlantedFeature& f : planted) {
        touched.insert(f.feature.i);
        touched.insert(f.feature.j);
    }
    for (const std::size_t flat : pool) {
        const FeatureIndex f = feature_from_flat(flat, 34);
        CHECK(touched.count(f.i) == 0);
        CHECK(touched.count(f.j) == 0);
    }
    CHECK_THROWS_AS(noise_pool(8, planted, 100), std::invalid_argument);
}

TEST_CASE("exhaustive_best_subset: size-1 equals the greedy first step") {
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        SynthSpec spec;
        spec.landmark_count = 8;
        spec.class_count = 3;
        spec.examples_per_class = 12;
        spec.planted = default_planted(8, 3, 3, 4.0);
        spec.noise_sigma = 0.8;
        spec.seed = seed;
        const FeatureMatrix matrix = extract_features(generate(spec), spec.landmark_count);

        SelectionConfig config;
        config.seed = seed + 100;
        config.max_features = 1;

        std::vector<std::size_t> pool;
        for (std::size_t flat = 0; flat < 56; ++flat)
            pool.push_back(flat);

        const auto [subset, accuracy] = exhaustive_best_subset(matrix, 1, pool, config);
        const SelectionTrace trace = sfs(matrix, config, pool);
        REQUIRE(trace.steps.size() == 1);
        CHECK(subset == std::vector<std::size_t>{trace.steps[0].flat});
        CHECK(accuracy == trace.steps[0].accuracy);
    }
}

TEST_CASE("exhaustive_best_subset: finds a planted single feature with full accuracy") {
    const FeatureMatrix matrix = extract_features(generate(basic_spec()), 8);
    SelectionConfig config;
    config.seed = 17;
    std::vector<std::size_t> pool;
    for (std::size_t flat = 0; flat < 20; ++flat)
        pool.push_back(flat);
    const auto [subset, accuracy] = exhaustive_best_subset(matrix, 1, pool, config);
    CHECK(subset == std::vector<std::size_t>{0}); // planted (0,1,h) is flat 0
    CHECK(accuracy == 1.0);
}

TEST_CASE("exhaustive_best_subset: jointly-informative pairs are found by enumeration") {
    // two features carry the label only through their product (an
    // exclusive-or layout); each alone scores near chance, together they
    // separate. Enumeration must find the pair; the greedy search has no
    // such guarantee, which is exactly why the oracle exists.
    FeatureMatrix matrix;
    matrix.landmark_count = 4; // dimension 12
    Rng rng(404);
    for (int k = 0; k < 60; ++k) {
        std::vector<double> row(feature_dimension(4));
        for (double& v : row)
            v = gaussian(rng) * 0.1;
        const double a = k % 2 == 0 ? -1.0 : 1.0;
        const double b = (k / 2) % 2 == 0 ? -1.0 : 1.0;
        row[2] += a;
        row[5] += b;
        matrix.ids.push_back("r" + std::to_string(k));
        matrix.labels.push_back(a * b > 0 ? 1 : 0);
        matrix.rows.push_back(std::move(row));
    }
    SelectionConfig config;
    config.seed = 9;
    config.svm.cost = 10.0;
    const std::vector<std::size_t> pool = {0, 1, 2, 3, 4, 5, 6};
    const auto [subset, accuracy] = exhaustive_best_subset(matrix, 2, pool, config);
    CHECK(subset == std::vector<std::size_t>{2, 5});
    CHECK(accuracy >= 0.95);
}

TEST_CASE("exhaustive_best_subset: enumeration bounds are hard errors") {
    const FeatureMatrix matrix = extract_features(generate(basic_spec()), 8);
    SelectionConfig config;
    std::vector<std::size_t> pool(56);
    for (std::size_t k = 0; k < pool.size(); ++k)
        pool[k] = k;
    CHECK_THROWS_AS(exhaustive_best_subset(matrix, 4, pool, config), std::invalid_argument);
    std::vector<std::size_t> large(65);
    for (std::size_t k = 0; k < large.size(); ++k)
        large[k] = k % 56;
    CHECK_THROWS_AS(exhaustive_best_subset(matrix, 1, large, config), std::invalid_argument);
}

TEST_CASE("dual_qp_oracle: symmetric two-point problem has zero bias") {
    const std::vector<std::vector<double>> x = {{-1.0}, {1.0}};
    const std::vector<int> y = {-1, 1};
    SvmConfig config;
    config.cost = 10.0;
    config.gamma = 0.5;
    const std::vector<double> decisions = dual_qp_oracle(x, y, config);
    CHECK(decisions[0] == Catch::Approx(-decisions[1]).margin(1e-6));
    CHECK(decisions[0] < 0.0);
    CHECK(decisions[1] > 0.0);
}

TEST_CASE("dual_qp_oracle: growing cost drives hinge violations to zero on separable data") {
    const std::vector<std::vector<double>> x = {{-2.0, 0.0}, {-1.5, 1.0}, {1.5, -0.5}, {2.0, 0.5}};
    const std::vector<int> y = {-1, -1, 1, 1};
    double previous_hinge = std::numeric_limits<double>::infinity();
    for (const double cost : {0.1, 1.0, 10.0, 100.0}) {
        SvmConfig config;
        config.cost = cost;
        config.gamma = 0.5;
        const std::vector<double> decisions = dual_qp_oracle(x, y, config);
        double hinge = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            hinge += std::max(0.0, 1.0 - static_cast<double>(y[k]) * decisions[k]);
        CHECK(hinge <= previous_hinge + 1e-9);
        previous_hinge = hinge;
    }
    CHECK(previous_hinge <= 1e-2);
}

TEST_CASE("dual_qp_oracle: input validation") {
    SvmConfig config;
    const std::vector<std::vector<double>> seven(7, std::vector<double>{0.0});
    const std::vector<int> y7 = {1, -1, 1, -1, 1, -1, 1};
    CHECK_THROWS_AS(dual_qp_oracle(seven, y7, config), std::invalid_argument);
    const std::vector<std::vector<double>> x = {{0.0}, {1.0}};
    const std::vector<int> same = {1, 1};
    CHECK_THROWS_AS(dual_qp_oracle(x, same, config), input_error);
}

TEST_CASE("write_synth_dataset: files round-trip through the normal ingestion path") {
    const SynthSpec spec = basic_spec();
    const auto examples = generate(spec);
    for (const std::string format : {"pts", "csv"}) {
        testutil::TempDir dir("synthio_" + format);
        const auto manifest_path =
            write_synth_dataset(examples, spec.landmark_count, dir.path(), format);
        const Dataset loaded = load_manifest(manifest_path);
        REQUIRE(loaded.examples.size() == examples.size());
        CHECK(loaded.landmark_count == spec.landmark_count);
        for (std::size_t k = 0; k < examples.size(); ++k) {
            CHECK(loaded.examples[k].id == examples[k].id);
            CHECK(loaded.examples[k].label == examples[k].label);
            CHECK(loaded.examples[k].neutral == examples[k].neutral);
            CHECK(loaded.examples[k].apex == examples[k].apex);
        }
    }
}
