/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/synth.hpp
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
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/features.hpp"
#include "fsel/io.hpp"
#include "fsel/landmarks.hpp"
#include "fsel/rng.hpp"
#include "fsel/selection.hpp"
#include "fsel/svm.hpp"

namespace fsel {

/// A feature planted into synthetic data: the target pair/axis and the mean
/// apex displacement per class. Realized by moving the pair's endpoints in
/// opposite directions (j by +mean/2, i by -mean/2), which makes the target
/// feature carry the full displacement while any other pair sharing an
/// endpoint sees only half of it.
struct PlantedFeature {
    FeatureIndex feature;
    std::vector<double> class_means; // one mean per class code
};

struct SynthSpec {
    std::size_t landmark_count = 20;
    std::size_t class_count = 7;
    std::size_t examples_per_class = 40;
    std::vector<PlantedFeature> planted;
    double noise_sigma = 0.0; // gaussian noise on every apex coordinate
    std::uint64_t seed = 0;
};

inline void validate(const SynthSpec& spec) {
    if (spec.landmark_count < 2)
        throw std::invalid_argument("synth: need at least 2 landmarks");
    if (spec.class_count < 1 || spec.class_count > kClassCount)
        throw std::invalid_argument("synth: class_count must be 1.." +
                                    std::to_string(kClassCount));
    if (spec.examples_per_class < 1)
        throw std::invalid_argument("synth: need at least 1 example per class");
    if (spec.noise_sigma < 0.0)
        throw std::invalid_argument("synth: noise_sigma must be nonnegative");
    for (const PlantedFeature& planted : spec.planted) {
        flat_index(planted.feature, spec.landmark_count); // bounds check
        if (planted.class_means.size() != spec.class_count)
            throw std::invalid_argument("synth: planted feature needs one mean per class");
    }
}

/// Generates labeled neutral/apex pairs. Neutral frames are a fixed circle
/// layout plus a small per-coordinate jitter; apex frames add the planted
/// per-class displacements and gaussian noise on every coordinate. The
/// neutral jitter cancels out of the delta features by construction, so
/// with noise_sigma = 0 a planted feature's delta equals its class mean
/// exactly. Note that displacing a landmark also shifts every other pair
/// sharing it (at half strength under the split displacement); pools that
/// must exclude such byproducts can be built with noise_pool().
inline std::vector<SequenceExample> generate(const SynthSpec& spec) {
    validate(spec);
    const std::size_t n = spec.landmark_count;
    LandmarkFrame base;
    base.points.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(k) /
                             static_cast<double>(n);
        base.points[k] = Point{200.0 + 100.0 * std::cos(angle), 200.0 + 100.0 * std::sin(angle)};
    }

    Rng rng(spec.seed);
    std::vector<SequenceExample> examples;
    examples.reserve(spec.class_count * spec.examples_per_class);
    for (std::size_t cls = 0; cls < spec.class_count; ++cls) {
        for (std::size_t e = 0; e < spec.examples_per_class; ++e) {
            SequenceExample example;
            example.id = "ex" + std::to_string(cls) + "_" + std::to_string(e);
            example.subject = "s" + std::to_string(cls) + "_" + std::to_string(e);
            example.label = static_cast<ExpressionLabel>(cls);
            example.neutral = base;
            for (Point& p : example.neutral.points) {
                p.x += uniform_real(rng, -2.0, 2.0);
                p.y += uniform_real(rng, -2.0, 2.0);
            }
            example.apex = example.neutral;
            for (const PlantedFeature& planted : spec.planted) {
                const double mean = planted.class_means[cls];
                Point& lo = example.apex.points[planted.feature.i];
                Point& hi = example.apex.points[planted.feature.j];
                if (planted.feature.axis == Axis::horizontal) {
                    lo.x -= mean / 2.0;
                    hi.x += mean / 2.0;
                } else {
                    lo.y -= mean / 2.0;
                    hi.y += mean / 2.0;
                }
            }
            if (spec.noise_sigma > 0.0) {
                for (Point& p : example.apex.points) {
                    p.x += gaussian(rng) * spec.noise_sigma;
                    p.y += gaussian(rng) * spec.noise_sigma;
                }
            }
            examples.push_back(std::move(example));
        }
    }
    return examples;
}

/// Standard planted layout: feature t is the pair (2t, 2t+1) on the
/// horizontal axis, displaced by +displacement for class (t mod K) and
/// -displacement/(K-1) for everyone else. The signed, zero-sum pattern
/// keeps each feature informative through its sign even after the
/// projected vector is L2-normalized, so planted features win over their
/// half-strength byproducts under moderate noise.
inline std::vector<PlantedFeature> default_planted(std::size_t landmark_count,
                                                   std::size_t class_count, std::size_t count,
                                                   double displacement) {
    if (2 * count > landmark_count)
        throw std::invalid_argument("default_planted: need 2 landmarks per planted feature");
    if (class_count < 2)
        throw std::invalid_argument("default_planted: need at least 2 classes");
    std::vector<PlantedFeature> planted;
    const double rest = -displacement / static_cast<double>(class_count - 1);
    for (std::size_t t = 0; t < count; ++t) {
        PlantedFeature f;
        f.feature = FeatureIndex{2 * t, 2 * t + 1, Axis::horizontal};
        f.class_means.assign(class_count, rest);
        f.class_means[t % class_count] = displacement;
        planted.push_back(std::move(f));
    }
    return planted;
}

/// The first `count` flat indices whose landmark pair touches no planted
/// landmark. These features carry jitter only, no class signal at all.
inline std::vector<std::size_t> noise_pool(std::size_t landmark_count,
                                           std::span<const PlantedFeature> planted,
                                           std::size_t count) {
    std::unordered_set<std::size_t> touched;
    for (const PlantedFeature& f : planted) {
        touched.insert(f.feature.i);
        touched.insert(f.feature.j);
    }
    std::vector<std::size_t> pool;
    const std::size_t dim = feature_dimension(landmark_count);
    for (std::size_t flat = 0; flat < dim && pool.size() < count; ++flat) {
        const FeatureIndex f = feature_from_flat(flat, landmark_count);
        if (!touched.count(f.i) && !touched.count(f.j))
            pool.push_back(flat);
    }
    if (pool.size() < count)
        throw std::invalid_argument("noise_pool: only " + std::to_string(pool.size()) +
                                    " untouched features available, need " + std::to_string(count));
    return pool;
}

/// Exhaustive oracle for the greedy search: scores every subset of
/// `subset_size` features from `pool` with the same split and scorer the
/// greedy search uses, and returns the global optimum. Ties resolve to the
/// lexicographically smallest index list. Enumeration bounds are hard
/// errors, never silent truncation.
inline std::pair<std::vector<std::size_t>, double>
exhaustive_best_subset(const FeatureMatrix& features, std::size_t subset_size,
                       std::span<const std::size_t> pool, const SelectionConfig& config) {
    validate(config);
    if (subset_size < 1 || subset_size > 3)
        throw std::invalid_argument("exhaustive_best_subset: subset_size must be 1..3");
    if (pool.size() > 64)
        throw std::invalid_argument("exhaustive_best_subset: pool larger than 64 features");
    if (pool.size() < subset_size)
        throw std::invalid_argument("exhaustive_best_subset: pool smaller than subset_size");
    std::vector<std::size_t> sorted_pool(pool.begin(), pool.end());
    std::sort(sorted_pool.begin(), sorted_pool.end());
    detail::check_flat_subset(sorted_pool, features.dimension());

    const Split split = stratified_split(features.labels, config.train_ratio, config.seed);

    std::vector<std::size_t> pick(subset_size);
    for (std::size_t k = 0; k < subset_size; ++k)
        pick[k] = k;
    std::vector<std::size_t> best_subset;
    double best_accuracy = -1.0;
    std::vector<std::size_t> attempt(subset_size);
    while (true) {
        for (std::size_t k = 0; k < subset_size; ++k)
            attempt[k] = sorted_pool[pick[k]];
        const double accuracy = score_subset(features, attempt, split, config.svm);
        if (accuracy > best_accuracy) { // strict: first max is lexicographically smallest
            best_accuracy = accuracy;
            best_subset = attempt;
        }
        // next combination in lexicographic order
        std::size_t k = subset_size;
        while (k > 0 && pick[k - 1] == sorted_pool.size() - subset_size + (k - 1))
            --k;
        if (k == 0)
            break;
        ++pick[k - 1];
        for (std::size_t m = k; m < subset_size; ++m)
            pick[m] = pick[m - 1] + 1;
    }
    return {best_subset, best_accuracy};
}

/// Independent reference solver for the binary SVM dual on tiny problems
/// (at most 6 points): projected gradient descent with exact projection
/// onto the box-and-hyperplane feasible set, run to a small duality gap.
/// Shares no solver code with the production trainer. Returns the decision
/// values on the training points themselves.
inline std::vector<double> dual_qp_oracle(const std::vector<std::vector<double>>& X,
                                          std::span<const int> y, const SvmConfig& config) {
    validate(config);
    const std::size_t n = X.size();
    if (n == 0 || n > 6)
        throw std::invalid_argument("dual_qp_oracle: handles 1..6 points");
    if (y.size() != n)
        throw std::invalid_argument("dual_qp_oracle: X and y sizes differ");
    bool has_pos = false, has_neg = false;
    for (const int label : y) {
        if (label == 1)
            has_pos = true;
        else if (label == -1)
            has_neg = true;
        else
            throw std::invalid_argument("dual_qp_oracle: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw input_error("dual_qp_oracle: need both classes");

    const double cost = config.cost;
    const double gamma = config.gamma ? *config.gamma : resolve_gamma(X);
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            q[i * n + j] = static_cast<double>(y[i]) * static_cast<double>(y[j]) *
                           rbf_kernel(X[i], X[j], gamma);

    // Projection of v onto {0 <= a <= C, y'a = 0}: clip(v - lambda*y) with
    // lambda found by bisection (the constraint residual is monotone in
    // lambda).
    const auto project = [&](const std::vector<double>& v_in) {
        std::vector<double> v = v_in;
        const auto residual = [&](double lambda) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double clipped =
                    std::clamp(v[k] - lambda * static_cast<double>(y[k]), 0.0, cost);
                sum += static_cast<double>(y[k]) * clipped;
            }
            return sum;
        };
        double max_abs = cost;
        for (const double value : v)
            max_abs = std::max(max_abs, std::abs(value));
        double lo = -(max_abs + cost + 1.0);
        double hi = max_abs + cost + 1.0;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = (lo + hi) / 2.0;
            if (residual(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double lambda = (lo + hi) / 2.0;
        for (std::size_t k = 0; k < n; ++k)
            v[k] = std::clamp(v[k] - lambda * static_cast<double>(y[k]), 0.0, cost);
        return v;
    };

    // Lipschitz bound for the gradient: max row sum of |Q| (Gershgorin).
    double lipschitz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            row += std::abs(q[i * n + j]);
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / std::max(lipschitz, 1e-12);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n), trial(n), u(n);
    double bias = 0.0;

    // u_i = sum_j alpha_j y_j K_ij = y_i * (Q alpha)_i
    const auto compute_u = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                sum += q[i * n + j] * alpha[j];
            u[i] = static_cast<double>(y[i]) * sum;
        }
    };

    const auto duality_gap = [&]() {
        // dual objective
        double quad = 0.0;
        double lin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lin += alpha[i];
            for (std::size_t j = 0; j < n; ++j)
                quad += alpha[i] * alpha[j] * q[i * n + j];
        }
        const double dual = lin - 0.5 * quad;
        compute_u();
        // best bias for the current alpha: the hinge total is piecewise
        // linear in b, so a minimizer lies on a breakpoint; average the
        // minimizing breakpoints to center within a flat stretch
        double best_loss = std::numeric_limits<double>::infinity();
        double bias_sum = 0.0;
        std::size_t bias_count = 0;
        for (std::size_t c = 0; c < n; ++c) {
            const double candidate = static_cast<double>(y[c]) - u[c];
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                loss += std::max(0.0, 1.0 - static_cast<double>(y[i]) * (u[i] + candidate));
            if (loss < best_loss - 1e-12) {
                best_loss = loss;
                bias_sum = candidate;
                bias_count = 1;
            } else if (std::abs(loss - best_loss) <= 1e-12) {
                bias_sum += candidate;
                ++bias_count;
            }
        }
        bias = bias_count == 0 ? 0.0 : bias_sum / static_cast<double>(bias_count);
        double primal = 0.5 * quad;
        for (std::size_t i = 0; i < n; ++i)
            primal += cost * std::max(0.0, 1.0 - static_cast<double>(y[i]) * (u[i] + bias));
        return primal - dual;
    };

    // Accelerated projected gradient (FISTA): the momentum term brings the
    // gap below 1e-8 in far fewer sweeps than plain projected gradient.
    std::vector<double> momentum = alpha;
    double t_prev = 1.0;
    for (std::size_t iter = 0; iter < 2'000'000; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double g = -1.0;
            for (std::size_t j = 0; j < n; ++j)
                g += q[i * n + j] * momentum[j];
            grad[i] = g;
        }
        for (std::size_t i = 0; i < n; ++i)
            trial[i] = momentum[i] - step * grad[i];
        std::vector<double> next = project(trial);
        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev)) / 2.0;
        const double blend = (t_prev - 1.0) / t_next;
        for (std::size_t i = 0; i < n; ++i)
            momentum[i] = next[i] + blend * (next[i] - alpha[i]);
        alpha = std::move(next);
        t_prev = t_next;
        if (iter % 128 == 127) {
            if (duality_gap() <= 1e-8)
                break;
        }
    }
    duality_gap(); // refresh u and bias at the final iterate

    std::vector<double> decisions(n);
    for (std::size_t i = 0; i < n; ++i)
        decisions[i] = u[i] + bias;
    return decisions;
}

// --- writing synthetic datasets to disk ------------------------------------

/// Writes the examples as frame files plus a manifest, so synthetic data
/// flows through the same ingestion path as real data. `format` is "pts"
/// or "csv". Returns the manifest path.
inline std::filesystem::path write_synth_dataset(const std::vector<SequenceExample>& examples,
                                                 std::size_t landmark_count,
                                                 const std::filesystem::path& out_dir,
                                                 const std::string& format = "pts") {
    if (format != "pts" && format != "csv")
        throw input_error("write_synth_dataset: format must be pts or csv");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "frames");
    DatasetManifest manifest;
    manifest.landmark_count = landmark_count;
    for (const SequenceExample& example : examples) {
        const std::string neutral_name = "frames/" + example.id + "_neutral." + format;
        const std::string apex_name = "frames/" + example.id + "_apex." + format;
        if (format == "pts") {
            atomic_write_file(out_dir / neutral_name, write_pts(example.neutral));
            atomic_write_file(out_dir / apex_name, write_pts(example.apex));
        } else {
            atomic_write_file(out_dir / neutral_name, write_csv_frame(example.neutral));
            atomic_write_file(out_dir / apex_name, write_csv_frame(example.apex));
        }
        manifest.entries.push_back(ManifestEntry{example.id, example.subject,
                                                 std::string(label_name(example.label)),
                                                 neutral_name, apex_name});
    }
    const fs::path manifest_path = out_dir / "manifest.csv";
    atomic_write_file(manifest_path, write_manifest(manifest));
    return manifest_path;
}

} // namespace fsel
