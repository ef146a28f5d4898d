/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/svm.hpp
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
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsel/error.hpp"
#include "fsel/io.hpp"
#include "fsel/text.hpp"

namespace fsel {

/// Solver and kernel settings shared by the binary and multiclass trainers.
struct SvmConfig {
    double cost = 1.0;            // soft-margin box constraint
    std::optional<double> gamma;  // RBF width; empty = 1 / (dim * mean coordinate variance)
    double tolerance = 1e-3;      // KKT stopping threshold for the dual solver
    std::size_t max_passes = 1000; // safety cap: at most max_passes * n working-set updates
    bool calibrate = false;       // fit per-pair sigmoids for posterior estimates
};

inline void validate(const SvmConfig& config) {
    if (!(config.cost > 0.0))
        throw std::invalid_argument("svm: cost must be positive");
    if (config.gamma && !(*config.gamma > 0.0))
        throw std::invalid_argument("svm: gamma must be positive");
    if (!(config.tolerance > 0.0))
        throw std::invalid_argument("svm: tolerance must be positive");
    if (config.max_passes == 0)
        throw std::invalid_argument("svm: max_passes must be at least 1");
}

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size())
        throw std::invalid_argument("rbf_kernel: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    if (!(gamma > 0.0))
        throw std::invalid_argument("rbf_kernel: gamma must be positive");
    double dist_sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        dist_sq += d * d;
    }
    return std::exp(-gamma * dist_sq);
}

/// The usual "scale" heuristic: 1 / (dim * mean per-coordinate population
/// variance). Falls back to 1 when the data is constant.
inline double resolve_gamma(std::span<const std::vector<double>> rows) {
    if (rows.empty() || rows.front().empty())
        return 1.0;
    const std::size_t n = rows.size();
    const std::size_t dim = rows.front().size();
    double variance_sum = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            mean += rows[r][c];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = rows[r][c] - mean;
            var += d * d;
        }
        variance_sum += var / static_cast<double>(n);
    }
    const double scale = static_cast<double>(dim) * (variance_sum / static_cast<double>(dim));
    if (!(scale > 0.0) || !std::isfinite(scale))
        return 1.0;
    return 1.0 / scale;
}

/// A trained binary classifier in dual form.
/// decision(x) = sum_k dual_coefs[k] * K(support_vectors[k], x) + bias,
/// with dual_coefs[k] = alpha_k * y_k.
struct BinarySvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coefs;
    double bias = 0.0;
    double gamma = 0.0;
    double kkt_violation = 0.0; // residual max-violating-pair gap at stop
    bool converged = true;

    double decision(std::span<const double> x) const {
        double sum = 0.0;
        for (std::size_t k = 0; k < support_vectors.size(); ++k)
            sum += dual_coefs[k] * rbf_kernel(support_vectors[k], x, gamma);
        return sum + bias;
    }
};

namespace detail {

struct SmoSolution {
    std::vector<double> alpha;
    double rho = 0.0;
    double kkt_violation = 0.0;
    bool converged = false;
};

/// Sequential minimal optimization on the standard soft-margin dual:
/// minimize 1/2 a'Qa - e'a subject to 0 <= a <= C, y'a = 0, with
/// Q_ij = y_i y_j K_ij. The working pair is the maximal KKT violator
/// (first-order selection; ties go to the lowest index, which keeps the
/// solve deterministic for a fixed input order).
inline SmoSolution solve_smo(const std::vector<std::vector<double>>& X, std::span<const int> y,
                             double cost, double gamma, double tolerance, std::size_t max_passes) {
    const std::size_t n = X.size();
    constexpr double tau = 1e-12;
    constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Problems at this scale (at most a few hundred rows) afford a dense
    // kernel matrix.
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j)
            kernel[i * n + j] = kernel[j * n + i] = rbf_kernel(X[i], X[j], gamma);
    }
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = static_cast<double>(y[i]);

    SmoSolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double>& alpha = sol.alpha;
    std::vector<double> grad(n, -1.0); // gradient of the dual objective

    const std::size_t max_updates = max_passes * n;
    for (std::size_t update = 0; update <= max_updates; ++update) {
        // Maximal violating pair.
        std::size_t i = npos, j = npos;
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double score = -ys[t] * grad[t];
            const bool in_up = y[t] > 0 ? alpha[t] < cost : alpha[t] > 0.0;
            const bool in_low = y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < cost;
            if (in_up && score > up_max) {
                up_max = score;
                i = t;
            }
            if (in_low && score < low_min) {
                low_min = score;
                j = t;
            }
        }
        if (i == npos || j == npos) {
            sol.kkt_violation = 0.0;
            sol.converged = true;
            break;
        }
        sol.kkt_violation = up_max - low_min;
        if (sol.kkt_violation <= tolerance) {
            sol.converged = true;
            break;
        }
        if (update == max_updates)
            break;

        const double k_ii = kernel[i * n + i];
        const double k_jj = kernel[j * n + j];
        const double k_ij = kernel[i * n + j];
        const double alpha_i_old = alpha[i];
        const double alpha_j_old = alpha[j];

        if (y[i] != y[j]) {
            double quad = k_ii + k_jj + 2.0 * k_ij * ys[i] * ys[j];
            if (quad <= 0.0)
                quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0.0) {
                if (alpha[i] > cost) {
                    alpha[i] = cost;
                    alpha[j] = cost - diff;
                }
            } else {
                if (alpha[j] > cost) {
                    alpha[j] = cost;
                    alpha[i] = cost + diff;
                }
            }
        } else {
            double quad = k_ii + k_jj - 2.0 * k_ij;
            if (quad <= 0.0)
                quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > cost) {
                if (alpha[i] > cost) {
                    alpha[i] = cost;
                    alpha[j] = sum - cost;
                }
            } else {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
            }
            if (sum > cost) {
                if (alpha[j] > cost) {
                    alpha[j] = cost;
                    alpha[i] = sum - cost;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        const double delta_i = alpha[i] - alpha_i_old;
        const double delta_j = alpha[j] - alpha_j_old;
        for (std::size_t t = 0; t < n; ++t) {
            const double q_ti = ys[t] * ys[i] * kernel[t * n + i];
            const double q_tj = ys[t] * ys[j] * kernel[t * n + j];
            grad[t] += q_ti * delta_i + q_tj * delta_j;
        }
    }

    // Offset: average y_t * grad_t over free vectors; otherwise the midpoint
    // of the KKT-feasible interval.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double y_grad = ys[t] * grad[t];
        if (alpha[t] >= cost) {
            if (y[t] < 0)
                upper = std::min(upper, y_grad);
            else
                lower = std::max(lower, y_grad);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0)
                upper = std::min(upper, y_grad);
            else
                lower = std::max(lower, y_grad);
        } else {
            free_sum += y_grad;
            ++free_count;
        }
    }
    sol.rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;
    return sol;
}

} // namespace detail

/// Trains a binary soft-margin RBF SVM. Deterministic: a fixed input order
/// and config always produce the same model bit for bit. Hitting the update
/// cap leaves the model usable but marked non-converged (with a warning on
/// stderr), since the cap is a safeguard rather than a failure.
inline BinarySvmModel train_binary(const std::vector<std::vector<double>>& X, std::span<const int> y,
                                   const SvmConfig& config) {
    validate(config);
    if (X.empty())
        throw input_error("train_binary: empty training set");
    if (X.size() != y.size())
        throw std::invalid_argument("train_binary: X and y sizes differ");
    const std::size_t dim = X.front().size();
    bool has_pos = false, has_neg = false;
    for (std::size_t k = 0; k < X.size(); ++k) {
        if (X[k].size() != dim)
            throw std::invalid_argument("train_binary: rows have inconsistent lengths");
        if (y[k] == 1)
            has_pos = true;
        else if (y[k] == -1)
            has_neg = true;
        else
            throw std::invalid_argument("train_binary: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw input_error("train_binary: single-class input (need both +1 and -1 examples)");

    const double gamma = config.gamma ? *config.gamma : resolve_gamma(X);
    const detail::SmoSolution sol =
        detail::solve_smo(X, y, config.cost, gamma, config.tolerance, config.max_passes);
    if (!sol.converged)
        std::cerr << "faceselect: svm solver stopped at the update cap (max_passes="
                  << config.max_passes << ", residual violation " << sol.kkt_violation << ")\n";

    BinarySvmModel model;
    model.gamma = gamma;
    model.bias = -sol.rho;
    model.kkt_violation = sol.kkt_violation;
    model.converged = sol.converged;
    for (std::size_t k = 0; k < X.size(); ++k) {
        if (sol.alpha[k] > 0.0) {
            model.support_vectors.push_back(X[k]);
            model.dual_coefs.push_back(sol.alpha[k] * static_cast<double>(y[k]));
        }
    }
    return model;
}

/// Sigmoid fit on decision values: P(positive | f) = 1 / (1 + exp(a*f + b)).
struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

inline double platt_prob(const PlattParams& params, double decision) {
    const double t = params.a * decision + params.b;
    return t >= 0.0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
}

/// Newton fit of the calibration sigmoid with the usual smoothed targets
/// (n+1)/(n+2) and 1/(n+2), a regularized Hessian, and backtracking line
/// search. Deterministic; no resampling.
inline PlattParams platt_fit(std::span<const double> decisions, std::span<const int> labels) {
    if (decisions.size() != labels.size() || decisions.empty())
        throw std::invalid_argument("platt_fit: need matching, nonempty decision/label arrays");
    double prior1 = 0.0, prior0 = 0.0;
    for (const int y : labels)
        (y > 0 ? prior1 : prior0) += 1.0;
    if (prior1 == 0.0 || prior0 == 0.0)
        throw input_error("platt_fit: need both classes present");

    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    const std::size_t n = decisions.size();
    std::vector<double> target(n);
    for (std::size_t k = 0; k < n; ++k)
        target[k] = labels[k] > 0 ? hi_target : lo_target;

    const auto objective = [&](double a, double b) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double f = a * decisions[k] + b;
            if (f >= 0.0)
                total += target[k] * f + std::log1p(std::exp(-f));
            else
                total += (target[k] - 1.0) * f + std::log1p(std::exp(f));
        }
        return total;
    };

    constexpr double sigma = 1e-12;
    constexpr double min_step = 1e-10;
    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double value = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double f = a * decisions[k] + b;
            double p, q;
            if (f >= 0.0) {
                p = std::exp(-f) / (1.0 + std::exp(-f));
                q = 1.0 / (1.0 + std::exp(-f));
            } else {
                p = 1.0 / (1.0 + std::exp(f));
                q = std::exp(f) / (1.0 + std::exp(f));
            }
            const double d2 = p * q;
            h11 += decisions[k] * decisions[k] * d2;
            h22 += d2;
            h21 += decisions[k] * d2;
            const double d1 = target[k] - p;
            g1 += decisions[k] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5)
            break;
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double slope = g1 * da + g2 * db;
        double step = 1.0;
        while (step >= min_step) {
            const double next_a = a + step * da;
            const double next_b = b + step * db;
            const double next_value = objective(next_a, next_b);
            if (next_value < value + 1e-4 * step * slope) {
                a = next_a;
                b = next_b;
                value = next_value;
                break;
            }
            step /= 2.0;
        }
        if (step < min_step)
            break;
    }
    return PlattParams{a, b};
}

/// One trained class pair. The lower class code maps to label +1, so a
/// positive decision votes for positive_class.
struct PairwiseModel {
    int positive_class = 0;
    int negative_class = 0;
    BinarySvmModel svm;
    std::optional<PlattParams> calibration;
};

/// One-against-one multiclass model: one binary SVM per unordered pair of
/// classes present in the training data, in lexicographic pair order.
struct SvmModel {
    std::vector<int> classes; // sorted distinct class codes seen in training
    std::size_t dimension = 0;
    double gamma = 0.0; // resolved value shared by all pairs
    std::vector<PairwiseModel> pairs;

    std::size_t class_count() const { return classes.size(); }
    bool calibrated() const {
        return !pairs.empty() && pairs.front().calibration.has_value();
    }
};

/// Trains C(K,2) pairwise models over the classes present in y. A class
/// absent from the data contributes no pairs; a present class always has
/// at least one example on its side of each of its pairs by construction.
/// With config.calibrate, each pair also gets a sigmoid fitted on its own
/// training decision values.
inline SvmModel train_multiclass(const std::vector<std::vector<double>>& X, std::span<const int> y,
                                 const SvmConfig& config) {
    validate(config);
    if (X.empty())
        throw input_error("train_multiclass: empty training set");
    if (X.size() != y.size())
        throw std::invalid_argument("train_multiclass: X and y sizes differ");

    SvmModel model;
    model.dimension = X.front().size();
    model.classes.assign(y.begin(), y.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                        model.classes.end());
    if (model.classes.size() < 2)
        throw input_error("train_multiclass: need at least two classes");

    // One gamma for the whole problem so pairwise decisions are comparable.
    model.gamma = config.gamma ? *config.gamma : resolve_gamma(X);
    SvmConfig pair_config = config;
    pair_config.gamma = model.gamma;

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            const int class_a = model.classes[a];
            const int class_b = model.classes[b];
            std::vector<std::vector<double>> pair_x;
            std::vector<int> pair_y;
            for (std::size_t k = 0; k < X.size(); ++k) {
                if (y[k] == class_a) {
                    pair_x.push_back(X[k]);
                    pair_y.push_back(1);
                } else if (y[k] == class_b) {
                    pair_x.push_back(X[k]);
                    pair_y.push_back(-1);
                }
            }
            PairwiseModel pair;
            pair.positive_class = class_a;
            pair.negative_class = class_b;
            pair.svm = train_binary(pair_x, pair_y, pair_config);
            if (config.calibrate) {
                std::vector<double> decisions(pair_x.size());
                for (std::size_t k = 0; k < pair_x.size(); ++k)
                    decisions[k] = pair.svm.decision(pair_x[k]);
                pair.calibration = platt_fit(decisions, pair_y);
            }
            model.pairs.push_back(std::move(pair));
        }
    }
    return model;
}

/// Raw pairwise decision values for x, in the model's pair order.
inline std::vector<double> decision_values(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.dimension)
        throw std::invalid_argument("predict: input has length " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(model.dimension));
    std::vector<double> values;
    values.reserve(model.pairs.size());
    for (const PairwiseModel& pair : model.pairs)
        values.push_back(pair.svm.decision(x));
    return values;
}

/// Majority vote over pairwise decisions. Ties are broken by the larger
/// sum of |decision| over the pairs each tied class won, then by the lowest
/// class code.
inline int predict(const SvmModel& model, std::span<const double> x) {
    const std::vector<double> decisions = decision_values(model, x);
    std::vector<std::size_t> votes(model.classes.size(), 0);
    std::vector<double> won_margin(model.classes.size(), 0.0);
    for (std::size_t p = 0; p < model.pairs.size(); ++p) {
        const PairwiseModel& pair = model.pairs[p];
        const double d = decisions[p];
        const int winner = d > 0.0 ? pair.positive_class : pair.negative_class;
        const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), winner);
        const std::size_t idx = static_cast<std::size_t>(it - model.classes.begin());
        votes[idx] += 1;
        won_margin[idx] += std::abs(d);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < model.classes.size(); ++c) {
        if (votes[c] > votes[best] ||
            (votes[c] == votes[best] && won_margin[c] > won_margin[best]))
            best = c;
        // equal votes and equal margin: keep the lower class code
    }
    return model.classes[best];
}

namespace detail {

/// Couples pairwise probabilities r[a][b] = P(class a | a or b) into a
/// posterior over all classes by the standard iterative normalization of
/// the pairwise system, then normalizes exactly.
inline std::vector<double> couple_pairwise(const std::vector<std::vector<double>>& r) {
    const std::size_t k = r.size();
    std::vector<std::vector<double>> q(k, std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
            if (j == t)
                continue;
            q[t][t] += r[j][t] * r[j][t];
            q[t][j] = -r[j][t] * r[t][j];
        }
    }
    std::vector<double> p(k, 1.0 / static_cast<double>(k));
    std::vector<double> qp(k, 0.0);
    const double eps = 0.005 / static_cast<double>(k);
    const std::size_t max_iter = std::max<std::size_t>(100, k);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double p_q_p = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            qp[t] = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                qp[t] += q[t][j] * p[j];
            p_q_p += p[t] * qp[t];
        }
        double max_err = 0.0;
        for (std::size_t t = 0; t < k; ++t)
            max_err = std::max(max_err, std::abs(qp[t] - p_q_p));
        if (max_err < eps)
            break;
        for (std::size_t t = 0; t < k; ++t) {
            const double diff = (-qp[t] + p_q_p) / q[t][t];
            p[t] += diff;
            p_q_p = (p_q_p + diff * (diff * q[t][t] + 2.0 * qp[t])) / ((1.0 + diff) * (1.0 + diff));
            for (std::size_t j = 0; j < k; ++j) {
                qp[j] = (qp[j] + diff * q[t][j]) / (1.0 + diff);
                p[j] /= (1.0 + diff);
            }
        }
    }
    double total = 0.0;
    for (const double v : p)
        total += v;
    for (double& v : p)
        v /= total;
    return p;
}

} // namespace detail

/// Posterior probabilities over model.classes (same order), from the
/// calibrated pairwise sigmoids. Sums to 1 up to rounding. Pairwise
/// probabilities are clamped away from 0 and 1 for numerical stability.
inline std::vector<double> predict_proba(const SvmModel& model, std::span<const double> x) {
    if (!model.calibrated())
        throw input_error("predict_proba: model has no calibration (train with calibrate=true)");
    const std::size_t k = model.classes.size();
    const std::vector<double> decisions = decision_values(model, x);
    std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
    std::size_t p_index = 0;
    constexpr double clamp = 1e-7;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b, ++p_index) {
            const PairwiseModel& pair = model.pairs[p_index];
            double prob = platt_prob(*pair.calibration, decisions[p_index]);
            prob = std::min(1.0 - clamp, std::max(clamp, prob));
            r[a][b] = prob;
            r[b][a] = 1.0 - prob;
        }
    }
    if (k == 2) {
        // The coupled solution for two classes is the pairwise probability
        // itself.
        return {r[0][1], r[1][0]};
    }
    return detail::couple_pairwise(r);
}

// --- model persistence ------------------------------------------------
//
// Self-describing text format. All numbers are printed in shortest
// round-trip form, so save -> load -> predict is bit-identical to the
// in-memory model.

inline std::string model_to_string(const SvmModel& model) {
    std::string out = "faceselect svm model v1\n";
    out += "classes=";
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        if (k)
            out += ',';
        out += std::to_string(model.classes[k]);
    }
    out += '\n';
    out += "dimension=" + std::to_string(model.dimension) + '\n';
    out += "gamma=" + format_double(model.gamma) + '\n';
    out += std::string("calibrated=") + (model.calibrated() ? "1" : "0") + '\n';
    out += "pairs=" + std::to_string(model.pairs.size()) + '\n';
    for (const PairwiseModel& pair : model.pairs) {
        out += "pair=" + std::to_string(pair.positive_class) + ',' +
               std::to_string(pair.negative_class) + '\n';
        out += "bias=" + format_double(pair.svm.bias) + '\n';
        out += "kkt=" + format_double(pair.svm.kkt_violation) + '\n';
        out += std::string("converged=") + (pair.svm.converged ? "1" : "0") + '\n';
        if (pair.calibration)
            out += "platt=" + format_double(pair.calibration->a) + ',' +
                   format_double(pair.calibration->b) + '\n';
        out += "sv=" + std::to_string(pair.svm.support_vectors.size()) + '\n';
        for (std::size_t k = 0; k < pair.svm.support_vectors.size(); ++k) {
            out += format_double(pair.svm.dual_coefs[k]);
            for (const double v : pair.svm.support_vectors[k]) {
                out += ' ';
                out += format_double(v);
            }
            out += '\n';
        }
    }
    out += "end\n";
    return out;
}

inline SvmModel model_from_string(std::string_view text) {
    const std::vector<std::string_view> lines = split_lines(text);
    std::size_t at = 0;
    const auto next_line = [&]() -> std::string_view {
        if (at >= lines.size())
            throw input_error("svm model: truncated file");
        return trim(lines[at++]);
    };
    const auto expect_kv = [&](std::string_view key) -> std::string_view {
        const std::string_view line = next_line();
        if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != '=')
            throw input_error("svm model: line " + std::to_string(at) + ": expected \"" +
                              std::string(key) + "=...\"");
        return line.substr(key.size() + 1);
    };
    const auto to_double = [&](std::string_view s) {
        const auto v = parse_double(s);
        if (!v)
            throw input_error("svm model: line " + std::to_string(at) + ": bad number \"" +
                              std::string(s) + "\"");
        return *v;
    };

    if (next_line() != "faceselect svm model v1")
        throw input_error("svm model: unrecognized signature line");
    SvmModel model;
    for (const std::string_view c : split(expect_kv("classes"), ',')) {
        const auto v = parse_uint(trim(c));
        if (!v)
            throw input_error("svm model: bad class list");
        model.classes.push_back(static_cast<int>(*v));
    }
    const auto dim = parse_uint(expect_kv("dimension"));
    if (!dim)
        throw input_error("svm model: bad dimension");
    model.dimension = static_cast<std::size_t>(*dim);
    model.gamma = to_double(expect_kv("gamma"));
    const bool calibrated = expect_kv("calibrated") == "1";
    const auto pair_total = parse_uint(expect_kv("pairs"));
    if (!pair_total)
        throw input_error("svm model: bad pair count");

    for (std::size_t p = 0; p < *pair_total; ++p) {
        PairwiseModel pair;
        const auto pair_ids = split(expect_kv("pair"), ',');
        if (pair_ids.size() != 2)
            throw input_error("svm model: bad pair line");
        pair.positive_class = static_cast<int>(to_double(pair_ids[0]));
        pair.negative_class = static_cast<int>(to_double(pair_ids[1]));
        pair.svm.gamma = model.gamma;
        pair.svm.bias = to_double(expect_kv("bias"));
        pair.svm.kkt_violation = to_double(expect_kv("kkt"));
        pair.svm.converged = expect_kv("converged") == "1";
        if (calibrated) {
            const auto platt = split(expect_kv("platt"), ',');
            if (platt.size() != 2)
                throw input_error("svm model: bad platt line");
            pair.calibration = PlattParams{to_double(platt[0]), to_double(platt[1])};
        }
        const auto sv_count = parse_uint(expect_kv("sv"));
        if (!sv_count)
            throw input_error("svm model: bad sv count");
        for (std::size_t s = 0; s < *sv_count; ++s) {
            const std::string_view line = next_line();
            std::vector<double> row;
            std::size_t start = 0;
            bool first = true;
            for (std::size_t k = 0; k <= line.size(); ++k) {
                if (k == line.size() || line[k] == ' ') {
                    const std::string_view token = line.substr(start, k - start);
                    if (!token.empty()) {
                        const double v = to_double(token);
                        if (first) {
                            pair.svm.dual_coefs.push_back(v);
                            first = false;
                        } else {
                            row.push_back(v);
                        }
                    }
                    start = k + 1;
                }
            }
            if (first || row.size() != model.dimension)
                throw input_error("svm model: line " + std::to_string(at) +
                                  ": bad support vector row");
            pair.svm.support_vectors.push_back(std::move(row));
        }
        model.pairs.push_back(std::move(pair));
    }
    if (next_line() != "end")
        throw input_error("svm model: missing end marker");
    return model;
}

inline void save_model(const SvmModel& model, const std::filesystem::path& path) {
    atomic_write_file(path, model_to_string(model));
}

inline SvmModel load_model(const std::filesystem::path& path) {
    return model_from_string(read_file(path));
}

} // namespace fsel
