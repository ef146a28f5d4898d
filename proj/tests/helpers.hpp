/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: tests/helpers.hpp
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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "fsel/features.hpp"
#include "fsel/landmarks.hpp"
#include "fsel/rng.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("fsel_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline fsel::LandmarkFrame make_frame(const std::vector<std::pair<double, double>>& coords) {
    fsel::LandmarkFrame frame;
    for (const auto& [x, y] : coords)
        frame.points.push_back(fsel::Point{x, y});
    return frame;
}

/// Frame with integer-valued coordinates, so translation arithmetic is exact.
inline fsel::LandmarkFrame random_int_frame(fsel::Rng& rng, std::size_t count, int lo, int hi) {
    fsel::LandmarkFrame frame;
    const auto range = static_cast<std::uint64_t>(hi - lo + 1);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = static_cast<double>(lo + static_cast<int>(fsel::uniform_below(rng, range)));
        const double y = static_cast<double>(lo + static_cast<int>(fsel::uniform_below(rng, range)));
        frame.points.push_back(fsel::Point{x, y});
    }
    return frame;
}

inline fsel::LandmarkFrame translated(const fsel::LandmarkFrame& frame, double tx, double ty) {
    fsel::LandmarkFrame out = frame;
    for (fsel::Point& p : out.points) {
        p.x += tx;
        p.y += ty;
    }
    return out;
}

/// Gaussian blobs around axis-aligned class centers, as plain vectors.
struct Blobs {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

inline Blobs make_blobs(std::size_t classes, std::size_t per_class, std::size_t dim,
                        double separation, double spread, std::uint64_t seed) {
    fsel::Rng rng(seed);
    Blobs blobs;
    for (std::size_t cls = 0; cls < classes; ++cls) {
        for (std::size_t e = 0; e < per_class; ++e) {
            std::vector<double> row(dim, 0.0);
            row[cls % dim] = separation;
            for (double& v : row)
                v += fsel::gaussian(rng) * spread;
            blobs.x.push_back(std::move(row));
            blobs.y.push_back(static_cast<int>(cls));
        }
    }
    return blobs;
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
/// Test-only; independent of any library numerics.
inline double min_eigenvalue_symmetric(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += m[i][j] * m[i][j];
        if (off < 1e-24)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-18)
                    continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p];
                    const double mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k];
                    const double mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    double min_eig = m[0][0];
    for (std::size_t k = 1; k < n; ++k)
        min_eig = std::min(min_eig, m[k][k]);
    return min_eig;
}

} // namespace testutil
