/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/parallel.hpp
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

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fsel {

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<std::size_t>(hw);
}

/// Runs fn(k) for every k in [0, count) over disjoint contiguous chunks,
/// one thread per chunk. Each index is processed by exactly one thread and
/// fn must only write state owned by its index, so results are identical
/// for any thread count. The first exception (in index order of chunks) is
/// rethrown after all workers join.
template <typename Fn>
inline void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (count == 0)
        return;
    if (threads <= 1 || count == 1) {
        for (std::size_t k = 0; k < count; ++k)
            fn(k);
        return;
    }
    const std::size_t workers = threads < count ? threads : count;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * count / workers;
        const std::size_t end = (w + 1) * count / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t k = begin; k < end; ++k)
                    fn(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);
}

} // namespace fsel
