/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/text.hpp
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

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsel {

/// Shortest decimal form that parses back to exactly the same double.
/// Used everywhere a number crosses a file boundary so that every text
/// format round-trips bit-exactly.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty())
        return std::nullopt;
    double value{};
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        return std::nullopt;
    return value;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
    if (s.empty())
        return std::nullopt;
    std::uint64_t value{};
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        return std::nullopt;
    return value;
}

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n';
    };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

/// Splits on a separator, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k) {
        if (k == s.size() || s[k] == sep) {
            out.push_back(s.substr(start, k - start));
            start = k + 1;
        }
    }
    return out;
}

/// Splits into lines on '\n', stripping one trailing '\r' per line so both
/// LF and CRLF inputs parse the same. A final newline does not produce an
/// extra empty line.
inline std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> out = split(s, '\n');
    if (!out.empty() && out.back().empty())
        out.pop_back();
    for (auto& line : out)
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
    return out;
}

} // namespace fsel
