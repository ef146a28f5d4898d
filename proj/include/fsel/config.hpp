/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/config.hpp
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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "fsel/error.hpp"
#include "fsel/io.hpp"
#include "fsel/text.hpp"

namespace fsel {

/// Flat `key=value` config file. Lines starting with '#' and blank lines
/// are ignored; keys are serialized sorted, numbers in shortest round-trip
/// form, so a resolved config re-reads to exactly the same values.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig config;
        const auto lines = split_lines(text);
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const std::string_view line = trim(lines[k]);
            if (line.empty() || line.front() == '#')
                continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw input_error("config: line " + std::to_string(k + 1) +
                                  ": expected \"key=value\"");
            config.values_[std::string(trim(line.substr(0, eq)))] =
                std::string(trim(line.substr(eq + 1)));
        }
        return config;
    }

    static KeyValueConfig load(const std::filesystem::path& path) {
        try {
            return parse(read_file(path));
        } catch (const input_error& err) {
            throw input_error(path.string() + ": " + err.what());
        }
    }

    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }

    const std::string& get(std::string_view key) const {
        const auto it = values_.find(std::string(key));
        if (it == values_.end())
            throw input_error("config: missing key \"" + std::string(key) + "\"");
        return it->second;
    }

    double get_double(std::string_view key) const {
        const auto v = parse_double(get(key));
        if (!v)
            throw input_error("config: key \"" + std::string(key) + "\" is not a number");
        return *v;
    }

    std::uint64_t get_uint(std::string_view key) const {
        const auto v = parse_uint(get(key));
        if (!v)
            throw input_error("config: key \"" + std::string(key) + "\" is not an unsigned integer");
        return *v;
    }

    bool get_bool(std::string_view key) const {
        const std::string& v = get(key);
        if (v == "true" || v == "1")
            return true;
        if (v == "false" || v == "0")
            return false;
        throw input_error("config: key \"" + std::string(key) + "\" is not a boolean");
    }

    void set(std::string_view key, std::string_view value) {
        values_[std::string(key)] = std::string(value);
    }
    void set_double(std::string_view key, double value) { set(key, format_double(value)); }
    void set_uint(std::string_view key, std::uint64_t value) { set(key, std::to_string(value)); }
    void set_bool(std::string_view key, bool value) { set(key, value ? "true" : "false"); }

    std::string to_string() const {
        std::string out;
        for (const auto& [key, value] : values_)
            out += key + "=" + value + "\n";
        return out;
    }

    void save(const std::filesystem::path& path) const { atomic_write_file(path, to_string()); }

    friend bool operator==(const KeyValueConfig&, const KeyValueConfig&) = default;

private:
    std::map<std::string, std::string> values_;
};

} // namespace fsel
