/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/error.hpp
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

#include <stdexcept>

namespace fsel {

/// Raised for malformed user input: files that fail to parse, references
/// that do not resolve, out-of-domain parameter values. The CLI maps this
/// to a distinct exit code from internal failures.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fsel
