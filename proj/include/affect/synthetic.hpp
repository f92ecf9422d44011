/*
 * Copyright 2026 The Affect Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "affect/corpus.hpp"

namespace affect {

/// Toy corpus whose labels are linearly separable from the text: every
/// (emotion, value > 0) pair has its own keyword, and value 0 has none. Five
/// emotions (no disgust), matching the English label set. Ids are
/// `<prefix>-NNNN`.
[[nodiscard]] Dataset make_separable_corpus(Track track, std::size_t n, std::uint64_t seed,
                                            std::string_view id_prefix = "syn", std::string_view language = "eng");

/// Keyword carrying `value` for `emotion` (value 1 for track A).
[[nodiscard]] std::string_view separable_keyword(Track track, Emotion emotion, int value);

}  // namespace affect
