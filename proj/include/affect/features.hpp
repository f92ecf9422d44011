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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "affect/corpus.hpp"

namespace affect {

inline constexpr std::size_t kDefaultFeatureDim = std::size_t{ 1 } << 16;

/// Sparse feature vector; entries sorted by index with no duplicates.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::size_t dim = 0;

    friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

/// Lowercased word tokens. Word characters are ASCII letters, digits,
/// apostrophes and any byte >= 0x80, so UTF-8 words stay intact.
[[nodiscard]] std::vector<std::string_view> tokenize(std::string_view text);

/// Hashed unigram counts in [1, dim) plus a bias feature at index 0.
/// `dim` must be at least 2.
[[nodiscard]] FeatureVector featurize(std::string_view text, std::size_t dim = kDefaultFeatureDim);

/// Input dimension of the CRC scorer for per-text dimension `dim`.
[[nodiscard]] constexpr std::size_t crc_input_dim(std::size_t dim) noexcept { return 2 * dim + kAllEmotions.size(); }

/// CRC input: [text1 block | text2 block | focus one-hot]. Token hashes in both
/// text blocks are salted with the focus emotion, so word weights are focus-specific.
[[nodiscard]] FeatureVector crc_features(std::string_view text1, std::string_view text2, Emotion focus,
                                         std::size_t dim = kDefaultFeatureDim);

}  // namespace affect
