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

#include "affect/features.hpp"

#include "affect/error.hpp"
#include "affect/rng.hpp"
#include "affect/text.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace affect {

namespace {

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}

void add_block(std::map<std::uint32_t, double> &counts, std::string_view text, std::size_t dim, std::size_t offset,
               std::uint64_t basis) {
    counts[static_cast<std::uint32_t>(offset)] = 1.0;
    for (const std::string_view token : tokenize(text)) {
        const std::uint64_t h = fnv1a(to_lower(token), basis);
        counts[static_cast<std::uint32_t>(offset + 1 + h % (dim - 1))] += 1.0;
    }
}

FeatureVector from_counts(const std::map<std::uint32_t, double> &counts, std::size_t dim) {
    FeatureVector x;
    x.dim = dim;
    x.entries.assign(counts.begin(), counts.end());
    return x;
}

void require_dim(std::size_t dim) {
    if (dim < 2 || dim > (std::size_t{ 1 } << 30)) {
        throw_config("InvalidFeatureDim", "feature dimension must be in [2, 2^30], got " + std::to_string(dim));
    }
}

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && !is_word_byte(text[pos])) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && is_word_byte(text[pos])) {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(text.substr(start, pos - start));
        }
    }
    return tokens;
}

FeatureVector featurize(std::string_view text, std::size_t dim) {
    require_dim(dim);
    std::map<std::uint32_t, double> counts;
    add_block(counts, text, dim, 0, 0xcbf29ce484222325ULL);
    return from_counts(counts, dim);
}

FeatureVector crc_features(std::string_view text1, std::string_view text2, Emotion focus, std::size_t dim) {
    require_dim(dim);
    std::map<std::uint32_t, double> counts;
    const std::string salt = "focus:" + std::string{ to_string(focus) };
    add_block(counts, text1, dim, 0, fnv1a(salt + "#1"));
    add_block(counts, text2, dim, dim, fnv1a(salt + "#2"));
    counts[static_cast<std::uint32_t>(2 * dim + static_cast<std::size_t>(focus))] = 1.0;
    return from_counts(counts, crc_input_dim(dim));
}

}  // namespace affect
