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
#include <span>
#include <string>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/templates.hpp"

namespace affect {

/// Two samples compared on one emotion. By convention s2 is the side treated
/// as the test sample when rendering with a test position.
struct ContrastivePair {
    Emotion focus{Emotion::anger};
    EmotionSample s1;
    EmotionSample s2;
    int v1 = 0;
    int v2 = 0;
    std::string summary;
};

struct PairGenConfig {
    std::size_t cap_per_label = 3000;
    std::uint64_t seed = 0;

    /// 3000 pairs per label for track A, 6000 for track B.
    [[nodiscard]] static PairGenConfig defaults(Track track, std::uint64_t seed = 0);
};

/// Draws min(cap, n*(n-1)) distinct ordered pairs of distinct samples carrying
/// `focus`, uniformly without replacement. The label's stream is seeded with
/// derive_seed(config.seed, label name). Throws Error("TooFewSamples").
[[nodiscard]] std::vector<ContrastivePair> sample_pairs(std::span<const EmotionSample> dataset, Emotion focus,
                                                        const PairGenConfig &config);

/// Fixed phrase-table sentence describing how the two conversations differ on `focus`.
[[nodiscard]] std::string summarize_contrast(Track track, Emotion focus, int value1, int value2);
[[nodiscard]] std::string summarize_contrast(const ContrastivePair &pair);

/// Rendered CRC instances for every label-set emotion, concatenated in canonical order.
[[nodiscard]] std::vector<PromptInstance> build_crc_training_set(const Dataset &dataset, const PairGenConfig &config);

}  // namespace affect
