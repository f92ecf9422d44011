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

#include "affect/pairgen.hpp"

#include "affect/error.hpp"
#include "affect/rng.hpp"

#include <fmt/format.h>

#include <numeric>
#include <unordered_set>

namespace affect {

namespace {

// Ordered-pair index in [0, n*(n-1)) -> (first, second), first != second.
std::pair<std::size_t, std::size_t> decode_pair(std::uint64_t index, std::size_t n) {
    const auto first = static_cast<std::size_t>(index / (n - 1));
    auto second = static_cast<std::size_t>(index % (n - 1));
    if (second >= first) {
        ++second;
    }
    return { first, second };
}

std::vector<std::uint64_t> draw_pair_indices(std::uint64_t total, std::uint64_t count, Rng &rng) {
    std::vector<std::uint64_t> drawn;
    drawn.reserve(count);
    if (count * 2 >= total) {
        // dense case: partial Fisher-Yates over all indices
        std::vector<std::uint64_t> all(total);
        std::iota(all.begin(), all.end(), std::uint64_t{ 0 });
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t j = i + rng.uniform_index(total - i);
            std::swap(all[i], all[j]);
            drawn.push_back(all[i]);
        }
        return drawn;
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    while (drawn.size() < count) {
        const std::uint64_t index = rng.uniform_index(total);
        if (seen.insert(index).second) {
            drawn.push_back(index);
        }
    }
    return drawn;
}

}  // namespace

PairGenConfig PairGenConfig::defaults(Track track, std::uint64_t seed) {
    return PairGenConfig{ track == Track::A ? std::size_t{ 3000 } : std::size_t{ 6000 }, seed };
}

std::vector<ContrastivePair> sample_pairs(std::span<const EmotionSample> dataset, Emotion focus,
                                          const PairGenConfig &config) {
    if (config.cap_per_label < 1) {
        throw_config("InvalidCap", "cap_per_label must be at least 1");
    }
    std::vector<const EmotionSample *> usable;
    for (const EmotionSample &sample : dataset) {
        if (sample.values.contains(focus)) {
            usable.push_back(&sample);
        }
    }
    const std::size_t n = usable.size();
    if (n < 2) {
        throw_data("TooFewSamples", fmt::format("{} samples carry '{}', need at least 2", n, to_string(focus)));
    }
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1);
    const std::uint64_t count = std::min<std::uint64_t>(config.cap_per_label, total);

    Rng rng(derive_seed(config.seed, to_string(focus)));
    std::vector<ContrastivePair> pairs;
    pairs.reserve(count);
    for (const std::uint64_t index : draw_pair_indices(total, count, rng)) {
        const auto [a, b] = decode_pair(index, n);
        ContrastivePair pair;
        pair.focus = focus;
        pair.s1 = *usable[a];
        pair.s2 = *usable[b];
        pair.v1 = pair.s1.values.at(focus);
        pair.v2 = pair.s2.values.at(focus);
        pair.summary = summarize_contrast(pair);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::string summarize_contrast(Track track, Emotion focus, int value1, int value2) {
    const std::string_view e = to_string(focus);
    if (value1 == value2) {
        if (value1 == 0) {
            return fmt::format("both conversations show the same absence of {}", e);
        }
        if (track == Track::A) {
            return fmt::format("both conversations show the same presence of {}", e);
        }
        return fmt::format("both conversations show the same intensity of {}", e);
    }
    const bool first_higher = value1 > value2;
    const std::string_view high = first_higher ? "Conversation1" : "Conversation2";
    const std::string_view low = first_higher ? "Conversation2" : "Conversation1";
    const int low_value = first_higher ? value2 : value1;
    if (track == Track::A || low_value == 0) {
        return fmt::format("the speaker in {} expresses {} while the speaker in {} does not", high, e, low);
    }
    return fmt::format("the speaker in {} expresses {} with higher intensity than the speaker in {}", high, e, low);
}

std::string summarize_contrast(const ContrastivePair &pair) {
    return summarize_contrast(pair.s1.track, pair.focus, pair.v1, pair.v2);
}

std::vector<PromptInstance> build_crc_training_set(const Dataset &dataset, const PairGenConfig &config) {
    std::vector<PromptInstance> instances;
    for (const Emotion focus : dataset.labels.emotions) {
        for (const ContrastivePair &pair : sample_pairs(dataset.samples, focus, config)) {
            instances.push_back(render_crc(pair, 2));
        }
    }
    return instances;
}

}  // namespace affect
