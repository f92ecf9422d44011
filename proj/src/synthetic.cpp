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

#include "affect/synthetic.hpp"

#include "affect/rng.hpp"

#include <fmt/format.h>

#include <array>

namespace affect {

namespace {

// [emotion][level-1] for track B; track A uses the level-2 word.
constexpr std::array<std::array<std::string_view, 3>, 6> kKeywords{{
    {"irked", "angry", "furious"},
    {"uneasy", "scared", "terrified"},
    {"pleased", "happy", "ecstatic"},
    {"glum", "sad", "heartbroken"},
    {"curious", "surprised", "astonished"},
    {"displeased", "disgusted", "revolted"},
}};

constexpr std::array<std::string_view, 16> kFiller{
    "the", "weather", "today", "my", "neighbour", "said", "train", "was", "late", "again",
    "we", "talked", "about", "dinner", "and", "work",
};

constexpr std::array<Emotion, 5> kToyEmotions{Emotion::anger, Emotion::fear, Emotion::joy, Emotion::sadness,
                                              Emotion::surprise};

}  // namespace

std::string_view separable_keyword(Track track, Emotion emotion, int value) {
    const auto &words = kKeywords[static_cast<std::size_t>(emotion)];
    if (track == Track::A) {
        return words[1];
    }
    return words[static_cast<std::size_t>(value - 1)];
}

Dataset make_separable_corpus(Track track, std::size_t n, std::uint64_t seed, std::string_view id_prefix,
                              std::string_view language) {
    Dataset dataset;
    dataset.track = track;
    dataset.labels.language = std::string{ language };
    dataset.labels.emotions.assign(kToyEmotions.begin(), kToyEmotions.end());

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        EmotionSample sample;
        sample.id = fmt::format("{}-{:04d}", id_prefix, i);
        sample.language = dataset.labels.language;
        sample.track = track;

        std::vector<std::string_view> words;
        for (const Emotion e : kToyEmotions) {
            // about 40% of samples carry each emotion
            int value = 0;
            if (rng.uniform_real() < 0.4) {
                value = track == Track::A ? 1 : 1 + static_cast<int>(rng.uniform_index(3));
            }
            sample.values[e] = value;
            if (value > 0) {
                words.push_back(separable_keyword(track, e, value));
            }
        }
        const std::size_t filler = 3 + rng.uniform_index(4);
        for (std::size_t k = 0; k < filler; ++k) {
            words.push_back(kFiller[rng.uniform_index(kFiller.size())]);
        }
        rng.shuffle(std::span<std::string_view>{ words });
        for (const std::string_view w : words) {
            if (!sample.text.empty()) {
                sample.text += ' ';
            }
            sample.text += w;
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

}  // namespace affect
