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

#include <array>
#include <cstdint>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/rng.hpp"

namespace affect {

/// Probabilities of mutating 1..5 labels. The published values sum to 0.999;
/// they are renormalized to 1 on construction.
class MutationDistribution {
  public:
    static constexpr std::array<double, 5> kPublished{0.638, 0.261, 0.083, 0.016, 0.001};

    MutationDistribution() : MutationDistribution(kPublished) {}
    explicit MutationDistribution(const std::array<double, 5> &weights);

    /// Probability of mutating exactly k labels (k in 1..5), untruncated.
    [[nodiscard]] double probability(std::size_t k) const;
    /// Distribution truncated to [1, min(5, label_count)] and renormalized.
    [[nodiscard]] std::vector<double> feasible(std::size_t label_count) const;

  private:
    std::array<double, 5> probabilities_{};
};

[[nodiscard]] std::size_t draw_mutation_count(const MutationDistribution &dist, std::size_t label_count, Rng &rng);

/// Picks `k` distinct emotions uniformly and replaces each value with a
/// uniformly drawn different value from the track's range.
[[nodiscard]] LabelMap mutate_labels(const LabelMap &gold, Track track, std::size_t k, Rng &rng);

struct PreferencePair {
    std::string id;        // source sample id
    std::string prompt;    // SP input text
    LabelMap chosen;       // gold values (y_w)
    LabelMap rejected;     // mutated values (y_l)
    std::vector<Emotion> mutated;  // canonical order
};

/// Renders chosen/rejected through the SP target template.
[[nodiscard]] std::string chosen_text(const PreferencePair &pair);
[[nodiscard]] std::string rejected_text(const PreferencePair &pair);

/// Five repetitions per sample for track A, fifteen for track B.
[[nodiscard]] constexpr std::size_t default_mutation_reps(Track track) noexcept { return track == Track::A ? 5 : 15; }

/// reps pairs per sample, ordered sample-major then by repetition. Each sample
/// draws from Rng(derive_seed(seed, id)).
[[nodiscard]] std::vector<PreferencePair> build_preference_dataset(const Dataset &dataset, std::size_t reps,
                                                                   const MutationDistribution &dist, std::uint64_t seed);

/// JSONL record {id, prompt, chosen, rejected, mutated}.
[[nodiscard]] nlohmann::ordered_json preference_to_json(const PreferencePair &pair);
[[nodiscard]] PreferencePair preference_from_json(const nlohmann::json &record, const LabelSet &labels, Track track);

}  // namespace affect
