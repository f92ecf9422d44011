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
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/rng.hpp"
#include "affect/scorer.hpp"
#include "affect/templates.hpp"

namespace affect {

/// Fault injection for exercising parse-failure diagnostics: with probability
/// `rate` a prediction's raw text is corrupted before parsing.
struct FaultInjection {
    double rate = 0.0;
    std::uint64_t seed = 0;
};

/// Replaces one label value in an SP output with '?', which no parser accepts.
[[nodiscard]] std::string corrupt_output(std::string_view raw, Rng &rng);

/// One prediction per sample in input order. The raw text is re-parsed, so the
/// status reflects what a downstream parser would see.
[[nodiscard]] std::vector<Prediction> sp_infer(const SlotScorer &model, std::span<const EmotionSample> samples,
                                               const FaultInjection &faults = {});

struct VoteConfig {
    std::size_t n = 3;
    std::uint64_t seed = 0;

    /// N = 3 for track A, 7 for track B.
    [[nodiscard]] static VoteConfig defaults(Track track, std::uint64_t seed = 0);
};

/// Most frequent value; ties go to the smallest value. Throws on empty input
/// or values outside [0, arity).
[[nodiscard]] int majority_vote(std::span<const int> votes, std::size_t arity);

struct VoteOutcome {
    int value = 0;
    std::vector<int> votes;          // per repetition, in draw order
    std::vector<std::size_t> tally;  // count per value, sums to N
    std::size_t anchor_agreements = 0;  // anchor predicted == anchor gold
};

/// N repetitions: draw an anchor uniformly (with replacement), place the test
/// sample at position 1 or 2 uniformly, read the test sample's predicted value.
[[nodiscard]] VoteOutcome crc_infer_one(const SlotScorer &model, const EmotionSample &test,
                                        std::span<const EmotionSample> anchors, Emotion focus, const VoteConfig &config,
                                        Rng &rng);
/// Same, with rng seeded from (config.seed, test id, focus).
[[nodiscard]] VoteOutcome crc_infer_one(const SlotScorer &model, const EmotionSample &test,
                                        std::span<const EmotionSample> anchors, Emotion focus, const VoteConfig &config);

struct CrcPrediction {
    Prediction prediction;
    std::map<Emotion, VoteOutcome> votes;
};

/// Per sample, per label-set emotion voting. Each sample draws from
/// Rng(derive_seed(seed, id)), emotions in canonical order.
[[nodiscard]] std::vector<CrcPrediction> crc_infer(const SlotScorer &model, std::span<const EmotionSample> tests,
                                                   std::span<const EmotionSample> train_set, const LabelSet &labels,
                                                   const VoteConfig &config);

/// Predictions JSONL record {id, values, method, status, votes?}.
[[nodiscard]] nlohmann::ordered_json prediction_to_json(std::string_view id, const Prediction &prediction,
                                                        std::string_view method,
                                                        const std::map<Emotion, VoteOutcome> *votes = nullptr);

}  // namespace affect
