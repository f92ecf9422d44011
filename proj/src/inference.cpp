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

#include "affect/inference.hpp"

#include "affect/error.hpp"
#include "affect/features.hpp"
#include "affect/parallel.hpp"

#include <algorithm>

namespace affect {

std::string corrupt_output(std::string_view raw, Rng &rng) {
    std::vector<std::size_t> value_positions;
    for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
        if (raw[i] == ':' && raw[i + 1] == ' ') {
            value_positions.push_back(i + 2);
        }
    }
    std::string out{ raw };
    if (value_positions.empty()) {
        return out + "?";
    }
    const std::size_t pos = value_positions[rng.uniform_index(value_positions.size())];
    if (pos < out.size()) {
        out[pos] = '?';
    } else {
        out.push_back('?');
    }
    return out;
}

std::vector<Prediction> sp_infer(const SlotScorer &model, std::span<const EmotionSample> samples,
                                 const FaultInjection &faults) {
    if (is_crc(model.task())) {
        throw_config("WrongTask", "sp_infer needs an SP scorer");
    }
    LabelSet labels;
    labels.emotions = model.slot_emotions();
    std::vector<Prediction> predictions(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        const EmotionSample &sample = samples[i];
        if (sample.track != model.track()) {
            throw_config("WrongTask", "sample '" + sample.id + "' track does not match the scorer");
        }
        const Prediction direct = predict(model, featurize(sample.text, model.feature_dim()));
        std::string raw = direct.raw;
        if (faults.rate > 0.0) {
            Rng rng(derive_seed(faults.seed, sample.id));
            if (rng.uniform_real() < faults.rate) {
                raw = corrupt_output(raw, rng);
            }
        }
        predictions[i] = parse_sp_output(raw, labels, model.track());
        predictions[i].id = sample.id;
    });
    return predictions;
}

VoteConfig VoteConfig::defaults(Track track, std::uint64_t seed) {
    return VoteConfig{ track == Track::A ? std::size_t{ 3 } : std::size_t{ 7 }, seed };
}

int majority_vote(std::span<const int> votes, std::size_t arity) {
    if (votes.empty()) {
        throw_config("EmptyVotes", "majority_vote needs at least one vote");
    }
    std::vector<std::size_t> tally(arity, 0);
    for (const int v : votes) {
        if (v < 0 || static_cast<std::size_t>(v) >= arity) {
            throw_data("VoteOutOfRange", "vote " + std::to_string(v) + " outside [0, " + std::to_string(arity) + ")");
        }
        ++tally[static_cast<std::size_t>(v)];
    }
    // first maximum == smallest value among the tied
    return static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
}

VoteOutcome crc_infer_one(const SlotScorer &model, const EmotionSample &test, std::span<const EmotionSample> anchors,
                          Emotion focus, const VoteConfig &config, Rng &rng) {
    if (!is_crc(model.task())) {
        throw_config("WrongTask", "crc_infer_one needs a CRC scorer");
    }
    if (anchors.empty()) {
        throw_data("NoAnchors", "CRC inference needs at least one anchor sample");
    }
    if (config.n < 1) {
        throw_config("InvalidVoteCount", "N must be at least 1");
    }
    VoteOutcome outcome;
    outcome.tally.assign(model.arity(), 0);
    for (std::size_t rep = 0; rep < config.n; ++rep) {
        const EmotionSample &anchor = anchors[rng.uniform_index(anchors.size())];
        const bool test_first = rng.uniform_index(2) == 0;
        const FeatureVector x = test_first ? crc_features(test.text, anchor.text, focus, model.feature_dim())
                                           : crc_features(anchor.text, test.text, focus, model.feature_dim());
        const std::vector<int> slots = predict_slots(model, x);
        const int test_value = slots[test_first ? 0 : 1];
        const int anchor_value = slots[test_first ? 1 : 0];
        const auto gold = anchor.values.find(focus);
        if (gold != anchor.values.end() && gold->second == anchor_value) {
            ++outcome.anchor_agreements;
        }
        outcome.votes.push_back(test_value);
        ++outcome.tally[static_cast<std::size_t>(test_value)];
    }
    outcome.value = majority_vote(outcome.votes, model.arity());
    return outcome;
}

VoteOutcome crc_infer_one(const SlotScorer &model, const EmotionSample &test, std::span<const EmotionSample> anchors,
                          Emotion focus, const VoteConfig &config) {
    Rng rng(derive_seed(derive_seed(config.seed, test.id), to_string(focus)));
    return crc_infer_one(model, test, anchors, focus, config, rng);
}

std::vector<CrcPrediction> crc_infer(const SlotScorer &model, std::span<const EmotionSample> tests,
                                     std::span<const EmotionSample> train_set, const LabelSet &labels,
                                     const VoteConfig &config) {
    std::map<Emotion, std::vector<EmotionSample>> anchors;
    for (const Emotion focus : labels.emotions) {
        auto &pool = anchors[focus];
        std::copy_if(train_set.begin(), train_set.end(), std::back_inserter(pool),
                     [focus](const EmotionSample &s) { return s.values.contains(focus); });
        if (pool.empty()) {
            throw_data("NoAnchors", "no training sample carries '" + std::string{ to_string(focus) } + "'");
        }
    }
    std::vector<CrcPrediction> out(tests.size());
    parallel_for(tests.size(), [&](std::size_t i) {
        const EmotionSample &test = tests[i];
        Rng rng(derive_seed(config.seed, test.id));
        CrcPrediction &result = out[i];
        for (const Emotion focus : labels.emotions) {
            VoteOutcome outcome = crc_infer_one(model, test, anchors.at(focus), focus, config, rng);
            result.prediction.values[focus] = outcome.value;
            result.votes.emplace(focus, std::move(outcome));
        }
        result.prediction.id = test.id;
        result.prediction.status = ParseStatus::ok;
        result.prediction.raw = render_sp_target(result.prediction.values);
    });
    return out;
}

nlohmann::ordered_json prediction_to_json(std::string_view id, const Prediction &prediction, std::string_view method,
                                          const std::map<Emotion, VoteOutcome> *votes) {
    nlohmann::ordered_json record;
    record["id"] = std::string{ id };
    record["values"] = label_map_to_json(prediction.values);
    record["method"] = std::string{ method };
    record["status"] = prediction.status == ParseStatus::ok ? "ok" : "malformed";
    if (prediction.status != ParseStatus::ok) {
        record["raw"] = prediction.raw;
    }
    if (votes != nullptr) {
        nlohmann::ordered_json by_emotion = nlohmann::ordered_json::object();
        for (const auto &[e, outcome] : *votes) {
            by_emotion[std::string{ to_string(e) }] = outcome.votes;
        }
        record["votes"] = std::move(by_emotion);
    }
    return record;
}

}  // namespace affect
