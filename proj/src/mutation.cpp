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

#include "affect/mutation.hpp"

#include "affect/error.hpp"
#include "affect/templates.hpp"

#include <algorithm>
#include <numeric>

namespace affect {

MutationDistribution::MutationDistribution(const std::array<double, 5> &weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0) || std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0.0; })) {
        throw_config("InvalidDistribution", "mutation weights must be non-negative with a positive sum");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        probabilities_[i] = weights[i] / total;
    }
}

double MutationDistribution::probability(std::size_t k) const {
    return (k >= 1 && k <= probabilities_.size()) ? probabilities_[k - 1] : 0.0;
}

std::vector<double> MutationDistribution::feasible(std::size_t label_count) const {
    const std::size_t limit = std::min(probabilities_.size(), label_count);
    std::vector<double> out(probabilities_.begin(), probabilities_.begin() + static_cast<std::ptrdiff_t>(limit));
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double &p : out) {
        p /= total;
    }
    return out;
}

std::size_t draw_mutation_count(const MutationDistribution &dist, std::size_t label_count, Rng &rng) {
    if (label_count < 1) {
        throw_config("InvalidLabelCount", "label_count must be at least 1");
    }
    const std::vector<double> probs = dist.feasible(label_count);
    const double u = rng.uniform_real();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) {
            return k + 1;
        }
    }
    return probs.size();
}

LabelMap mutate_labels(const LabelMap &gold, Track track, std::size_t k, Rng &rng) {
    if (k > gold.size()) {
        throw_config("InvalidMutationCount", "cannot mutate " + std::to_string(k) + " of " + std::to_string(gold.size()) + " labels");
    }
    std::vector<Emotion> emotions;
    for (const auto &[e, value] : gold) {
        emotions.push_back(e);
    }
    // partial Fisher-Yates: the first k slots become a uniform k-subset
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(emotions.size() - i));
        std::swap(emotions[i], emotions[j]);
    }
    LabelMap rejected = gold;
    for (std::size_t i = 0; i < k; ++i) {
        const int current = gold.at(emotions[i]);
        // uniform over the arity-1 values that differ from the gold value
        int replacement = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(arity(track) - 1)));
        if (replacement >= current) {
            ++replacement;
        }
        rejected[emotions[i]] = replacement;
    }
    return rejected;
}

std::string chosen_text(const PreferencePair &pair) { return render_sp_target(pair.chosen); }
std::string rejected_text(const PreferencePair &pair) { return render_sp_target(pair.rejected); }

std::vector<PreferencePair> build_preference_dataset(const Dataset &dataset, std::size_t reps,
                                                     const MutationDistribution &dist, std::uint64_t seed) {
    if (reps < 1) {
        throw_config("InvalidReps", "mutation repetitions must be at least 1");
    }
    std::vector<PreferencePair> pairs;
    pairs.reserve(dataset.samples.size() * reps);
    for (const EmotionSample &sample : dataset.samples) {
        Rng rng(derive_seed(seed, sample.id));
        const std::string prompt = render_sp_input(sample.track, sample.language, sample.text);
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t k = draw_mutation_count(dist, sample.values.size(), rng);
            PreferencePair pair;
            pair.id = sample.id;
            pair.prompt = prompt;
            pair.chosen = sample.values;
            pair.rejected = mutate_labels(sample.values, sample.track, k, rng);
            for (const auto &[e, value] : pair.chosen) {
                if (pair.rejected.at(e) != value) {
                    pair.mutated.push_back(e);
                }
            }
            pairs.push_back(std::move(pair));
        }
    }
    return pairs;
}

nlohmann::ordered_json preference_to_json(const PreferencePair &pair) {
    nlohmann::ordered_json record;
    record["id"] = pair.id;
    record["prompt"] = pair.prompt;
    record["chosen"] = chosen_text(pair);
    record["rejected"] = rejected_text(pair);
    std::vector<std::string> mutated;
    for (const Emotion e : pair.mutated) {
        mutated.emplace_back(to_string(e));
    }
    record["mutated"] = mutated;
    return record;
}

PreferencePair preference_from_json(const nlohmann::json &record, const LabelSet &labels, Track track) {
    PreferencePair pair;
    pair.id = record.at("id").get<std::string>();
    pair.prompt = record.at("prompt").get<std::string>();
    const Prediction chosen = parse_sp_output(record.at("chosen").get<std::string>(), labels, track);
    const Prediction rejected = parse_sp_output(record.at("rejected").get<std::string>(), labels, track);
    if (chosen.status != ParseStatus::ok || rejected.status != ParseStatus::ok) {
        throw_data("MalformedPreference", "preference record '" + pair.id + "' does not parse");
    }
    pair.chosen = chosen.values;
    pair.rejected = rejected.values;
    for (const auto &name : record.at("mutated")) {
        const auto e = parse_emotion(name.get<std::string>());
        if (!e) {
            throw_data("UnknownEmotion", "preference record '" + pair.id + "' mutates an unknown emotion");
        }
        pair.mutated.push_back(*e);
    }
    return pair;
}

}  // namespace affect
