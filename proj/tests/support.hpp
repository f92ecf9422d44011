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

// Shared generators and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/error.hpp"
#include "affect/rng.hpp"
#include "affect/scorer.hpp"
#include "affect/templates.hpp"

namespace affect::testing {

inline const std::vector<Emotion> kEnglish{ Emotion::anger, Emotion::fear, Emotion::joy, Emotion::sadness,
                                            Emotion::surprise };

inline LabelSet english_labels() { return LabelSet{ "eng", kEnglish }; }

inline std::string fixture(const std::string &name) { return std::string{ AFFECT_FIXTURE_DIR } + "/" + name; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("affect_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Text with words, punctuation, quotes, commas and the odd newline or UTF-8 word.
inline std::string random_text(Rng &rng) {
    static const std::vector<std::string> words{ "hello", "I'm", "so", "tired", "of", "this,", "\"really\"",
                                                 "great", "news!", "día", "happy", "why?", "ok.", "line\nbreak" };
    std::string out;
    const std::size_t n = rng.uniform_index(8);
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.empty()) {
            out += ' ';
        }
        out += words[rng.uniform_index(words.size())];
    }
    return out;
}

inline LabelMap random_values(Rng &rng, Track track, const std::vector<Emotion> &emotions) {
    LabelMap values;
    for (const Emotion e : emotions) {
        values[e] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(arity(track))));
    }
    return values;
}

/// Random non-empty label subset in canonical order.
inline std::vector<Emotion> random_label_set(Rng &rng) {
    std::vector<Emotion> out;
    while (out.empty()) {
        for (const Emotion e : kAllEmotions) {
            if (rng.uniform_real() < 0.6) {
                out.push_back(e);
            }
        }
    }
    return out;
}

inline EmotionSample random_sample(Rng &rng, Track track, const std::vector<Emotion> &emotions, std::string id,
                                   std::string language = "eng") {
    return EmotionSample{ std::move(id), std::move(language), random_text(rng), track,
                          random_values(rng, track, emotions) };
}

inline void randomize(SlotScorer &model, Rng &rng, double scale = 0.5) {
    for (double &w : model.parameters()) {
        w = scale * (2.0 * rng.uniform_real() - 1.0);
    }
}

/// Central difference of f along coordinate i of the model's parameters.
inline double central_difference(SlotScorer &model, std::size_t i, double h,
                                 const std::function<double(const SlotScorer &)> &f) {
    const double saved = model.parameters()[i];
    model.parameters()[i] = saved + h;
    const double up = f(model);
    model.parameters()[i] = saved - h;
    const double down = f(model);
    model.parameters()[i] = saved;
    return (up - down) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|, floor); the floor keeps vanishing gradients comparable.
inline double relative_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({ std::abs(a), std::abs(b), floor });
}

/// Coordinates touched by the features in x: every (slot, value, feature) triple.
inline std::vector<std::size_t> active_coordinates(const SlotScorer &model, const FeatureVector &x) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < model.slot_count(); ++s) {
        for (std::size_t v = 0; v < model.arity(); ++v) {
            for (const auto &[index, value] : x.entries) {
                out.push_back(model.offset(s, v) + index);
            }
        }
    }
    return out;
}

/// Mode with ties to the smallest value, by counting every candidate.
inline int mode_oracle(const std::vector<int> &votes) {
    int best = -1;
    std::size_t best_count = 0;
    for (int candidate = 0; candidate <= 3; ++candidate) {
        const auto c = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), candidate));
        if (c > best_count) {
            best = candidate;
            best_count = c;
        }
    }
    return best;
}

/// Pearson by the single-pass raw-moment formula.
inline double pearson_oracle(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

/// F1 from precision and recall, zero when undefined.
inline double f1_oracle(const std::vector<int> &gold, const std::vector<int> &pred) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == 1 && pred[i] == 1) tp += 1;
        if (gold[i] == 0 && pred[i] == 1) fp += 1;
        if (gold[i] == 1 && pred[i] == 0) fn += 1;
    }
    if (tp == 0) {
        return 0.0;
    }
    const double precision = tp / (tp + fp);
    const double recall = tp / (tp + fn);
    return 2 * precision * recall / (precision + recall);
}

inline Prediction ok_prediction(std::string id, LabelMap values) {
    Prediction p;
    p.id = std::move(id);
    p.values = std::move(values);
    p.status = ParseStatus::ok;
    return p;
}

template <typename Fn>
std::string error_code_of(Fn &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    return "";
}

}  // namespace affect::testing
