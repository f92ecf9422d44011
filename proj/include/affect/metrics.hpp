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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/templates.hpp"

namespace affect {

/// Scores under the competition's naming: `paper_macro` pools every
/// (sample, emotion) decision into one score, `paper_micro` averages the
/// per-emotion scores. This is the reverse of the usual macro/micro usage.
struct MetricReport {
    Track track{Track::A};
    double paper_macro = 0.0;
    double paper_micro = 0.0;
    std::map<Emotion, double> per_emotion;
    std::size_t n_samples = 0;
    std::size_t n_malformed = 0;
    std::vector<std::string> warnings;
};

/// Binary F1 with zero_division = 0.
[[nodiscard]] double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

struct PearsonResult {
    double r = 0.0;
    bool degenerate = false;  // a series had zero variance; r reported as 0
};

/// Sample Pearson correlation by the two-pass covariance formula.
[[nodiscard]] PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Predictions align with golds by position; a non-empty prediction id must
/// equal the gold id (Error "IdMismatch"). Malformed predictions score as all zeros.
[[nodiscard]] MetricReport f1_report(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                                     const LabelSet &labels);
[[nodiscard]] MetricReport pearson_report(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                                          const LabelSet &labels);
/// Dispatches on the gold track.
[[nodiscard]] MetricReport evaluate(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                                    const LabelSet &labels, Track track);

struct FailureRate {
    std::size_t malformed = 0;
    std::size_t total = 0;
    double rate = 0.0;  // 0 for an empty list
};

[[nodiscard]] FailureRate parse_failure_rate(std::span<const Prediction> outputs);

struct ErrorCounts {
    std::vector<std::vector<std::size_t>> confusion;  // [gold][pred]
    std::size_t wrong = 0;
    std::size_t off_by_one = 0;     // |pred - gold| == 1
    std::size_t false_neutral = 0;  // pred 0, gold > 0
    std::size_t false_positive = 0; // pred > 0, gold 0
    std::optional<double> off_by_one_share;     // track B only; nullopt when no errors
    std::optional<double> false_neutral_share;  // nullopt when no errors
};

struct ErrorBreakdown {
    Track track{Track::A};
    std::map<Emotion, ErrorCounts> per_emotion;
    ErrorCounts overall;
};

[[nodiscard]] ErrorBreakdown error_breakdown(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                                             const LabelSet &labels, Track track);

[[nodiscard]] nlohmann::ordered_json report_to_json(const MetricReport &report);
[[nodiscard]] nlohmann::ordered_json breakdown_to_json(const ErrorBreakdown &breakdown);

/// Plain-text table with columns Model, Language, Macro, Micro and one per
/// emotion, three decimals.
[[nodiscard]] std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>> &rows,
                                              const std::string &language);

}  // namespace affect
