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

#include "affect/metrics.hpp"

#include "affect/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace affect {

namespace {

void check_alignment(std::span<const Prediction> preds, std::span<const EmotionSample> golds) {
    if (preds.size() != golds.size()) {
        throw_data("IdMismatch", fmt::format("{} predictions for {} gold samples", preds.size(), golds.size()));
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!preds[i].id.empty() && preds[i].id != golds[i].id) {
            throw_data("IdMismatch", fmt::format("prediction '{}' at position {} aligned with gold '{}'", preds[i].id, i, golds[i].id));
        }
    }
}

void check_track(std::span<const EmotionSample> golds, Track track) {
    for (const EmotionSample &gold : golds) {
        if (gold.track != track) {
            throw_data("WrongTrack", "gold sample '" + gold.id + "' is not track " + std::string{ to_string(track) });
        }
    }
}

// Value scored for (prediction, emotion); malformed or missing counts as 0.
int scored_value(const Prediction &pred, Emotion e) {
    if (pred.status != ParseStatus::ok) {
        return 0;
    }
    const auto it = pred.values.find(e);
    return it == pred.values.end() ? 0 : it->second;
}

std::size_t count_malformed(std::span<const Prediction> preds) {
    return static_cast<std::size_t>(std::count_if(preds.begin(), preds.end(),
                                                  [](const Prediction &p) { return p.status != ParseStatus::ok; }));
}

double mean_of(const std::map<Emotion, double> &scores) {
    if (scores.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto &[e, score] : scores) {
        sum += score;
    }
    return sum / static_cast<double>(scores.size());
}

nlohmann::ordered_json counts_to_json(const ErrorCounts &counts) {
    nlohmann::ordered_json out;
    out["confusion"] = counts.confusion;
    out["wrong"] = counts.wrong;
    out["off_by_one"] = counts.off_by_one;
    out["false_neutral"] = counts.false_neutral;
    out["false_positive"] = counts.false_positive;
    out["off_by_one_share"] = counts.off_by_one_share ? nlohmann::ordered_json(*counts.off_by_one_share) : nlohmann::ordered_json("n/a");
    out["false_neutral_share"] = counts.false_neutral_share ? nlohmann::ordered_json(*counts.false_neutral_share) : nlohmann::ordered_json("n/a");
    return out;
}

}  // namespace

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
    const std::size_t denominator = 2 * tp + fp + fn;
    return denominator == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denominator);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw_data("LengthMismatch", "pearson needs equal-length series");
    }
    const std::size_t n = x.size();
    if (n == 0) {
        return { 0.0, true };
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return { 0.0, true };
    }
    return { std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false };
}

MetricReport f1_report(std::span<const Prediction> preds, std::span<const EmotionSample> golds, const LabelSet &labels) {
    check_alignment(preds, golds);
    check_track(golds, Track::A);
    MetricReport report;
    report.track = Track::A;
    report.n_samples = golds.size();
    report.n_malformed = count_malformed(preds);

    std::size_t pooled_tp = 0;
    std::size_t pooled_fp = 0;
    std::size_t pooled_fn = 0;
    for (const Emotion e : labels.emotions) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t i = 0; i < golds.size(); ++i) {
            const bool gold = golds[i].values.at(e) == 1;
            const bool pred = scored_value(preds[i], e) == 1;
            tp += gold && pred;
            fp += !gold && pred;
            fn += gold && !pred;
        }
        if (tp + fp + fn == 0) {
            report.warnings.push_back(fmt::format("{}: no gold or predicted positives, F1 set to 0", to_string(e)));
        }
        report.per_emotion[e] = f1_score(tp, fp, fn);
        pooled_tp += tp;
        pooled_fp += fp;
        pooled_fn += fn;
    }
    report.paper_macro = f1_score(pooled_tp, pooled_fp, pooled_fn);
    report.paper_micro = mean_of(report.per_emotion);
    if (report.n_malformed > 0) {
        report.warnings.push_back(fmt::format("{} malformed predictions scored as all zeros", report.n_malformed));
    }
    return report;
}

MetricReport pearson_report(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                            const LabelSet &labels) {
    check_alignment(preds, golds);
    check_track(golds, Track::B);
    MetricReport report;
    report.track = Track::B;
    report.n_samples = golds.size();
    report.n_malformed = count_malformed(preds);

    std::vector<double> pooled_pred;
    std::vector<double> pooled_gold;
    for (const Emotion e : labels.emotions) {
        std::vector<double> pred_series;
        std::vector<double> gold_series;
        for (std::size_t i = 0; i < golds.size(); ++i) {
            gold_series.push_back(golds[i].values.at(e));
            pred_series.push_back(scored_value(preds[i], e));
        }
        const PearsonResult r = pearson(pred_series, gold_series);
        if (r.degenerate) {
            report.warnings.push_back(fmt::format("{}: zero-variance series, r set to 0", to_string(e)));
        }
        report.per_emotion[e] = r.r;
        pooled_pred.insert(pooled_pred.end(), pred_series.begin(), pred_series.end());
        pooled_gold.insert(pooled_gold.end(), gold_series.begin(), gold_series.end());
    }
    const PearsonResult pooled = pearson(pooled_pred, pooled_gold);
    if (pooled.degenerate) {
        report.warnings.emplace_back("pooled: zero-variance series, r set to 0");
    }
    report.paper_macro = pooled.r;
    report.paper_micro = mean_of(report.per_emotion);
    if (report.n_malformed > 0) {
        report.warnings.push_back(fmt::format("{} malformed predictions scored as all zeros", report.n_malformed));
    }
    return report;
}

MetricReport evaluate(std::span<const Prediction> preds, std::span<const EmotionSample> golds, const LabelSet &labels,
                      Track track) {
    return track == Track::A ? f1_report(preds, golds, labels) : pearson_report(preds, golds, labels);
}

FailureRate parse_failure_rate(std::span<const Prediction> outputs) {
    FailureRate rate;
    rate.total = outputs.size();
    rate.malformed = count_malformed(outputs);
    rate.rate = rate.total == 0 ? 0.0 : static_cast<double>(rate.malformed) / static_cast<double>(rate.total);
    return rate;
}

ErrorBreakdown error_breakdown(std::span<const Prediction> preds, std::span<const EmotionSample> golds,
                               const LabelSet &labels, Track track) {
    check_alignment(preds, golds);
    check_track(golds, track);
    const auto levels = static_cast<std::size_t>(arity(track));
    const auto empty_counts = [levels] {
        ErrorCounts counts;
        counts.confusion.assign(levels, std::vector<std::size_t>(levels, 0));
        return counts;
    };
    const auto finish = [track](ErrorCounts &counts) {
        if (counts.wrong == 0) {
            return;
        }
        const auto wrong = static_cast<double>(counts.wrong);
        if (track == Track::B) {
            counts.off_by_one_share = static_cast<double>(counts.off_by_one) / wrong;
        }
        counts.false_neutral_share = static_cast<double>(counts.false_neutral) / wrong;
    };

    ErrorBreakdown breakdown;
    breakdown.track = track;
    breakdown.overall = empty_counts();
    for (const Emotion e : labels.emotions) {
        ErrorCounts counts = empty_counts();
        for (std::size_t i = 0; i < golds.size(); ++i) {
            const int gold = golds[i].values.at(e);
            const int pred = scored_value(preds[i], e);
            for (ErrorCounts *target : { &counts, &breakdown.overall }) {
                ++target->confusion[static_cast<std::size_t>(gold)][static_cast<std::size_t>(std::clamp(pred, 0, max_value(track)))];
                if (pred == gold) {
                    continue;
                }
                ++target->wrong;
                target->off_by_one += std::abs(pred - gold) == 1;
                target->false_neutral += pred == 0 && gold > 0;
                target->false_positive += pred > 0 && gold == 0;
            }
        }
        finish(counts);
        breakdown.per_emotion[e] = std::move(counts);
    }
    finish(breakdown.overall);
    return breakdown;
}

nlohmann::ordered_json report_to_json(const MetricReport &report) {
    nlohmann::ordered_json out;
    out["track"] = std::string{ to_string(report.track) };
    out["metric"] = report.track == Track::A ? "f1" : "pearson";
    out["paper_macro"] = report.paper_macro;
    out["paper_micro"] = report.paper_micro;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto &[e, score] : report.per_emotion) {
        per[std::string{ to_string(e) }] = score;
    }
    out["per_emotion"] = std::move(per);
    out["n_samples"] = report.n_samples;
    out["n_malformed"] = report.n_malformed;
    out["warnings"] = report.warnings;
    return out;
}

nlohmann::ordered_json breakdown_to_json(const ErrorBreakdown &breakdown) {
    nlohmann::ordered_json out;
    out["track"] = std::string{ to_string(breakdown.track) };
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto &[e, counts] : breakdown.per_emotion) {
        per[std::string{ to_string(e) }] = counts_to_json(counts);
    }
    out["per_emotion"] = std::move(per);
    out["overall"] = counts_to_json(breakdown.overall);
    return out;
}

std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>> &rows,
                                const std::string &language) {
    std::vector<Emotion> columns;
    for (const auto &[name, report] : rows) {
        for (const auto &[e, score] : report.per_emotion) {
            if (std::find(columns.begin(), columns.end(), e) == columns.end()) {
                columns.push_back(e);
            }
        }
    }
    std::sort(columns.begin(), columns.end());

    const auto capitalized = [](std::string_view name) {
        std::string out{ name };
        if (!out.empty()) {
            out[0] = static_cast<char>(out[0] - 'a' + 'A');
        }
        return out;
    };
    std::string table = fmt::format("{:<8} {:<10} {:>8} {:>8}", "Model", "Language", "Macro", "Micro");
    for (const Emotion e : columns) {
        table += fmt::format(" {:>8}", capitalized(to_string(e)));
    }
    table += '\n';
    for (const auto &[name, report] : rows) {
        table += fmt::format("{:<8} {:<10} {:>8.3f} {:>8.3f}", name, language, report.paper_macro, report.paper_micro);
        for (const Emotion e : columns) {
            const auto it = report.per_emotion.find(e);
            table += it == report.per_emotion.end() ? fmt::format(" {:>8}", "-") : fmt::format(" {:>8.3f}", it->second);
        }
        table += '\n';
    }
    return table;
}

}  // namespace affect
