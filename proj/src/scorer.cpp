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

#include "affect/scorer.hpp"

#include "affect/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace affect {

namespace {

constexpr std::array<char, 8> kMagic{'A', 'F', 'F', 'C', 'K', 'P', 'T', '1'};

// Numerically stable log-softmax in place.
void log_softmax(std::span<double> values) {
    const double max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (const double v : values) {
        sum += std::exp(v - max);
    }
    const double lse = max + std::log(sum);
    for (double &v : values) {
        v -= lse;
    }
}

void check_targets(const SlotScorer &model, std::span<const int> y) {
    if (y.size() != model.slot_count()) {
        throw_data("SlotMismatch", "expected " + std::to_string(model.slot_count()) + " slot values, got " + std::to_string(y.size()));
    }
    for (const int value : y) {
        if (value < 0 || static_cast<std::size_t>(value) >= model.arity()) {
            throw_data("SlotMismatch", "slot value " + std::to_string(value) + " outside [0, " + std::to_string(model.arity()) + ")");
        }
    }
}

void check_input(const SlotScorer &model, const FeatureVector &x) {
    if (x.dim != model.input_dim()) {
        throw_data("SlotMismatch", "feature dimension " + std::to_string(x.dim) + " does not match model input " + std::to_string(model.input_dim()));
    }
}

template <typename T>
void put(std::ostream &out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        out.write(bytes.data(), sizeof(T));
    } else {
        out.write(reinterpret_cast<const char *>(&value), sizeof(T));
    }
}

template <typename T>
T get(std::istream &in) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), sizeof(T))) {
        throw_data("BadCheckpoint", "truncated checkpoint");
    }
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        std::reverse(bytes.begin(), bytes.end());
    }
    return std::bit_cast<T>(bytes);
}

}  // namespace

SlotScorer::SlotScorer(PromptTask task, std::vector<Emotion> emotions, std::size_t slots, std::size_t feature_dim,
                       std::size_t input_dim)
    : task_(task),
      emotions_(std::move(emotions)),
      slot_count_(slots),
      arity_(static_cast<std::size_t>(affect::arity(track_of(task)))),
      feature_dim_(feature_dim),
      input_dim_(input_dim),
      weights_(slots * arity_ * input_dim, 0.0) {}

SlotScorer SlotScorer::sp(Track track, std::vector<Emotion> emotions, std::size_t feature_dim) {
    if (emotions.empty()) {
        throw_config("EmptyLabelSet", "SP scorer needs at least one emotion");
    }
    std::sort(emotions.begin(), emotions.end());
    emotions.erase(std::unique(emotions.begin(), emotions.end()), emotions.end());
    const std::size_t slots = emotions.size();
    return SlotScorer(sp_task(track), std::move(emotions), slots, feature_dim, feature_dim);
}

SlotScorer SlotScorer::crc(Track track, std::size_t feature_dim) {
    return SlotScorer(crc_task(track), {}, 2, feature_dim, crc_input_dim(feature_dim));
}

void SlotScorer::logits(std::size_t slot, const FeatureVector &x, std::span<double> out) const {
    for (std::size_t v = 0; v < arity_; ++v) {
        const double *row = weights_.data() + offset(slot, v);
        double sum = 0.0;
        for (const auto &[index, value] : x.entries) {
            sum += row[index] * value;
        }
        out[v] = sum;
    }
}

bool SlotScorer::same_architecture(const SlotScorer &other) const noexcept {
    return task_ == other.task_ && emotions_ == other.emotions_ && slot_count_ == other.slot_count_ &&
           arity_ == other.arity_ && input_dim_ == other.input_dim_;
}

ScoredOutput logprob(const SlotScorer &model, const FeatureVector &x, std::span<const int> y) {
    check_input(model, x);
    check_targets(model, y);
    ScoredOutput out;
    out.slot_count = model.slot_count();
    out.per_slot_logprob.reserve(model.slot_count());
    std::vector<double> buffer(model.arity());
    for (std::size_t s = 0; s < model.slot_count(); ++s) {
        model.logits(s, x, buffer);
        log_softmax(buffer);
        const double lp = buffer[static_cast<std::size_t>(y[s])];
        out.per_slot_logprob.push_back(lp);
        out.total_logprob += lp;
    }
    return out;
}

std::vector<double> slot_probabilities(const SlotScorer &model, const FeatureVector &x) {
    check_input(model, x);
    std::vector<double> probs(model.slot_count() * model.arity());
    for (std::size_t s = 0; s < model.slot_count(); ++s) {
        std::span<double> slot{ probs.data() + s * model.arity(), model.arity() };
        model.logits(s, x, slot);
        log_softmax(slot);
        for (double &p : slot) {
            p = std::exp(p);
        }
    }
    return probs;
}

void accumulate_logprob_gradient(const SlotScorer &model, const FeatureVector &x, std::span<const int> y, double scale,
                                 std::span<double> grad) {
    check_targets(model, y);
    const std::vector<double> probs = slot_probabilities(model, x);
    for (std::size_t s = 0; s < model.slot_count(); ++s) {
        for (std::size_t v = 0; v < model.arity(); ++v) {
            // d log softmax(z)[y] / dz_v = 1[v == y] - p_v
            const double indicator = static_cast<std::size_t>(y[s]) == v ? 1.0 : 0.0;
            const double coeff = scale * (indicator - probs[s * model.arity() + v]);
            if (coeff == 0.0) {
                continue;
            }
            double *row = grad.data() + model.offset(s, v);
            for (const auto &[index, value] : x.entries) {
                row[index] += coeff * value;
            }
        }
    }
}

std::vector<int> predict_slots(const SlotScorer &model, const FeatureVector &x) {
    check_input(model, x);
    std::vector<int> out;
    out.reserve(model.slot_count());
    std::vector<double> buffer(model.arity());
    for (std::size_t s = 0; s < model.slot_count(); ++s) {
        model.logits(s, x, buffer);
        // max_element returns the first maximum: ties go to the smaller value
        out.push_back(static_cast<int>(std::max_element(buffer.begin(), buffer.end()) - buffer.begin()));
    }
    return out;
}

Prediction predict(const SlotScorer &model, const FeatureVector &x) {
    if (is_crc(model.task())) {
        throw_config("WrongTask", "predict() needs an SP scorer");
    }
    const std::vector<int> slots = predict_slots(model, x);
    Prediction prediction;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        prediction.values[model.slot_emotions()[s]] = slots[s];
    }
    prediction.status = ParseStatus::ok;
    prediction.raw = render_sp_target(prediction.values);
    return prediction;
}

std::vector<int> slot_values(const SlotScorer &model, const LabelMap &values) {
    if (values.size() != model.slot_emotions().size()) {
        throw_data("SlotMismatch", "label map has " + std::to_string(values.size()) + " emotions, model has " + std::to_string(model.slot_emotions().size()) + " slots");
    }
    std::vector<int> y;
    y.reserve(values.size());
    for (const Emotion e : model.slot_emotions()) {
        const auto it = values.find(e);
        if (it == values.end()) {
            throw_data("SlotMismatch", "label map lacks " + std::string{ to_string(e) });
        }
        y.push_back(it->second);
    }
    return y;
}

double sft_loss(const SlotScorer &model, std::span<const Example> batch) {
    if (batch.empty()) {
        throw_config("EmptyBatch", "sft_loss needs a non-empty batch");
    }
    double total = 0.0;
    for (const Example &example : batch) {
        total -= logprob(model, example.x, example.y).total_logprob;
    }
    return total / static_cast<double>(batch.size());
}

SftStep sft_step(const SlotScorer &model, std::span<const Example> batch) {
    if (batch.empty()) {
        throw_config("EmptyBatch", "sft_step needs a non-empty batch");
    }
    SftStep step;
    step.gradient.assign(model.parameters().size(), 0.0);
    const double scale = -1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const Example &example : batch) {
        total -= logprob(model, example.x, example.y).total_logprob;
        accumulate_logprob_gradient(model, example.x, example.y, scale, step.gradient);
    }
    step.loss = total / static_cast<double>(batch.size());
    return step;
}

void write_checkpoint(std::ostream &out, std::span<const SlotScorer> scorers, const std::string &metadata_json) {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, metadata_json.size());
    out.write(metadata_json.data(), static_cast<std::streamsize>(metadata_json.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(scorers.size()));
    for (const SlotScorer &scorer : scorers) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(scorer.task()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(scorer.slot_count()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(scorer.arity()));
        put<std::uint64_t>(out, scorer.feature_dim());
        put<std::uint64_t>(out, scorer.input_dim());
        put<std::uint32_t>(out, static_cast<std::uint32_t>(scorer.slot_emotions().size()));
        for (const Emotion e : scorer.slot_emotions()) {
            put<std::uint8_t>(out, static_cast<std::uint8_t>(e));
        }
        for (const double w : scorer.parameters()) {
            put<double>(out, w);
        }
    }
}

void save_checkpoint(const std::filesystem::path &path, std::span<const SlotScorer> scorers, const std::string &metadata_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw_data("FileNotWritable", "cannot write " + path.string());
    }
    write_checkpoint(out, scorers, metadata_json);
}

SlotScorer read_scorer(std::istream &in) {
    const auto task_raw = get<std::uint8_t>(in);
    if (task_raw > static_cast<std::uint8_t>(PromptTask::crc_b)) {
        throw_data("BadCheckpoint", "unknown task id " + std::to_string(task_raw));
    }
    const auto task = static_cast<PromptTask>(task_raw);
    const auto slots = get<std::uint32_t>(in);
    const auto arity = get<std::uint32_t>(in);
    const auto feature_dim = get<std::uint64_t>(in);
    const auto input_dim = get<std::uint64_t>(in);
    const auto n_emotions = get<std::uint32_t>(in);
    std::vector<Emotion> emotions;
    for (std::uint32_t i = 0; i < n_emotions; ++i) {
        const auto e = get<std::uint8_t>(in);
        if (e >= kAllEmotions.size()) {
            throw_data("BadCheckpoint", "unknown emotion id");
        }
        emotions.push_back(static_cast<Emotion>(e));
    }
    const std::size_t expected_input = is_crc(task) ? crc_input_dim(feature_dim) : feature_dim;
    const std::size_t expected_slots = is_crc(task) ? 2 : emotions.size();
    if (arity != static_cast<std::uint32_t>(affect::arity(track_of(task))) || input_dim != expected_input ||
        slots != expected_slots || feature_dim < 2 || feature_dim > (std::uint64_t{ 1 } << 30)) {
        throw_data("BadCheckpoint", "inconsistent scorer shape");
    }
    SlotScorer scorer(task, std::move(emotions), slots, feature_dim, input_dim);
    for (double &w : scorer.weights_) {
        w = get<double>(in);
    }
    return scorer;
}

Checkpoint read_checkpoint(std::istream &in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw_data("BadCheckpoint", "not an affect checkpoint");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw_data("BadCheckpoint", "unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint checkpoint;
    const auto metadata_size = get<std::uint64_t>(in);
    if (metadata_size > (std::uint64_t{ 1 } << 30)) {
        throw_data("BadCheckpoint", "metadata too large");
    }
    checkpoint.metadata_json.resize(metadata_size);
    if (!in.read(checkpoint.metadata_json.data(), static_cast<std::streamsize>(metadata_size))) {
        throw_data("BadCheckpoint", "truncated metadata");
    }
    const auto count = get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        checkpoint.scorers.push_back(read_scorer(in));
    }
    return checkpoint;
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_data("FileNotFound", "cannot open checkpoint " + path.string());
    }
    return read_checkpoint(in);
}

}  // namespace affect
