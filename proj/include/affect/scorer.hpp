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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/features.hpp"
#include "affect/templates.hpp"

namespace affect {

/// Surrogate for the generative model: each output slot (one per emotion for
/// SP, two conversation values for CRC) is an independent softmax over the
/// track's label values. Fixed template tokens have probability 1, so
/// log p(y|x) is the sum of per-slot log-softmax terms and |y| is the slot count.
class SlotScorer {
  public:
    /// Zero-initialized SP scorer with one slot per label-set emotion.
    [[nodiscard]] static SlotScorer sp(Track track, std::vector<Emotion> emotions, std::size_t feature_dim = kDefaultFeatureDim);
    /// Zero-initialized CRC scorer with slots [conversation1, conversation2].
    [[nodiscard]] static SlotScorer crc(Track track, std::size_t feature_dim = kDefaultFeatureDim);

    [[nodiscard]] PromptTask task() const noexcept { return task_; }
    [[nodiscard]] Track track() const noexcept { return track_of(task_); }
    [[nodiscard]] std::size_t slot_count() const noexcept { return slot_count_; }
    [[nodiscard]] std::size_t arity() const noexcept { return arity_; }
    /// Per-text hashed dimension D.
    [[nodiscard]] std::size_t feature_dim() const noexcept { return feature_dim_; }
    /// Length of each weight row (D for SP, 2D+6 for CRC).
    [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
    /// Slot emotions for SP scorers (canonical order); empty for CRC.
    [[nodiscard]] const std::vector<Emotion> &slot_emotions() const noexcept { return emotions_; }

    /// Flat weights laid out [slot][value][feature].
    [[nodiscard]] std::span<double> parameters() noexcept { return weights_; }
    [[nodiscard]] std::span<const double> parameters() const noexcept { return weights_; }
    [[nodiscard]] std::size_t offset(std::size_t slot, std::size_t value) const noexcept {
        return (slot * arity_ + value) * input_dim_;
    }

    /// Writes W[slot]·x into `out` (size arity()).
    void logits(std::size_t slot, const FeatureVector &x, std::span<double> out) const;

    [[nodiscard]] bool same_architecture(const SlotScorer &other) const noexcept;

    friend bool operator==(const SlotScorer &, const SlotScorer &) = default;

  private:
    SlotScorer(PromptTask task, std::vector<Emotion> emotions, std::size_t slots, std::size_t feature_dim, std::size_t input_dim);

    PromptTask task_{PromptTask::sp_a};
    std::vector<Emotion> emotions_;
    std::size_t slot_count_ = 0;
    std::size_t arity_ = 0;
    std::size_t feature_dim_ = 0;
    std::size_t input_dim_ = 0;
    std::vector<double> weights_;

    friend SlotScorer read_scorer(std::istream &in);
};

struct ScoredOutput {
    std::vector<double> per_slot_logprob;  // nats, each <= 0
    double total_logprob = 0.0;
    std::size_t slot_count = 0;
};

/// Throws Error("SlotMismatch") when `y` has the wrong length or an out-of-range value.
[[nodiscard]] ScoredOutput logprob(const SlotScorer &model, const FeatureVector &x, std::span<const int> y);

/// Per-slot probability tables (slot-major, arity entries each).
[[nodiscard]] std::vector<double> slot_probabilities(const SlotScorer &model, const FeatureVector &x);

/// grad += scale * d/dW log p(y|x).
void accumulate_logprob_gradient(const SlotScorer &model, const FeatureVector &x, std::span<const int> y, double scale,
                                 std::span<double> grad);

/// Argmax per slot, ties toward the smaller value.
[[nodiscard]] std::vector<int> predict_slots(const SlotScorer &model, const FeatureVector &x);

/// SP prediction: values keyed by slot emotion, status ok, raw = rendered target.
[[nodiscard]] Prediction predict(const SlotScorer &model, const FeatureVector &x);

/// SP slot vector for a label map (canonical slot order). Throws SlotMismatch.
[[nodiscard]] std::vector<int> slot_values(const SlotScorer &model, const LabelMap &values);

struct Example {
    FeatureVector x;
    std::vector<int> y;
};

/// Mean negative log-likelihood in nats.
[[nodiscard]] double sft_loss(const SlotScorer &model, std::span<const Example> batch);

struct SftStep {
    double loss = 0.0;
    std::vector<double> gradient;  // same layout as parameters()
};

/// Loss and exact gradient of the mean NLL. Accumulates in batch order.
[[nodiscard]] SftStep sft_step(const SlotScorer &model, std::span<const Example> batch);

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint: magic, version, metadata JSON, then each scorer's shape
/// and little-endian float64 weights. Byte-stable for a given state.
void write_checkpoint(std::ostream &out, std::span<const SlotScorer> scorers, const std::string &metadata_json);
void save_checkpoint(const std::filesystem::path &path, std::span<const SlotScorer> scorers, const std::string &metadata_json);

struct Checkpoint {
    std::vector<SlotScorer> scorers;
    std::string metadata_json;
};

/// Rejects bad magic and unknown versions with Error("BadCheckpoint").
[[nodiscard]] Checkpoint read_checkpoint(std::istream &in);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace affect
