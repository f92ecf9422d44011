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
#include <functional>
#include <span>
#include <vector>

#include "affect/scorer.hpp"

namespace affect {

struct TrainConfig {
    double learning_rate = 4e-4;
    std::size_t epochs = 3;
    std::size_t batch_size = 128;
    double adam_beta1 = 0.8;
    double adam_beta2 = 0.99;
    double adam_epsilon = 1e-8;
    double weight_decay = 0.0;
    double warmup_ratio = 0.1;
    std::uint64_t seed = 0;

    /// SFT and CRC runs use 4e-4, DPO 5e-6, SimPO 1e-6.
    [[nodiscard]] static TrainConfig sft_defaults() { return {}; }
    [[nodiscard]] static TrainConfig dpo_defaults() { TrainConfig c; c.learning_rate = 5e-6; return c; }
    [[nodiscard]] static TrainConfig simpo_defaults() { TrainConfig c; c.learning_rate = 1e-6; return c; }

    /// Throws Error("InvalidTrainConfig").
    void validate() const;
};

[[nodiscard]] std::size_t steps_per_epoch(std::size_t n_examples, std::size_t batch_size);
[[nodiscard]] std::size_t total_steps(std::size_t n_examples, const TrainConfig &config);
[[nodiscard]] std::size_t warmup_steps(std::size_t total, double warmup_ratio);

/// Learning rate used by optimizer step `step` (0-based): linear warmup from 0
/// over warmup_steps, then cosine decay reaching 0 at `total`.
[[nodiscard]] double learning_rate_at(std::size_t step, std::size_t total, const TrainConfig &config);

/// AdamW with decoupled weight decay and bias correction.
class AdamW {
  public:
    AdamW(std::size_t size, const TrainConfig &config);

    void step(std::span<double> params, std::span<const double> grad, double lr);
    [[nodiscard]] std::size_t steps_taken() const noexcept { return t_; }

  private:
    double beta1_;
    double beta2_;
    double epsilon_;
    double weight_decay_;
    std::size_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

/// Fills `grad` (pre-zeroed, parameter layout) for the batch of example indices
/// and returns the batch loss.
using BatchObjective = std::function<double(std::span<const std::size_t> batch, std::span<double> grad)>;
/// Called after every optimizer step with (1-based step count, batch loss, lr used).
using StepObserver = std::function<void(std::size_t step, double loss, double lr)>;

/// Shared optimization loop: seeded per-epoch shuffles, ceil(n/batch) batches per
/// epoch, AdamW and the warmup/cosine schedule. Throws Error("NonFiniteLoss")
/// naming the step when the loss or gradient is not finite.
void optimize(SlotScorer &model, std::size_t n_examples, const TrainConfig &config, const BatchObjective &objective,
              const StepObserver &observer = {});

struct LossPoint {
    std::size_t step = 0;
    double loss = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    SlotScorer model;
    std::vector<LossPoint> curve;  // one point per optimizer step
    double final_loss = 0.0;       // mean NLL over all data after training
};

/// Supervised fine-tuning on (x, y) examples.
[[nodiscard]] TrainResult train(SlotScorer model, std::span<const Example> data, const TrainConfig &config);

}  // namespace affect
