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

#include "affect/optim.hpp"

#include "affect/error.hpp"
#include "affect/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace affect {

void TrainConfig::validate() const {
    const auto fail = [](const std::string &message) { throw_config("InvalidTrainConfig", message); };
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        fail("learning_rate must be a finite non-negative number");
    }
    if (epochs < 1) {
        fail("epochs must be at least 1");
    }
    if (batch_size < 1) {
        fail("batch_size must be at least 1");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        fail("adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) {
        fail("adam_epsilon must be positive");
    }
    if (!(weight_decay >= 0.0)) {
        fail("weight_decay must be non-negative");
    }
    if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0)) {
        fail("warmup_ratio must lie in [0, 1]");
    }
}

std::size_t steps_per_epoch(std::size_t n_examples, std::size_t batch_size) {
    return (n_examples + batch_size - 1) / batch_size;
}

std::size_t total_steps(std::size_t n_examples, const TrainConfig &config) {
    return config.epochs * steps_per_epoch(n_examples, config.batch_size);
}

std::size_t warmup_steps(std::size_t total, double warmup_ratio) {
    return static_cast<std::size_t>(std::ceil(warmup_ratio * static_cast<double>(total)));
}

double learning_rate_at(std::size_t step, std::size_t total, const TrainConfig &config) {
    const std::size_t warmup = warmup_steps(total, config.warmup_ratio);
    if (step < warmup) {
        return config.learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
    }
    const double span = static_cast<double>(std::max<std::size_t>(1, total - warmup));
    const double progress = std::min(1.0, static_cast<double>(step - warmup) / span);
    return config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamW::AdamW(std::size_t size, const TrainConfig &config)
    : beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      epsilon_(config.adam_epsilon),
      weight_decay_(config.weight_decay),
      m_(size, 0.0),
      v_(size, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grad, double lr) {
    ++t_;
    const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double m_hat = m_[i] / correction1;
        const double v_hat = v_[i] / correction2;
        params[i] -= lr * (m_hat / (std::sqrt(v_hat) + epsilon_) + weight_decay_ * params[i]);
    }
}

void optimize(SlotScorer &model, std::size_t n_examples, const TrainConfig &config, const BatchObjective &objective,
              const StepObserver &observer) {
    config.validate();
    if (n_examples == 0) {
        throw_data("EmptyTrainingSet", "training data is empty");
    }
    const std::size_t total = total_steps(n_examples, config);
    AdamW optimizer(model.parameters().size(), config);
    Rng rng(config.seed);
    std::vector<std::size_t> order(n_examples);
    std::vector<double> grad(model.parameters().size());

    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{ 0 });
        rng.shuffle(std::span<std::size_t>{ order });
        for (std::size_t begin = 0; begin < n_examples; begin += config.batch_size) {
            const std::size_t end = std::min(n_examples, begin + config.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double loss = objective(std::span<const std::size_t>{ order }.subspan(begin, end - begin), grad);
            const bool finite = std::isfinite(loss) &&
                                std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); });
            if (!finite) {
                throw_numeric("NonFiniteLoss", "non-finite loss or gradient at step " + std::to_string(step));
            }
            const double lr = learning_rate_at(step, total, config);
            optimizer.step(model.parameters(), grad, lr);
            ++step;
            if (observer) {
                observer(step, loss, lr);
            }
        }
    }
}

TrainResult train(SlotScorer model, std::span<const Example> data, const TrainConfig &config) {
    TrainResult result{ std::move(model), {}, 0.0 };
    optimize(
        result.model, data.size(), config,
        [&](std::span<const std::size_t> batch, std::span<double> grad) {
            const double scale = -1.0 / static_cast<double>(batch.size());
            double total = 0.0;
            for (const std::size_t index : batch) {
                const Example &example = data[index];
                total -= logprob(result.model, example.x, example.y).total_logprob;
                accumulate_logprob_gradient(result.model, example.x, example.y, scale, grad);
            }
            return total / static_cast<double>(batch.size());
        },
        [&](std::size_t step, double loss, double lr) { result.curve.push_back({ step, loss, lr }); });
    result.final_loss = sft_loss(result.model, data);
    return result;
}

}  // namespace affect
