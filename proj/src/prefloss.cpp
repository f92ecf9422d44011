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

#include "affect/prefloss.hpp"

#include "affect/error.hpp"
#include "affect/parallel.hpp"

#include <cmath>

namespace affect {

std::string_view to_string(PrefMethod method) noexcept {
    return method == PrefMethod::dpo ? "dpo" : "simpo";
}

PrefConfig PrefConfig::defaults(PrefMethod method) {
    if (method == PrefMethod::dpo) {
        return PrefConfig{ 0.1, 0.5, TrainConfig::dpo_defaults() };
    }
    return PrefConfig{ 2.0, 0.5, TrainConfig::simpo_defaults() };
}

void PrefConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw_config("InvalidPrefConfig", "beta must be positive");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw_config("InvalidPrefConfig", "gamma must be non-negative");
    }
    train.validate();
}

double softplus(double z) noexcept {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

PrefExample to_pref_example(const SlotScorer &model, const PreferencePair &pair, const FeatureVector &x) {
    return PrefExample{ x, slot_values(model, pair.chosen), slot_values(model, pair.rejected) };
}

namespace {

// Loss/margin of one example; when `grad` is non-empty adds scale * dloss/dtheta into it.
PrefLoss dpo_into(const SlotScorer &policy, const SlotScorer &reference, const PrefExample &example, double beta,
                  double scale, std::span<double> grad) {
    if (!policy.same_architecture(reference)) {
        throw_config("ArchitectureMismatch", "policy and reference scorers differ in shape");
    }
    const double policy_chosen = logprob(policy, example.x, example.chosen).total_logprob;
    const double policy_rejected = logprob(policy, example.x, example.rejected).total_logprob;
    const double ref_chosen = logprob(reference, example.x, example.chosen).total_logprob;
    const double ref_rejected = logprob(reference, example.x, example.rejected).total_logprob;

    PrefLoss out;
    out.margin = beta * ((policy_chosen - ref_chosen) - (policy_rejected - ref_rejected));
    out.loss = softplus(-out.margin);
    if (!grad.empty()) {
        // dL/dmargin = -sigmoid(-margin); the reference terms are constants
        const double coeff = -sigmoid(-out.margin) * beta * scale;
        accumulate_logprob_gradient(policy, example.x, example.chosen, coeff, grad);
        accumulate_logprob_gradient(policy, example.x, example.rejected, -coeff, grad);
    }
    return out;
}

PrefLoss simpo_into(const SlotScorer &policy, const PrefExample &example, double beta, double gamma, double scale,
                    std::span<double> grad) {
    const ScoredOutput chosen = logprob(policy, example.x, example.chosen);
    const ScoredOutput rejected = logprob(policy, example.x, example.rejected);
    const double scale_chosen = beta / static_cast<double>(chosen.slot_count);
    const double scale_rejected = beta / static_cast<double>(rejected.slot_count);

    PrefLoss out;
    out.margin = scale_chosen * chosen.total_logprob - scale_rejected * rejected.total_logprob;
    out.loss = softplus(-(out.margin - gamma));
    if (!grad.empty()) {
        const double coeff = -sigmoid(-(out.margin - gamma)) * scale;
        accumulate_logprob_gradient(policy, example.x, example.chosen, coeff * scale_chosen, grad);
        accumulate_logprob_gradient(policy, example.x, example.rejected, -coeff * scale_rejected, grad);
    }
    return out;
}

PrefLoss pref_loss(const SlotScorer &policy, const SlotScorer *reference, const PrefExample &example,
                   PrefMethod method, const PrefConfig &config, double scale, std::span<double> grad) {
    if (method == PrefMethod::dpo) {
        return dpo_into(policy, *reference, example, config.beta, scale, grad);
    }
    return simpo_into(policy, example, config.beta, config.gamma, scale, grad);
}

}  // namespace

PrefLoss dpo_loss(const SlotScorer &policy, const SlotScorer &reference, const PrefExample &example, double beta,
                  bool with_gradient) {
    std::vector<double> grad(with_gradient ? policy.parameters().size() : 0, 0.0);
    PrefLoss out = dpo_into(policy, reference, example, beta, 1.0, grad);
    out.gradient = std::move(grad);
    return out;
}

PrefLoss simpo_loss(const SlotScorer &policy, const PrefExample &example, double beta, double gamma,
                    bool with_gradient) {
    std::vector<double> grad(with_gradient ? policy.parameters().size() : 0, 0.0);
    PrefLoss out = simpo_into(policy, example, beta, gamma, 1.0, grad);
    out.gradient = std::move(grad);
    return out;
}

PrefEvaluation evaluate_preference(const SlotScorer &policy, const SlotScorer *reference,
                                   std::span<const PrefExample> examples, PrefMethod method, const PrefConfig &config) {
    if (method == PrefMethod::dpo && reference == nullptr) {
        throw_config("MissingReference", "DPO needs a reference scorer");
    }
    std::vector<PrefLoss> parts(examples.size());
    parallel_for(examples.size(), [&](std::size_t i) {
        parts[i] = pref_loss(policy, reference, examples[i], method, config, 0.0, {});
    });
    PrefEvaluation eval;
    for (const PrefLoss &part : parts) {
        eval.loss += part.loss;
        eval.margin += part.margin;
    }
    if (!examples.empty()) {
        eval.loss /= static_cast<double>(examples.size());
        eval.margin /= static_cast<double>(examples.size());
    }
    return eval;
}

PrefTrainResult train_preference(const SlotScorer &policy_init, std::span<const PrefExample> examples,
                                 PrefMethod method, const PrefConfig &config) {
    config.validate();
    if (examples.empty()) {
        throw_data("EmptyTrainingSet", "no preference pairs");
    }
    const SlotScorer reference = policy_init;
    const SlotScorer *ref = method == PrefMethod::dpo ? &reference : nullptr;
    PrefTrainResult result{ policy_init, {} };

    const PrefEvaluation initial = evaluate_preference(result.policy, ref, examples, method, config);
    result.curve.push_back({ 0, initial.loss, initial.margin, 0.0 });

    optimize(
        result.policy, examples.size(), config.train,
        [&](std::span<const std::size_t> batch, std::span<double> grad) {
            const double inv = 1.0 / static_cast<double>(batch.size());
            double total = 0.0;
            for (const std::size_t index : batch) {
                total += pref_loss(result.policy, ref, examples[index], method, config, inv, grad).loss;
            }
            return total * inv;
        },
        [&](std::size_t step, double, double lr) {
            const PrefEvaluation eval = evaluate_preference(result.policy, ref, examples, method, config);
            if (!std::isfinite(eval.loss) || !std::isfinite(eval.margin)) {
                throw_numeric("NonFiniteLoss", "non-finite preference loss after step " + std::to_string(step));
            }
            result.curve.push_back({ step, eval.loss, eval.margin, lr });
        });
    return result;
}

}  // namespace affect
