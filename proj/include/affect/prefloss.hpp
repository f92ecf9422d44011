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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "affect/mutation.hpp"
#include "affect/optim.hpp"
#include "affect/scorer.hpp"

namespace affect {

enum class PrefMethod : std::uint8_t { dpo, simpo };

[[nodiscard]] std::string_view to_string(PrefMethod method) noexcept;

struct PrefConfig {
    double beta = 0.1;
    double gamma = 0.5;
    TrainConfig train = TrainConfig::dpo_defaults();

    /// beta 0.1 for DPO; beta 2.0 and gamma 0.5 for SimPO; method learning rates.
    [[nodiscard]] static PrefConfig defaults(PrefMethod method);
    /// Throws Error("InvalidPrefConfig").
    void validate() const;
};

/// Preference example over slot vectors of an SP scorer.
struct PrefExample {
    FeatureVector x;
    std::vector<int> chosen;
    std::vector<int> rejected;
};

[[nodiscard]] PrefExample to_pref_example(const SlotScorer &model, const PreferencePair &pair, const FeatureVector &x);

struct PrefLoss {
    double loss = 0.0;    // nats
    double margin = 0.0;  // method-specific chosen-minus-rejected score
    std::vector<double> gradient;  // wrt the policy; empty unless requested
};

/// -log sigmoid(beta * [(log pi(y_w) - log ref(y_w)) - (log pi(y_l) - log ref(y_l))]).
/// Margin is the bracketed term times beta. Throws Error("ArchitectureMismatch").
[[nodiscard]] PrefLoss dpo_loss(const SlotScorer &policy, const SlotScorer &reference, const PrefExample &example,
                                double beta, bool with_gradient = true);

/// -log sigmoid(beta/|y_w| log pi(y_w) - beta/|y_l| log pi(y_l) - gamma).
/// Margin excludes gamma.
[[nodiscard]] PrefLoss simpo_loss(const SlotScorer &policy, const PrefExample &example, double beta, double gamma,
                                  bool with_gradient = true);

/// log(1 + exp(z)) without overflow.
[[nodiscard]] double softplus(double z) noexcept;
[[nodiscard]] double sigmoid(double z) noexcept;

struct MarginPoint {
    std::size_t step = 0;
    double loss = 0.0;
    double margin = 0.0;
    double learning_rate = 0.0;
};

struct PrefTrainResult {
    SlotScorer policy;
    std::vector<MarginPoint> curve;  // row k: whole-set means after k steps
};

struct PrefEvaluation {
    double loss = 0.0;
    double margin = 0.0;
};

/// Mean loss and margin over all examples (parallel, ordered reduction).
[[nodiscard]] PrefEvaluation evaluate_preference(const SlotScorer &policy, const SlotScorer *reference,
                                                 std::span<const PrefExample> examples, PrefMethod method,
                                                 const PrefConfig &config);

/// Tunes a copy of `policy_init`; for DPO the frozen reference is a copy taken
/// before the first step.
[[nodiscard]] PrefTrainResult train_preference(const SlotScorer &policy_init, std::span<const PrefExample> examples,
                                               PrefMethod method, const PrefConfig &config);

}  // namespace affect
