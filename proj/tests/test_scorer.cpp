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

#include "affect/features.hpp"
#include "affect/synthetic.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace affect {
namespace {

constexpr std::size_t kDim = 257;

TEST(Features, EmptyTextIsBiasOnly) {
    const FeatureVector x = featurize("", kDim);
    ASSERT_EQ(x.entries.size(), 1u);
    EXPECT_EQ(x.entries[0].first, 0u);
    EXPECT_EQ(x.entries[0].second, 1.0);
    EXPECT_EQ(x.dim, kDim);
}

TEST(Features, DeterministicAndCaseInsensitive) {
    EXPECT_EQ(featurize("Hello there, friend", kDim), featurize("Hello there, friend", kDim));
    EXPECT_EQ(featurize("HELLO There", kDim), featurize("hello there", kDim));
    const FeatureVector joy = featurize("Joy joy", kDefaultFeatureDim);
    ASSERT_EQ(joy.entries.size(), 2u);
    EXPECT_EQ(joy.entries[1].second, 2.0);
}

TEST(Features, HashIsPinned) {
    // FNV-1a 64 reference values
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
    const FeatureVector x = featurize("a", kDefaultFeatureDim);
    EXPECT_EQ(x.entries[1].first, 1 + 0xaf63dc4c8601ec8cULL % (kDefaultFeatureDim - 1));
}

TEST(Features, Tokenizer) {
    EXPECT_EQ(tokenize("I'm here!! día-2"), (std::vector<std::string_view>{ "I'm", "here", "día", "2" }));
    EXPECT_TRUE(tokenize(" ,.;").empty());
}

TEST(Features, CrcLayout) {
    const FeatureVector x = crc_features("happy", "sad day", Emotion::joy, kDim);
    EXPECT_EQ(x.dim, crc_input_dim(kDim));
    // two bias entries, one-hot focus at the tail
    EXPECT_EQ(x.entries.front().first, 0u);
    EXPECT_TRUE(std::any_of(x.entries.begin(), x.entries.end(), [](const auto &e) { return e.first == kDim; }));
    EXPECT_EQ(x.entries.back().first, 2 * kDim + static_cast<std::size_t>(Emotion::joy));
    EXPECT_EQ(x.entries.size(), 1 + 1 + 1 + 2 + 1u);
    EXPECT_NE(crc_features("happy", "x", Emotion::joy, kDim), crc_features("happy", "x", Emotion::fear, kDim));
    EXPECT_EQ(testing::error_code_of([] { (void)featurize("x", 1); }), "InvalidFeatureDim");
}

TEST(Scorer, ZeroWeightsUniformTrackA) {
    const SlotScorer model = SlotScorer::sp(Track::A, testing::kEnglish, kDim);
    const std::vector<int> y{ 0, 1, 0, 1, 0 };
    const ScoredOutput out = logprob(model, featurize("anything", kDim), y);
    EXPECT_NEAR(out.total_logprob, 5 * std::log(0.5), 1e-12);
    EXPECT_NEAR(out.total_logprob, -3.4657359027997265, 1e-12);
    EXPECT_EQ(out.slot_count, 5u);
}

TEST(Scorer, ZeroWeightsUniformTrackB) {
    const SlotScorer model = SlotScorer::sp(Track::B, testing::kEnglish, kDim);
    const ScoredOutput out = logprob(model, featurize("x", kDim), std::vector<int>{ 3, 2, 1, 0, 0 });
    EXPECT_NEAR(out.total_logprob, 5 * std::log(0.25), 1e-12);
}

// Property: each slot normalizes, per-slot values sum to the total and are <= 0.
TEST(Scorer, NormalizationProperty) {
    Rng rng(4);
    for (const Track track : { Track::A, Track::B }) {
        SlotScorer model = SlotScorer::sp(track, testing::random_label_set(rng), kDim);
        for (int trial = 0; trial < 50; ++trial) {
            testing::randomize(model, rng, 3.0);
            const FeatureVector x = featurize(testing::random_text(rng), kDim);
            const auto probs = slot_probabilities(model, x);
            for (std::size_t s = 0; s < model.slot_count(); ++s) {
                double sum = 0.0;
                for (std::size_t v = 0; v < model.arity(); ++v) {
                    sum += probs[s * model.arity() + v];
                }
                EXPECT_NEAR(sum, 1.0, 1e-12);
            }
            std::vector<int> y;
            for (std::size_t s = 0; s < model.slot_count(); ++s) {
                y.push_back(static_cast<int>(rng.uniform_index(model.arity())));
            }
            const ScoredOutput out = logprob(model, x, y);
            double total = 0.0;
            for (const double lp : out.per_slot_logprob) {
                EXPECT_LE(lp, 0.0);
                total += lp;
            }
            EXPECT_DOUBLE_EQ(total, out.total_logprob);
        }
    }
}

TEST(Scorer, SlotMismatch) {
    const SlotScorer model = SlotScorer::sp(Track::A, testing::kEnglish, kDim);
    const FeatureVector x = featurize("x", kDim);
    EXPECT_EQ(testing::error_code_of([&] { (void)logprob(model, x, std::vector<int>{ 0, 0 }); }), "SlotMismatch");
    EXPECT_EQ(testing::error_code_of([&] { (void)logprob(model, x, std::vector<int>{ 0, 0, 2, 0, 0 }); }), "SlotMismatch");
    EXPECT_EQ(testing::error_code_of([&] { (void)logprob(model, featurize("x", 16), std::vector<int>{ 0, 0, 0, 0, 0 }); }),
              "SlotMismatch");
    EXPECT_EQ(testing::error_code_of([&] { (void)slot_values(model, LabelMap{ { Emotion::joy, 1 } }); }), "SlotMismatch");
}

TEST(Scorer, SftZeroWeightsLoss) {
    const SlotScorer model = SlotScorer::sp(Track::A, testing::kEnglish, kDim);
    Rng rng(2);
    std::vector<Example> batch;
    for (int i = 0; i < 7; ++i) {
        batch.push_back({ featurize(testing::random_text(rng), kDim),
                          slot_values(model, testing::random_values(rng, Track::A, testing::kEnglish)) });
    }
    EXPECT_NEAR(sft_step(model, batch).loss, 5 * std::numbers::ln2, 1e-12);
    EXPECT_NEAR(sft_loss(model, batch), 5 * std::numbers::ln2, 1e-12);
}

TEST(Scorer, SftGradientMatchesFiniteDifferences) {
    Rng rng(10);
    for (const Track track : { Track::A, Track::B }) {
        SlotScorer model = SlotScorer::sp(track, testing::kEnglish, kDim);
        testing::randomize(model, rng);
        std::vector<Example> batch;
        for (int i = 0; i < 5; ++i) {
            batch.push_back({ featurize(testing::random_text(rng), kDim),
                              slot_values(model, testing::random_values(rng, track, testing::kEnglish)) });
        }
        const SftStep step = sft_step(model, batch);
        const auto coords = testing::active_coordinates(model, batch[0].x);
        for (int k = 0; k < 10; ++k) {
            const std::size_t i = coords[rng.uniform_index(coords.size())];
            const double fd = testing::central_difference(model, i, 1e-4, [&](const SlotScorer &m) { return sft_loss(m, batch); });
            EXPECT_LT(testing::relative_error(step.gradient[i], fd), 1e-5) << i;
        }
    }
}

TEST(Scorer, SingleStepLowersLoss) {
    SlotScorer model = SlotScorer::sp(Track::B, testing::kEnglish, kDim);
    const std::vector<Example> one{ { featurize("I am so happy today", kDim), { 0, 0, 3, 0, 1 } } };
    const SftStep step = sft_step(model, one);
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= 0.1 * step.gradient[i];
    }
    EXPECT_LT(sft_loss(model, one), step.loss);
}

TEST(Scorer, PredictZeroWeightsIsZero) {
    const SlotScorer model = SlotScorer::sp(Track::B, testing::kEnglish, kDim);
    const Prediction p = predict(model, featurize("whatever", kDim));
    EXPECT_EQ(p.status, ParseStatus::ok);
    for (const auto &[e, v] : p.values) {
        EXPECT_EQ(v, 0);
    }
    EXPECT_EQ(p.raw, "joy: 0, sadness: 0, fear: 0, anger: 0, surprise: 0.");
}

// Property: adding a constant to every logit of one slot (via the bias row) keeps the argmax.
TEST(Scorer, PredictShiftInvariance) {
    Rng rng(14);
    SlotScorer model = SlotScorer::sp(Track::B, testing::kEnglish, kDim);
    for (int trial = 0; trial < 100; ++trial) {
        testing::randomize(model, rng, 2.0);
        const FeatureVector x = featurize(testing::random_text(rng), kDim);
        const auto before = predict_slots(model, x);
        const std::size_t slot = rng.uniform_index(model.slot_count());
        const double shift = 10.0 * (rng.uniform_real() - 0.5);
        for (std::size_t v = 0; v < model.arity(); ++v) {
            model.parameters()[model.offset(slot, v)] += shift;  // bias feature is always 1
        }
        EXPECT_EQ(predict_slots(model, x), before);
    }
}

TEST(Scorer, SlotOrderIsCanonical) {
    const SlotScorer model = SlotScorer::sp(Track::A, { Emotion::surprise, Emotion::anger, Emotion::joy, Emotion::anger });
    EXPECT_EQ(model.slot_emotions(), (std::vector<Emotion>{ Emotion::anger, Emotion::joy, Emotion::surprise }));
    EXPECT_EQ(model.input_dim(), kDefaultFeatureDim);
    const SlotScorer crc = SlotScorer::crc(Track::B, 100);
    EXPECT_EQ(crc.slot_count(), 2u);
    EXPECT_EQ(crc.arity(), 4u);
    EXPECT_EQ(crc.input_dim(), 206u);
    EXPECT_EQ(crc.parameters().size(), 2u * 4u * 206u);
}

TEST(Scorer, CheckpointRoundTripIsByteStable) {
    Rng rng(15);
    SlotScorer sp = SlotScorer::sp(Track::B, testing::kEnglish, 64);
    SlotScorer crc = SlotScorer::crc(Track::B, 64);
    testing::randomize(sp, rng);
    testing::randomize(crc, rng);
    const std::vector<SlotScorer> heads{ sp, crc };
    std::stringstream first;
    write_checkpoint(first, heads, R"({"k":1})");
    const std::string bytes = first.str();
    std::istringstream in(bytes);
    const Checkpoint back = read_checkpoint(in);
    ASSERT_EQ(back.scorers.size(), 2u);
    EXPECT_EQ(back.scorers[0], sp);
    EXPECT_EQ(back.scorers[1], crc);
    EXPECT_EQ(back.metadata_json, R"({"k":1})");
    std::stringstream second;
    write_checkpoint(second, back.scorers, back.metadata_json);
    EXPECT_EQ(second.str(), bytes);
    EXPECT_EQ(bytes.substr(0, 8), "AFFCKPT1");
}

TEST(Scorer, CheckpointRejectsBadInput) {
    const auto read = [](std::string bytes) {
        return testing::error_code_of([&] {
            std::istringstream in(bytes);
            (void)read_checkpoint(in);
        });
    };
    EXPECT_EQ(read("NOTACKPT"), "BadCheckpoint");
    std::stringstream ok;
    write_checkpoint(ok, std::vector<SlotScorer>{ SlotScorer::sp(Track::A, { Emotion::joy }, 8) }, "{}");
    std::string wrong_version = ok.str();
    wrong_version[8] = 9;
    EXPECT_EQ(read(wrong_version), "BadCheckpoint");
    EXPECT_EQ(read(ok.str().substr(0, ok.str().size() - 3)), "BadCheckpoint");
}

TEST(Scorer, SeparableFitPredictsGold) {
    const Dataset d = make_separable_corpus(Track::A, 20, 5);
    SlotScorer model = SlotScorer::sp(Track::A, d.labels.emotions, kDefaultFeatureDim);
    std::vector<Example> data;
    for (const auto &s : d.samples) {
        data.push_back({ featurize(s.text), slot_values(model, s.values) });
    }
    // plain gradient descent; the optimizer has its own tests
    for (int it = 0; it < 300; ++it) {
        const SftStep step = sft_step(model, data);
        auto params = model.parameters();
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= 2.0 * step.gradient[i];
        }
    }
    for (const auto &s : d.samples) {
        EXPECT_EQ(predict(model, featurize(s.text)).values, s.values) << s.text;
    }
}

}  // namespace
}  // namespace affect
