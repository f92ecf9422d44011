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

#include "affect/inference.hpp"

#include "affect/features.hpp"
#include "affect/optim.hpp"
#include "affect/synthetic.hpp"
#include "affect/templates.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace affect {
namespace {

TEST(Vote, Examples) {
    const std::vector<int> a{ 1, 1, 0 };
    EXPECT_EQ(majority_vote(a, 2), 1);
    // tally {2:3, 3:3, 1:1}: tie broken toward the smaller value
    const std::vector<int> b{ 3, 2, 1, 3, 2, 3, 2 };
    EXPECT_EQ(majority_vote(b, 4), 2);
    const std::vector<int> c{ 0, 1 };
    EXPECT_EQ(majority_vote(c, 2), 0);
    EXPECT_EQ(testing::error_code_of([] { (void)majority_vote(std::vector<int>{}, 2); }), "EmptyVotes");
    EXPECT_NE(testing::error_code_of([] { (void)majority_vote(std::vector<int>{ 4 }, 4); }), "");
}

// Every multiset of size 1..7 over 0..3 against the brute-force oracle.
TEST(Vote, ExhaustiveAgainstOracle) {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 7; ++n) {
        std::vector<int> votes(n, 0);
        while (true) {
            EXPECT_EQ(majority_vote(votes, 4), testing::mode_oracle(votes));
            ++checked;
            std::size_t i = n;
            while (i > 0 && votes[i - 1] == 3) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++votes[i - 1];
            std::fill(votes.begin() + static_cast<std::ptrdiff_t>(i), votes.end(), votes[i - 1]);
        }
    }
    EXPECT_EQ(checked, 329u);  // sum over n of C(n+3, 3)
}

TEST(Vote, PermutationInvariant) {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> votes(1 + rng.uniform_index(7));
        for (int &v : votes) {
            v = static_cast<int>(rng.uniform_index(4));
        }
        const int expected = majority_vote(votes, 4);
        for (int k = 0; k < 5; ++k) {
            rng.shuffle(std::span<int>(votes));
            EXPECT_EQ(majority_vote(votes, 4), expected);
        }
    }
}

TEST(Vote, Defaults) {
    EXPECT_EQ(VoteConfig::defaults(Track::A).n, 3u);
    EXPECT_EQ(VoteConfig::defaults(Track::B).n, 7u);
}

// A CRC scorer that always answers `value` for both conversations.
SlotScorer constant_crc(Track track, int value, std::size_t dim = 64) {
    SlotScorer model = SlotScorer::crc(track, dim);
    auto params = model.parameters();
    for (std::size_t slot = 0; slot < 2; ++slot) {
        for (const Emotion e : kAllEmotions) {
            params[model.offset(slot, static_cast<std::size_t>(value)) + 2 * dim + static_cast<std::size_t>(e)] = 10.0;
        }
    }
    return model;
}

TEST(CrcInference, ConstantModel) {
    const Dataset train = make_separable_corpus(Track::B, 30, 1);
    const Dataset test = make_separable_corpus(Track::B, 5, 2, "t");
    const SlotScorer model = constant_crc(Track::B, 2);
    const auto results = crc_infer(model, test.samples, train.samples, train.labels, VoteConfig::defaults(Track::B, 4));
    ASSERT_EQ(results.size(), 5u);
    for (std::size_t i = 0; i < results.size(); ++i) {
        EXPECT_EQ(results[i].prediction.id, test.samples[i].id);
        EXPECT_EQ(results[i].prediction.status, ParseStatus::ok);
        ASSERT_EQ(results[i].votes.size(), train.labels.size());
        for (const auto &[e, outcome] : results[i].votes) {
            EXPECT_EQ(outcome.value, 2);
            EXPECT_EQ(results[i].prediction.values.at(e), 2);
            EXPECT_EQ(outcome.votes.size(), 7u);
            EXPECT_EQ(std::accumulate(outcome.tally.begin(), outcome.tally.end(), std::size_t{ 0 }), 7u);
            EXPECT_EQ(outcome.tally[2], 7u);
        }
    }
}

TEST(CrcInference, AnchorAgreementCountsGoldMatches) {
    Dataset train = make_separable_corpus(Track::A, 6, 1);
    for (auto &s : train.samples) {
        s.values[Emotion::joy] = 1;
    }
    const SlotScorer ones = constant_crc(Track::A, 1);
    const SlotScorer zeros = constant_crc(Track::A, 0);
    const EmotionSample &test = train.samples[0];
    const VoteConfig config{ 5, 9 };
    EXPECT_EQ(crc_infer_one(ones, test, train.samples, Emotion::joy, config).anchor_agreements, 5u);
    EXPECT_EQ(crc_infer_one(zeros, test, train.samples, Emotion::joy, config).anchor_agreements, 0u);
}

TEST(CrcInference, SameSeedSameVotes) {
    const Dataset train = make_separable_corpus(Track::B, 40, 1);
    const Dataset test = make_separable_corpus(Track::B, 10, 2, "t");
    SlotScorer model = SlotScorer::crc(Track::B, 64);
    Rng rng(5);
    testing::randomize(model, rng, 1.0);
    const auto a = crc_infer(model, test.samples, train.samples, train.labels, VoteConfig::defaults(Track::B, 1));
    const auto b = crc_infer(model, test.samples, train.samples, train.labels, VoteConfig::defaults(Track::B, 1));
    const auto c = crc_infer(model, test.samples, train.samples, train.labels, VoteConfig::defaults(Track::B, 2));
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].prediction.values, b[i].prediction.values);
        for (const auto &[e, outcome] : a[i].votes) {
            EXPECT_EQ(outcome.votes, b[i].votes.at(e).votes);
            EXPECT_EQ(outcome.value, majority_vote(outcome.votes, 4));
            differs = differs || outcome.votes != c[i].votes.at(e).votes;
        }
    }
    EXPECT_TRUE(differs);
}

TEST(CrcInference, Errors) {
    const Dataset train = make_separable_corpus(Track::A, 5, 1);
    const SlotScorer crc = SlotScorer::crc(Track::A, 16);
    const SlotScorer sp = SlotScorer::sp(Track::A, testing::kEnglish, 16);
    EXPECT_EQ(testing::error_code_of([&] {
                  (void)crc_infer_one(crc, train.samples[0], std::span<const EmotionSample>{}, Emotion::joy, VoteConfig{});
              }),
              "NoAnchors");
    EXPECT_EQ(testing::error_code_of(
                  [&] { (void)crc_infer_one(sp, train.samples[0], train.samples, Emotion::joy, VoteConfig{}); }),
              "WrongTask");
    EXPECT_EQ(testing::error_code_of(
                  [&] { (void)crc_infer_one(crc, train.samples[0], train.samples, Emotion::joy, VoteConfig{ 0, 0 }); }),
              "InvalidVoteCount");
    EXPECT_EQ(testing::error_code_of([&] {
                  (void)crc_infer(crc, train.samples, train.samples, LabelSet{ "eng", { Emotion::disgust } }, VoteConfig{});
              }),
              "NoAnchors");
}

TEST(SpInference, EmptyAndWrongTask) {
    const SlotScorer model = SlotScorer::sp(Track::A, testing::kEnglish, 32);
    EXPECT_TRUE(sp_infer(model, std::span<const EmotionSample>{}).empty());
    EXPECT_EQ(testing::error_code_of([&] { (void)sp_infer(SlotScorer::crc(Track::A, 8), std::span<const EmotionSample>{}); }),
              "WrongTask");
}

TEST(SpInference, ZeroModelPredictsZeros) {
    const Dataset d = make_separable_corpus(Track::B, 8, 1);
    const SlotScorer model = SlotScorer::sp(Track::B, d.labels.emotions, 32);
    for (const Prediction &p : sp_infer(model, d.samples)) {
        EXPECT_EQ(p.status, ParseStatus::ok);
        ASSERT_EQ(p.values.size(), 5u);
        for (const auto &[e, v] : p.values) {
            EXPECT_EQ(v, 0);
        }
    }
}

TEST(SpInference, TrainedModelRecoversLabels) {
    const Dataset d = make_separable_corpus(Track::A, 60, 3);
    SlotScorer model = SlotScorer::sp(Track::A, d.labels.emotions, 1024);
    std::vector<Example> data;
    for (const auto &s : d.samples) {
        data.push_back({ featurize(s.text, 1024), slot_values(model, s.values) });
    }
    TrainConfig c;
    c.learning_rate = 0.3;
    c.batch_size = 8;
    c.epochs = 10;
    model = train(model, data, c).model;
    const auto predictions = sp_infer(model, d.samples);
    ASSERT_EQ(predictions.size(), d.samples.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        EXPECT_EQ(predictions[i].id, d.samples[i].id);
        EXPECT_EQ(predictions[i].values, d.samples[i].values);
    }
    EXPECT_EQ(sp_infer(model, d.samples).size(), predictions.size());
}

TEST(FaultInjection, CorruptedOutputNeverParses) {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const Track track = trial % 2 == 0 ? Track::A : Track::B;
        const LabelSet labels{ "eng", testing::random_label_set(rng) };
        const std::string raw = render_sp_target(testing::random_values(rng, track, labels.emotions));
        ASSERT_EQ(parse_sp_output(raw, labels, track).status, ParseStatus::ok);
        const std::string bad = corrupt_output(raw, rng);
        EXPECT_EQ(parse_sp_output(bad, labels, track).status, ParseStatus::malformed) << bad;
    }
}

TEST(FaultInjection, RateMatchesRequest) {
    const Dataset d = make_separable_corpus(Track::A, 10000, 1);
    const SlotScorer model = SlotScorer::sp(Track::A, d.labels.emotions, 64);
    const auto predictions = sp_infer(model, d.samples, FaultInjection{ 0.3, 17 });
    const auto malformed = std::count_if(predictions.begin(), predictions.end(),
                                         [](const Prediction &p) { return p.status == ParseStatus::malformed; });
    EXPECT_NEAR(static_cast<double>(malformed) / 10000.0, 0.3, 0.02);
    const auto again = sp_infer(model, d.samples, FaultInjection{ 0.3, 17 });
    for (std::size_t i = 0; i < again.size(); ++i) {
        EXPECT_EQ(again[i].status, predictions[i].status);
    }
    for (const Prediction &p : sp_infer(model, d.samples, FaultInjection{ 0.0, 17 })) {
        EXPECT_EQ(p.status, ParseStatus::ok);
    }
}

TEST(Predictions, JsonRecord) {
    Prediction p = testing::ok_prediction("x1", { { Emotion::joy, 1 }, { Emotion::anger, 0 } });
    const auto j = prediction_to_json("x1", p, "sp");
    EXPECT_EQ(j["id"], "x1");
    EXPECT_EQ(j["method"], "sp");
    EXPECT_EQ(j["status"], "ok");
    EXPECT_EQ(j["values"]["joy"], 1);
    EXPECT_FALSE(j.contains("raw"));
    p.status = ParseStatus::malformed;
    p.values.clear();
    p.raw = "joy: ?";
    const auto bad = prediction_to_json("x1", p, "crc");
    EXPECT_EQ(bad["status"], "malformed");
    EXPECT_EQ(bad["raw"], "joy: ?");
}

}  // namespace
}  // namespace affect
