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

#include "affect/mutation.hpp"

#include "affect/synthetic.hpp"
#include "affect/templates.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <numeric>

namespace affect {
namespace {

constexpr std::array<double, 5> kPrinted{ 0.638, 0.261, 0.083, 0.016, 0.001 };

TEST(Mutation, PublishedValuesRenormalized) {
    EXPECT_EQ(MutationDistribution::kPublished, kPrinted);
    const MutationDistribution dist;
    double total = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) {
        EXPECT_NEAR(dist.probability(k), kPrinted[k - 1] / 0.999, 1e-15);
        total += dist.probability(k);
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_EQ(dist.probability(0), 0.0);
    EXPECT_EQ(dist.probability(6), 0.0);
}

TEST(Mutation, FeasibleTruncation) {
    const MutationDistribution dist;
    const auto three = dist.feasible(3);
    ASSERT_EQ(three.size(), 3u);
    const double head = 0.638 + 0.261 + 0.083;
    EXPECT_NEAR(three[0], 0.638 / head, 1e-12);
    EXPECT_NEAR(three[2], 0.083 / head, 1e-12);
    EXPECT_EQ(dist.feasible(1), std::vector<double>{ 1.0 });
    EXPECT_EQ(dist.feasible(6).size(), 5u);
}

TEST(Mutation, FrequenciesMatchDistribution) {
    const MutationDistribution dist;
    Rng rng(2024);
    std::array<double, 5> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::size_t k = draw_mutation_count(dist, 5, rng);
        ASSERT_GE(k, 1u);
        ASSERT_LE(k, 5u);
        counts[k - 1] += 1;
    }
    double stat = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        const double p = kPrinted[k] / 0.999;
        EXPECT_NEAR(counts[k] / draws, p, 0.01);
        stat += (counts[k] - p * draws) * (counts[k] - p * draws) / (p * draws);
    }
    const boost::math::chi_squared chi(4);
    EXPECT_GT(boost::math::cdf(boost::math::complement(chi, stat)), 0.01);
}

TEST(Mutation, SingleLabelAlwaysOne) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(draw_mutation_count(MutationDistribution{}, 1, rng), 1u);
    }
    EXPECT_EQ(testing::error_code_of([&] { (void)draw_mutation_count(MutationDistribution{}, 0, rng); }),
              "InvalidLabelCount");
}

TEST(Mutation, SeedReproducesSequence) {
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 200; ++i) {
        EXPECT_EQ(draw_mutation_count(MutationDistribution{}, 5, a), draw_mutation_count(MutationDistribution{}, 5, b));
    }
}

TEST(Mutation, TrackABinaryComplement) {
    Rng rng(5);
    const LabelMap gold{ { Emotion::joy, 1 } };
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(mutate_labels(gold, Track::A, 1, rng).at(Emotion::joy), 0);
    }
}

TEST(Mutation, TrackBReplacementUniform) {
    Rng rng(6);
    const LabelMap gold{ { Emotion::fear, 2 } };
    std::map<int, double> counts;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) {
        counts[mutate_labels(gold, Track::B, 1, rng).at(Emotion::fear)] += 1;
    }
    ASSERT_EQ(counts.size(), 3u);
    EXPECT_EQ(counts.count(2), 0u);
    for (const int v : { 0, 1, 3 }) {
        EXPECT_NEAR(counts[v] / draws, 1.0 / 3.0, 0.02);
    }
}

TEST(Mutation, FullMutationDiffersEverywhere) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Track track = i % 2 == 0 ? Track::A : Track::B;
        const LabelMap gold = testing::random_values(rng, track, testing::kEnglish);
        const LabelMap rejected = mutate_labels(gold, track, gold.size(), rng);
        for (const auto &[e, v] : gold) {
            EXPECT_NE(rejected.at(e), v);
            EXPECT_TRUE(in_range(track, rejected.at(e)));
        }
    }
    EXPECT_EQ(testing::error_code_of([&] { (void)mutate_labels(LabelMap{ { Emotion::joy, 0 } }, Track::A, 2, rng); }),
              "InvalidMutationCount");
}

// Every emotion is equally likely to be picked for a single mutation.
TEST(Mutation, SubsetChoiceUniform) {
    Rng rng(8);
    LabelMap gold;
    for (const Emotion e : testing::kEnglish) {
        gold[e] = 0;
    }
    std::map<Emotion, double> counts;
    const int draws = 25000;
    for (int i = 0; i < draws; ++i) {
        for (const auto &[e, v] : mutate_labels(gold, Track::A, 1, rng)) {
            if (v != 0) {
                counts[e] += 1;
            }
        }
    }
    for (const Emotion e : testing::kEnglish) {
        EXPECT_NEAR(counts[e] / draws, 0.2, 0.015);
    }
}

TEST(Mutation, DefaultRepetitions) {
    EXPECT_EQ(default_mutation_reps(Track::A), 5u);
    EXPECT_EQ(default_mutation_reps(Track::B), 15u);
}

TEST(Mutation, DatasetCounts) {
    const Dataset a = make_separable_corpus(Track::A, 100, 1);
    EXPECT_EQ(build_preference_dataset(a, default_mutation_reps(Track::A), MutationDistribution{}, 3).size(), 500u);
    const Dataset b = make_separable_corpus(Track::B, 100, 1);
    EXPECT_EQ(build_preference_dataset(b, default_mutation_reps(Track::B), MutationDistribution{}, 3).size(), 1500u);
    EXPECT_EQ(testing::error_code_of([&] { (void)build_preference_dataset(a, 0, MutationDistribution{}, 3); }),
              "InvalidReps");
}

// Property: chosen parses to gold; rejected parses fine and differs exactly on `mutated`.
TEST(Mutation, PairInvariantsProperty) {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        Dataset d;
        d.track = trial % 2 == 0 ? Track::A : Track::B;
        d.labels = LabelSet{ "eng", testing::random_label_set(rng) };
        for (int i = 0; i < 10; ++i) {
            d.samples.push_back(testing::random_sample(rng, d.track, d.labels.emotions, "m" + std::to_string(i)));
        }
        const auto pairs = build_preference_dataset(d, 3, MutationDistribution{}, rng.uniform_index(1 << 20));
        ASSERT_EQ(pairs.size(), 30u);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const PreferencePair &p = pairs[i];
            const EmotionSample &src = d.samples[i / 3];
            EXPECT_EQ(p.id, src.id);
            EXPECT_EQ(p.prompt, render_sp(src).input);
            const Prediction chosen = parse_sp_output(chosen_text(p), d.labels, d.track);
            const Prediction rejected = parse_sp_output(rejected_text(p), d.labels, d.track);
            ASSERT_EQ(chosen.status, ParseStatus::ok);
            ASSERT_EQ(rejected.status, ParseStatus::ok);
            EXPECT_EQ(chosen.values, src.values);
            EXPECT_NE(rejected.values, chosen.values);
            std::vector<Emotion> differing;
            for (const auto &[e, v] : chosen.values) {
                if (rejected.values.at(e) != v) {
                    differing.push_back(e);
                }
            }
            EXPECT_EQ(differing, p.mutated);
            EXPECT_GE(p.mutated.size(), 1u);
            EXPECT_LE(p.mutated.size(), std::min<std::size_t>(5, d.labels.size()));
        }
    }
}

TEST(Mutation, DeterministicAndJsonRoundTrip) {
    const Dataset d = make_separable_corpus(Track::B, 20, 2);
    const auto a = build_preference_dataset(d, 15, MutationDistribution{}, 77);
    const auto b = build_preference_dataset(d, 15, MutationDistribution{}, 77);
    const auto c = build_preference_dataset(d, 15, MutationDistribution{}, 78);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].rejected, b[i].rejected);
        any_difference = any_difference || a[i].rejected != c[i].rejected;
        const PreferencePair back =
            preference_from_json(nlohmann::json::parse(preference_to_json(a[i]).dump()), d.labels, d.track);
        EXPECT_EQ(back.chosen, a[i].chosen);
        EXPECT_EQ(back.rejected, a[i].rejected);
        EXPECT_EQ(back.mutated, a[i].mutated);
        EXPECT_EQ(back.prompt, a[i].prompt);
    }
    EXPECT_TRUE(any_difference);
}

}  // namespace
}  // namespace affect
