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

#include "affect/pairgen.hpp"

#include "affect/synthetic.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <set>

namespace affect {
namespace {

std::vector<EmotionSample> small_set(std::size_t n, Track track = Track::A) {
    Rng rng(1);
    std::vector<EmotionSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(testing::random_sample(rng, track, testing::kEnglish, "s" + std::to_string(i)));
    }
    return out;
}

std::set<std::pair<std::string, std::string>> id_pairs(const std::vector<ContrastivePair> &pairs) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto &p : pairs) {
        out.emplace(p.s1.id, p.s2.id);
    }
    return out;
}

TEST(PairGen, ThreeSamplesGiveAllSixOrderedPairs) {
    const auto data = small_set(3);
    const auto pairs = sample_pairs(data, Emotion::joy, PairGenConfig{ 3000, 5 });
    ASSERT_EQ(pairs.size(), 6u);
    EXPECT_EQ(id_pairs(pairs).size(), 6u);
    for (const auto &p : pairs) {
        EXPECT_NE(p.s1.id, p.s2.id);
        EXPECT_EQ(p.v1, p.s1.values.at(Emotion::joy));
        EXPECT_EQ(p.v2, p.s2.values.at(Emotion::joy));
        EXPECT_EQ(p.focus, Emotion::joy);
    }
}

TEST(PairGen, CapPerLabelDefaults) {
    EXPECT_EQ(PairGenConfig::defaults(Track::A).cap_per_label, 3000u);
    EXPECT_EQ(PairGenConfig::defaults(Track::B).cap_per_label, 6000u);
}

TEST(PairGen, EnglishTrackACapsEveryEmotion) {
    const Dataset d = make_separable_corpus(Track::A, 200, 3);
    const PairGenConfig config = PairGenConfig::defaults(Track::A, 9);
    for (const Emotion e : d.labels.emotions) {
        const auto pairs = sample_pairs(d.samples, e, config);
        EXPECT_EQ(pairs.size(), 3000u);
        EXPECT_EQ(id_pairs(pairs).size(), 3000u);
    }
}

TEST(PairGen, SameSeedSamePairs) {
    const auto data = small_set(40);
    const auto a = sample_pairs(data, Emotion::fear, PairGenConfig{ 100, 17 });
    const auto b = sample_pairs(data, Emotion::fear, PairGenConfig{ 100, 17 });
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].s1.id, b[i].s1.id);
        EXPECT_EQ(a[i].s2.id, b[i].s2.id);
    }
    const auto c = sample_pairs(data, Emotion::fear, PairGenConfig{ 100, 18 });
    EXPECT_NE(id_pairs(a), id_pairs(c));
}

TEST(PairGen, TooFewSamples) {
    const auto data = small_set(1);
    EXPECT_EQ(testing::error_code_of([&] { (void)sample_pairs(data, Emotion::joy, PairGenConfig{}); }), "TooFewSamples");
    // samples lacking the focus emotion are unusable
    const auto five = small_set(5);
    EXPECT_EQ(testing::error_code_of([&] { (void)sample_pairs(five, Emotion::disgust, PairGenConfig{}); }), "TooFewSamples");
    EXPECT_EQ(testing::error_code_of([&] { (void)sample_pairs(five, Emotion::joy, PairGenConfig{ 0, 0 }); }), "InvalidCap");
}

TEST(PairGen, SummaryPhraseTable) {
    EXPECT_EQ(summarize_contrast(Track::A, Emotion::anger, 1, 0),
              "the speaker in Conversation1 expresses anger while the speaker in Conversation2 does not");
    EXPECT_EQ(summarize_contrast(Track::A, Emotion::anger, 0, 1),
              "the speaker in Conversation2 expresses anger while the speaker in Conversation1 does not");
    EXPECT_EQ(summarize_contrast(Track::B, Emotion::fear, 3, 1),
              "the speaker in Conversation1 expresses fear with higher intensity than the speaker in Conversation2");
    EXPECT_EQ(summarize_contrast(Track::B, Emotion::fear, 2, 0),
              "the speaker in Conversation1 expresses fear while the speaker in Conversation2 does not");
    for (const Track t : { Track::A, Track::B }) {
        for (int v = 0; v <= max_value(t); ++v) {
            const std::string s = summarize_contrast(t, Emotion::joy, v, v);
            EXPECT_TRUE(s.starts_with("both conversations show the same ")) << s;
            EXPECT_NE(s.find("joy"), std::string::npos);
        }
    }
}

// Property: every summary names the focus emotion and is a function of its inputs only.
TEST(PairGen, SummaryMentionsFocusEverywhere) {
    for (const Track t : { Track::A, Track::B }) {
        for (const Emotion e : kAllEmotions) {
            for (int a = 0; a <= max_value(t); ++a) {
                for (int b = 0; b <= max_value(t); ++b) {
                    const std::string s = summarize_contrast(t, e, a, b);
                    EXPECT_NE(s.find(to_string(e)), std::string::npos);
                    EXPECT_EQ(s, summarize_contrast(t, e, a, b));
                }
            }
        }
    }
}

TEST(PairGen, TrainingSetCounts) {
    const Dataset a = make_separable_corpus(Track::A, 200, 4);
    EXPECT_EQ(build_crc_training_set(a, PairGenConfig::defaults(Track::A)).size(), 15000u);
    const Dataset b = make_separable_corpus(Track::B, 200, 4);
    EXPECT_EQ(build_crc_training_set(b, PairGenConfig::defaults(Track::B)).size(), 30000u);
    EXPECT_EQ(build_crc_training_set(a, PairGenConfig{ 1, 0 }).size(), 5u);
}

// Property: |output| = sum over labels of min(cap, n(n-1)); targets parse back to gold.
TEST(PairGen, CountsAndTargetsProperty) {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        Dataset d;
        d.track = trial % 2 == 0 ? Track::A : Track::B;
        d.labels = LabelSet{ "eng", testing::random_label_set(rng) };
        const std::size_t n = 2 + rng.uniform_index(8);
        for (std::size_t i = 0; i < n; ++i) {
            d.samples.push_back(testing::random_sample(rng, d.track, d.labels.emotions, "p" + std::to_string(i)));
        }
        const std::size_t cap = 1 + rng.uniform_index(100);
        const auto instances = build_crc_training_set(d, PairGenConfig{ cap, rng.uniform_index(1000) });
        EXPECT_EQ(instances.size(), d.labels.size() * std::min(cap, n * (n - 1)));
        std::map<std::string, const EmotionSample *> by_id;
        for (const auto &s : d.samples) {
            by_id[s.id] = &s;
        }
        std::set<std::tuple<Emotion, std::string, std::string>> seen;
        for (const PromptInstance &inst : instances) {
            ASSERT_EQ(inst.meta.ids.size(), 2u);
            ASSERT_NE(inst.meta.ids[0], inst.meta.ids[1]);
            EXPECT_TRUE(seen.emplace(*inst.meta.focus, inst.meta.ids[0], inst.meta.ids[1]).second);
            const auto out = parse_crc_output(inst.target, d.track);
            ASSERT_TRUE(out);
            EXPECT_EQ(out->value1, by_id.at(inst.meta.ids[0])->values.at(*inst.meta.focus));
            EXPECT_EQ(out->value2, by_id.at(inst.meta.ids[1])->values.at(*inst.meta.focus));
        }
    }
}

// Draws are uniform over ordered pairs: cap 1 over many seeds, chi-square goodness of fit.
TEST(PairGen, UniformOverOrderedPairs) {
    const auto data = small_set(4);
    std::map<std::pair<std::string, std::string>, double> counts;
    const int trials = 12000;
    for (int seed = 0; seed < trials; ++seed) {
        const auto pairs = sample_pairs(data, Emotion::anger, PairGenConfig{ 1, static_cast<std::uint64_t>(seed) });
        counts[{ pairs[0].s1.id, pairs[0].s2.id }] += 1;
    }
    ASSERT_EQ(counts.size(), 12u);
    const double expected = trials / 12.0;
    double stat = 0.0;
    for (const auto &[key, c] : counts) {
        stat += (c - expected) * (c - expected) / expected;
    }
    const boost::math::chi_squared dist(11);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001) << stat;
}

}  // namespace
}  // namespace affect
