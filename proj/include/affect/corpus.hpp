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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace affect {

/// The six emotion categories in canonical order.
enum class Emotion : std::uint8_t { anger, fear, joy, sadness, surprise, disgust };

inline constexpr std::array<Emotion, 6> kAllEmotions{Emotion::anger, Emotion::fear, Emotion::joy,
                                                     Emotion::sadness, Emotion::surprise, Emotion::disgust};

[[nodiscard]] std::string_view to_string(Emotion emotion) noexcept;
/// Case-insensitive; surrounding whitespace is ignored.
[[nodiscard]] std::optional<Emotion> parse_emotion(std::string_view name) noexcept;

/// Track A is binary presence, track B is 0-3 intensity.
enum class Track : std::uint8_t { A, B };

[[nodiscard]] std::string_view to_string(Track track) noexcept;
[[nodiscard]] std::optional<Track> parse_track(std::string_view name) noexcept;
[[nodiscard]] constexpr int max_value(Track track) noexcept { return track == Track::A ? 1 : 3; }
/// Number of distinct label values for the track.
[[nodiscard]] constexpr int arity(Track track) noexcept { return max_value(track) + 1; }
[[nodiscard]] constexpr bool in_range(Track track, int value) noexcept { return value >= 0 && value <= max_value(track); }

/// Emotion -> value, iterated in canonical order.
using LabelMap = std::map<Emotion, int>;

struct LabelSet {
    std::string language;
    std::vector<Emotion> emotions;  // canonical order

    [[nodiscard]] bool contains(Emotion emotion) const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return emotions.size(); }
};

struct EmotionSample {
    std::string id;
    std::string language;
    std::string text;
    Track track{Track::A};
    LabelMap values;

    friend bool operator==(const EmotionSample &, const EmotionSample &) = default;
};

/// A loaded corpus. Immutable after loading by convention; share by const reference.
struct Dataset {
    Track track{Track::A};
    LabelSet labels;
    std::vector<EmotionSample> samples;
    std::vector<std::string> warnings;
};

struct Violation {
    enum class Kind { value_out_of_range, missing_value, unexpected_emotion, empty_id };
    Kind kind;
    std::optional<Emotion> emotion;

    friend bool operator==(const Violation &, const Violation &) = default;
};

[[nodiscard]] std::string_view to_string(Violation::Kind kind) noexcept;

/// Reports every invariant violation of `sample` against `labels`; empty iff valid.
[[nodiscard]] std::vector<Violation> validate_sample(const EmotionSample &sample, const LabelSet &labels);

/// Parses CSV with header `id,text,<emotion...>`. Columns that are not emotions
/// (other than id/text) are ignored. Throws Error with codes MissingColumn,
/// ValueOutOfRange, MissingValue, DuplicateId or MalformedCsv; messages name the row.
[[nodiscard]] Dataset parse_dataset_csv(std::istream &in, Track track, std::string_view language);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path &path, Track track, std::string_view language);

/// Writes the header `id,text,<label set in canonical order>` and quotes text fields.
void write_dataset_csv(std::ostream &out, const Dataset &dataset);
void save_dataset(const std::filesystem::path &path, const Dataset &dataset);

/// Normalized JSONL record: {id, language, track, text, values}.
[[nodiscard]] nlohmann::ordered_json sample_to_json(const EmotionSample &sample);
[[nodiscard]] EmotionSample sample_from_json(const nlohmann::json &record);

[[nodiscard]] nlohmann::ordered_json label_map_to_json(const LabelMap &values);
[[nodiscard]] LabelMap label_map_from_json(const nlohmann::json &object);

}  // namespace affect
