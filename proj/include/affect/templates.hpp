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

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affect/corpus.hpp"

namespace affect {

enum class PromptTask : std::uint8_t { sp_a, sp_b, crc_a, crc_b };

[[nodiscard]] std::string_view to_string(PromptTask task) noexcept;
[[nodiscard]] std::optional<PromptTask> parse_prompt_task(std::string_view name) noexcept;
[[nodiscard]] PromptTask sp_task(Track track) noexcept;
[[nodiscard]] PromptTask crc_task(Track track) noexcept;
[[nodiscard]] Track track_of(PromptTask task) noexcept;
[[nodiscard]] bool is_crc(PromptTask task) noexcept;

/// Raw template text with `{lan}`/`{text}` (SP) or `{label}`/`{lan1}`/`{text1}`/
/// `{lan2}`/`{text2}` (CRC) placeholders.
[[nodiscard]] std::string_view template_text(PromptTask task) noexcept;

/// Order in which SP outputs list emotions (the template's output column).
inline constexpr std::array<Emotion, 6> kOutputOrder{Emotion::joy, Emotion::sadness, Emotion::fear,
                                                     Emotion::anger, Emotion::surprise, Emotion::disgust};

/// Display name used for `{lan}`; unknown codes are returned unchanged.
[[nodiscard]] std::string language_display_name(std::string_view code);

/// Replaces `{name}` placeholders in a single left-to-right pass; substituted
/// values are never rescanned and unknown `{...}` sequences are kept verbatim.
[[nodiscard]] std::string fill_placeholders(std::string_view pattern,
                                            std::initializer_list<std::pair<std::string_view, std::string_view>> values);

struct PromptMeta {
    std::vector<std::string> ids;    // one id (SP) or [conversation1, conversation2] ids (CRC)
    std::optional<Emotion> focus;    // CRC only
    int test_position = 0;           // CRC only, 1 or 2

    friend bool operator==(const PromptMeta &, const PromptMeta &) = default;
};

struct PromptInstance {
    PromptTask task{PromptTask::sp_a};
    std::string input;
    std::string target;  // empty at inference
    PromptMeta meta;

    friend bool operator==(const PromptInstance &, const PromptInstance &) = default;
};

enum class ParseStatus : std::uint8_t { ok, malformed };

struct Prediction {
    std::string id;   // sample id when known; parsers leave it empty
    LabelMap values;  // empty when malformed
    ParseStatus status{ParseStatus::ok};
    std::string raw;
};

struct ContrastivePair;

[[nodiscard]] std::string render_sp_input(Track track, std::string_view language, std::string_view text);
/// `joy: 1, sadness: 0, ...` in output order over the map's keys, ending in a period.
[[nodiscard]] std::string render_sp_target(const LabelMap &values);
[[nodiscard]] PromptInstance render_sp(const EmotionSample &sample);

[[nodiscard]] std::string render_crc_target(Emotion focus, std::string_view summary, int value1, int value2);
/// `test_position` 2 renders s1 then s2; 1 renders s2 then s1. Throws
/// Error("FocusEmotionMissing") when either sample lacks the focus emotion.
[[nodiscard]] PromptInstance render_crc(const ContrastivePair &pair, int test_position);

/// Tolerant of case and whitespace, strict on structure: every label-set emotion
/// exactly once with an in-range integer. Never throws.
[[nodiscard]] Prediction parse_sp_output(std::string_view text, const LabelSet &labels, Track track);

struct CrcOutput {
    std::string label;
    std::string summary;
    int value1 = 0;
    int value2 = 0;
};

/// Parses `For emotion label "<label>", <summary>. Conversation1: <v1>, Conversation2: <v2>.`
/// Returns nullopt when malformed. Never throws.
[[nodiscard]] std::optional<CrcOutput> parse_crc_output(std::string_view text, Track track);

/// JSONL record {task, input, target, meta}.
[[nodiscard]] nlohmann::ordered_json instance_to_json(const PromptInstance &instance);
[[nodiscard]] PromptInstance instance_from_json(const nlohmann::json &record);

}  // namespace affect
