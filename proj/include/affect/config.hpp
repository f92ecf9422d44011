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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "affect/corpus.hpp"
#include "affect/inference.hpp"
#include "affect/optim.hpp"
#include "affect/pairgen.hpp"
#include "affect/prefloss.hpp"

namespace affect {

enum class Method : std::uint8_t { sp, crc, dpo, simpo };

[[nodiscard]] std::string_view to_string(Method method) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;
[[nodiscard]] constexpr bool is_preference(Method method) noexcept {
    return method == Method::dpo || method == Method::simpo;
}

/// Everything a pipeline stage needs. Serialized verbatim into artifact metadata.
struct RunConfig {
    Track track{Track::A};
    std::string language = "eng";
    Method method{Method::sp};
    std::uint64_t seed = 0;

    std::filesystem::path train_csv;
    std::filesystem::path eval_csv;
    std::filesystem::path out_dir = "out";
    std::filesystem::path sft_checkpoint;  // required for dpo/simpo training

    std::size_t feature_dim = kDefaultFeatureDim;
    std::size_t cap_per_label = 3000;
    double sp_mix_ratio = 1.0;  // share of SP instances in the CRC run
    std::size_t mutation_reps = 5;
    TrainConfig sft;
    PrefConfig pref;
    std::size_t vote_n = 3;
    double fault_rate = 0.0;

    // LoRA settings of the original recipe; recorded, not used.
    int lora_rank = 8;
    int lora_alpha = 16;

    /// Track- and method-dependent defaults.
    [[nodiscard]] static RunConfig defaults(Track track, Method method);

    /// Sub-seeds derived from `seed` for each randomized stage.
    [[nodiscard]] std::uint64_t stage_seed(std::string_view stage) const;
    [[nodiscard]] PairGenConfig pairgen_config() const;
    [[nodiscard]] VoteConfig vote_config() const;
    [[nodiscard]] TrainConfig sft_config() const;
    [[nodiscard]] PrefConfig pref_config() const;
    [[nodiscard]] PrefMethod pref_method() const;

    /// Throws Error (config kind) on inconsistent settings.
    void validate() const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<Track> track;
    std::optional<Method> method;
    std::optional<std::filesystem::path> out_dir;
};

/// Parses an INI-style file (`key = value` lines under `[section]` headers).
/// Track and method are resolved first (file, then overrides) to pick the
/// defaults; remaining keys then override them. Unknown keys are errors.
/// Relative paths resolve against the file's directory.
[[nodiscard]] RunConfig parse_run_config(std::istream &in, const ConfigOverrides &overrides = {},
                                         const std::filesystem::path &base_dir = {});
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path &path, const ConfigOverrides &overrides = {});

}  // namespace affect
