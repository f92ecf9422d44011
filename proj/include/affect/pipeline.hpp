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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "affect/config.hpp"
#include "affect/corpus.hpp"
#include "affect/metrics.hpp"

namespace affect {

inline constexpr int kSchemaVersion = 1;

/// JSONL artifact: a header line {schema_version, kind, run_config, ...extra}
/// then one record per line.
void write_jsonl(const std::filesystem::path &path, std::string_view kind, const RunConfig &config,
                 const std::vector<nlohmann::ordered_json> &records,
                 const nlohmann::ordered_json &extra = nlohmann::ordered_json::object());

struct JsonlFile {
    nlohmann::json header;
    std::vector<nlohmann::json> records;
};

/// Throws Error("MissingArtifact"), Error("SchemaVersion") on a header with an
/// unknown version, Error("WrongArtifact") when `kind` differs.
[[nodiscard]] JsonlFile read_jsonl(const std::filesystem::path &path, std::string_view kind);

struct PrepareSummary {
    std::size_t samples = 0;
    std::size_t sp_instances = 0;
    std::size_t crc_instances = 0;
    std::size_t preference_pairs = 0;
};

/// Writes dataset.jsonl and sp.jsonl, plus crc.jsonl (crc) or pref.jsonl (dpo, simpo).
PrepareSummary cmd_prepare(const RunConfig &config);

struct TrainSummary {
    std::size_t steps = 0;
    double final_loss = 0.0;
    double final_margin = 0.0;  // preference methods only
};

/// Writes model.ckpt plus loss.csv (sp, crc) or margin.csv (dpo, simpo).
TrainSummary cmd_train(const RunConfig &config);

struct EvalSummary {
    MetricReport report;
    FailureRate failures;
};

/// Writes predictions.jsonl, report.json and report.txt.
EvalSummary cmd_eval(const RunConfig &config);

/// Labeled samples from a prepared dataset.jsonl.
[[nodiscard]] Dataset load_prepared_dataset(const std::filesystem::path &out_dir);

}  // namespace affect
