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

#include "affect/pipeline.hpp"

#include "affect/error.hpp"
#include "affect/features.hpp"
#include "affect/inference.hpp"
#include "affect/mutation.hpp"
#include "affect/pairgen.hpp"
#include "affect/prefloss.hpp"
#include "affect/scorer.hpp"
#include "affect/templates.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace affect {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDatasetFile = "dataset.jsonl";
constexpr std::string_view kSpFile = "sp.jsonl";
constexpr std::string_view kCrcFile = "crc.jsonl";
constexpr std::string_view kPrefFile = "pref.jsonl";
constexpr std::string_view kModelFile = "model.ckpt";

void ensure_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw_config("OutputDir", "cannot create " + dir.string() + ": " + ec.message());
    }
}

std::ofstream open_output(const fs::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw_config("OutputDir", "cannot write " + path.string());
    }
    return out;
}

// Shortest round-trip form, so CSV bytes are stable across runs.
std::string num(double value) { return fmt::format("{}", value); }

nlohmann::ordered_json labels_to_json(const LabelSet &labels) {
    nlohmann::ordered_json emotions = nlohmann::ordered_json::array();
    for (const Emotion e : labels.emotions) {
        emotions.push_back(std::string{ to_string(e) });
    }
    return { { "language", labels.language }, { "emotions", emotions } };
}

LabelSet labels_from_json(const nlohmann::json &j) {
    LabelSet labels;
    labels.language = j.at("language").get<std::string>();
    for (const auto &name : j.at("emotions")) {
        const auto e = parse_emotion(name.get<std::string>());
        if (!e) {
            throw_data("BadArtifact", "unknown emotion in label set");
        }
        labels.emotions.push_back(*e);
    }
    return labels;
}

using SampleIndex = std::unordered_map<std::string, const EmotionSample *>;

SampleIndex index_samples(const Dataset &dataset) {
    SampleIndex index;
    for (const EmotionSample &s : dataset.samples) {
        index.emplace(s.id, &s);
    }
    return index;
}

const EmotionSample &lookup(const SampleIndex &index, const std::string &id) {
    const auto it = index.find(id);
    if (it == index.end()) {
        throw_data("BadArtifact", "artifact references unknown sample '" + id + "'");
    }
    return *it->second;
}

std::vector<Example> sp_examples(const JsonlFile &file, const Dataset &dataset, const SlotScorer &model) {
    const SampleIndex index = index_samples(dataset);
    std::vector<Example> examples;
    examples.reserve(file.records.size());
    for (const auto &record : file.records) {
        const PromptInstance instance = instance_from_json(record);
        if (instance.meta.ids.size() != 1) {
            throw_data("BadArtifact", "SP instance must name exactly one sample");
        }
        const Prediction target = parse_sp_output(instance.target, dataset.labels, dataset.track);
        if (target.status != ParseStatus::ok) {
            throw_data("BadArtifact", "unparseable SP target for '" + instance.meta.ids[0] + "'");
        }
        const EmotionSample &sample = lookup(index, instance.meta.ids[0]);
        examples.push_back({ featurize(sample.text, model.feature_dim()), slot_values(model, target.values) });
    }
    return examples;
}

std::vector<Example> crc_examples(const JsonlFile &file, const Dataset &dataset, const SlotScorer &model) {
    const SampleIndex index = index_samples(dataset);
    std::vector<Example> examples;
    examples.reserve(file.records.size());
    for (const auto &record : file.records) {
        const PromptInstance instance = instance_from_json(record);
        if (instance.meta.ids.size() != 2 || !instance.meta.focus) {
            throw_data("BadArtifact", "CRC instance must name two samples and a focus emotion");
        }
        const auto target = parse_crc_output(instance.target, dataset.track);
        if (!target) {
            throw_data("BadArtifact", "unparseable CRC target");
        }
        const EmotionSample &first = lookup(index, instance.meta.ids[0]);
        const EmotionSample &second = lookup(index, instance.meta.ids[1]);
        examples.push_back({ crc_features(first.text, second.text, *instance.meta.focus, model.feature_dim()),
                             { target->value1, target->value2 } });
    }
    return examples;
}

// Seeded subset of round(ratio * n) examples, kept in artifact order.
std::vector<Example> mix_subset(std::vector<Example> examples, double ratio, std::uint64_t seed) {
    const auto keep = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(examples.size())));
    if (keep >= examples.size()) {
        return examples;
    }
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>{ order });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    std::vector<Example> subset;
    subset.reserve(keep);
    for (const std::size_t i : order) {
        subset.push_back(std::move(examples[i]));
    }
    return subset;
}

std::string checkpoint_metadata(const RunConfig &config) {
    nlohmann::ordered_json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["kind"] = "checkpoint";
    meta["run_config"] = config.to_json();
    return meta.dump();
}

const SlotScorer &find_head(const Checkpoint &ckpt, bool crc, const fs::path &path) {
    for (const SlotScorer &s : ckpt.scorers) {
        if (is_crc(s.task()) == crc) {
            return s;
        }
    }
    throw_data("MissingArtifact", fmt::format("{} has no {} head", path.string(), crc ? "CRC" : "SP"));
}

Checkpoint load_checked(const fs::path &path, Track track) {
    if (!fs::exists(path)) {
        throw_data("MissingArtifact", "missing checkpoint " + path.string());
    }
    Checkpoint ckpt = load_checkpoint(path);
    for (const SlotScorer &s : ckpt.scorers) {
        if (s.track() != track) {
            throw_config("WrongTrack", path.string() + " was trained for another track");
        }
    }
    return ckpt;
}

}  // namespace

void write_jsonl(const fs::path &path, std::string_view kind, const RunConfig &config,
                 const std::vector<nlohmann::ordered_json> &records, const nlohmann::ordered_json &extra) {
    std::ofstream out = open_output(path);
    nlohmann::ordered_json header;
    header["schema_version"] = kSchemaVersion;
    header["kind"] = std::string{ kind };
    header["run_config"] = config.to_json();
    for (const auto &[key, value] : extra.items()) {
        header[key] = value;
    }
    out << header.dump() << '\n';
    for (const auto &record : records) {
        out << record.dump() << '\n';
    }
    if (!out) {
        throw_config("OutputDir", "write failed for " + path.string());
    }
}

JsonlFile read_jsonl(const fs::path &path, std::string_view kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_data("MissingArtifact", "missing artifact " + path.string() + "; run prepare first");
    }
    JsonlFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw_data("BadArtifact", fmt::format("{} line {}: {}", path.string(), line_no, e.what()));
        }
        if (line_no == 1) {
            file.header = std::move(value);
            continue;
        }
        file.records.push_back(std::move(value));
    }
    if (!file.header.is_object() || !file.header.contains("schema_version")) {
        throw_data("SchemaVersion", path.string() + " has no schema_version header");
    }
    if (file.header["schema_version"] != kSchemaVersion) {
        throw_data("SchemaVersion", fmt::format("{} has unsupported schema_version {}", path.string(),
                                                file.header["schema_version"].dump()));
    }
    if (file.header.value("kind", std::string{}) != kind) {
        throw_data("WrongArtifact", fmt::format("{} is not a {} artifact", path.string(), kind));
    }
    return file;
}

Dataset load_prepared_dataset(const fs::path &out_dir) {
    const JsonlFile file = read_jsonl(out_dir / kDatasetFile, "dataset");
    Dataset dataset;
    const auto track = parse_track(file.header.at("track").get<std::string>());
    if (!track) {
        throw_data("BadArtifact", "dataset header has an invalid track");
    }
    dataset.track = *track;
    dataset.labels = labels_from_json(file.header.at("labels"));
    for (const auto &record : file.records) {
        dataset.samples.push_back(sample_from_json(record));
    }
    return dataset;
}

PrepareSummary cmd_prepare(const RunConfig &config) {
    config.validate();
    if (config.train_csv.empty()) {
        throw_config("MissingPath", "run.train_csv is required for prepare");
    }
    const Dataset dataset = load_dataset(config.train_csv, config.track, config.language);
    ensure_dir(config.out_dir);

    PrepareSummary summary;
    summary.samples = dataset.samples.size();

    std::vector<nlohmann::ordered_json> records;
    for (const EmotionSample &s : dataset.samples) {
        records.push_back(sample_to_json(s));
    }
    const nlohmann::ordered_json dataset_extra = { { "track", std::string{ to_string(dataset.track) } },
                                                   { "labels", labels_to_json(dataset.labels) },
                                                   { "warnings", dataset.warnings } };
    write_jsonl(config.out_dir / kDatasetFile, "dataset", config, records, dataset_extra);

    records.clear();
    for (const EmotionSample &s : dataset.samples) {
        records.push_back(instance_to_json(render_sp(s)));
    }
    summary.sp_instances = records.size();
    write_jsonl(config.out_dir / kSpFile, "sp", config, records);

    if (config.method == Method::crc) {
        records.clear();
        for (const PromptInstance &instance : build_crc_training_set(dataset, config.pairgen_config())) {
            records.push_back(instance_to_json(instance));
        }
        summary.crc_instances = records.size();
        write_jsonl(config.out_dir / kCrcFile, "crc", config, records);
    } else if (is_preference(config.method)) {
        records.clear();
        const auto pairs = build_preference_dataset(dataset, config.mutation_reps, MutationDistribution{},
                                                    config.stage_seed("mutation"));
        for (const PreferencePair &pair : pairs) {
            records.push_back(preference_to_json(pair));
        }
        summary.preference_pairs = records.size();
        write_jsonl(config.out_dir / kPrefFile, "pref", config, records);
    }
    return summary;
}

TrainSummary cmd_train(const RunConfig &config) {
    config.validate();
    const Dataset dataset = load_prepared_dataset(config.out_dir);
    if (dataset.track != config.track) {
        throw_config("WrongTrack", "prepared dataset belongs to another track");
    }
    TrainSummary summary;

    if (!is_preference(config.method)) {
        const JsonlFile sp_file = read_jsonl(config.out_dir / kSpFile, "sp");
        std::vector<SlotScorer> heads;
        std::ofstream csv = open_output(config.out_dir / "loss.csv");
        csv << "head,step,loss,lr\n";
        const auto run_head = [&](const char *name, SlotScorer model, std::vector<Example> examples) {
            if (examples.empty()) {
                heads.push_back(std::move(model));
                return;
            }
            TrainConfig train_config = config.sft_config();
            train_config.seed = derive_seed(train_config.seed, name);
            TrainResult result = train(std::move(model), examples, train_config);
            for (const LossPoint &p : result.curve) {
                csv << name << ',' << p.step << ',' << num(p.loss) << ',' << num(p.learning_rate) << '\n';
            }
            summary.steps += result.curve.size();
            summary.final_loss = result.final_loss;
            heads.push_back(std::move(result.model));
        };

        SlotScorer sp_model = SlotScorer::sp(config.track, dataset.labels.emotions, config.feature_dim);
        std::vector<Example> sp_data = sp_examples(sp_file, dataset, sp_model);
        if (config.method == Method::crc) {
            sp_data = mix_subset(std::move(sp_data), config.sp_mix_ratio, config.stage_seed("mix"));
        }
        run_head("sp", std::move(sp_model), std::move(sp_data));
        if (config.method == Method::crc) {
            const JsonlFile crc_file = read_jsonl(config.out_dir / kCrcFile, "crc");
            SlotScorer crc_model = SlotScorer::crc(config.track, config.feature_dim);
            std::vector<Example> crc_data = crc_examples(crc_file, dataset, crc_model);
            run_head("crc", std::move(crc_model), std::move(crc_data));
        }
        save_checkpoint(config.out_dir / kModelFile, heads, checkpoint_metadata(config));
        return summary;
    }

    if (config.sft_checkpoint.empty()) {
        throw_config("MissingReference", fmt::format("{} needs run.sft_checkpoint pointing at an SFT model",
                                                     to_string(config.method)));
    }
    const Checkpoint sft = load_checked(config.sft_checkpoint, config.track);
    const SlotScorer &policy_init = find_head(sft, false, config.sft_checkpoint);
    if (policy_init.slot_emotions() != dataset.labels.emotions) {
        throw_config("LabelSetMismatch", "SFT checkpoint was trained on a different label set");
    }

    const JsonlFile pref_file = read_jsonl(config.out_dir / kPrefFile, "pref");
    const SampleIndex index = index_samples(dataset);
    std::vector<PrefExample> examples;
    examples.reserve(pref_file.records.size());
    for (const auto &record : pref_file.records) {
        const PreferencePair pair = preference_from_json(record, dataset.labels, dataset.track);
        const EmotionSample &sample = lookup(index, pair.id);
        examples.push_back(to_pref_example(policy_init, pair, featurize(sample.text, policy_init.feature_dim())));
    }

    const PrefTrainResult result = train_preference(policy_init, examples, config.pref_method(), config.pref_config());
    std::ofstream csv = open_output(config.out_dir / "margin.csv");
    csv << "step,loss,margin,lr\n";
    for (const MarginPoint &p : result.curve) {
        csv << p.step << ',' << num(p.loss) << ',' << num(p.margin) << ',' << num(p.learning_rate) << '\n';
    }
    summary.steps = result.curve.empty() ? 0 : result.curve.back().step;
    if (!result.curve.empty()) {
        summary.final_loss = result.curve.back().loss;
        summary.final_margin = result.curve.back().margin;
    }
    save_checkpoint(config.out_dir / kModelFile, std::span<const SlotScorer>{ &result.policy, 1 },
                    checkpoint_metadata(config));
    return summary;
}

EvalSummary cmd_eval(const RunConfig &config) {
    config.validate();
    if (config.eval_csv.empty()) {
        throw_config("MissingPath", "run.eval_csv is required for eval");
    }
    const Checkpoint ckpt = load_checked(config.out_dir / kModelFile, config.track);
    const Dataset eval_set = load_dataset(config.eval_csv, config.track, config.language);
    const SlotScorer &sp_head = find_head(ckpt, false, config.out_dir / kModelFile);
    if (sp_head.slot_emotions() != eval_set.labels.emotions) {
        throw_config("LabelSetMismatch", "evaluation label set differs from the trained model's");
    }

    const std::string method{ to_string(config.method) };
    std::vector<Prediction> predictions;
    std::vector<nlohmann::ordered_json> records;
    if (config.method == Method::crc) {
        const SlotScorer &crc_head = find_head(ckpt, true, config.out_dir / kModelFile);
        const Dataset anchors = load_prepared_dataset(config.out_dir);
        const auto results = crc_infer(crc_head, eval_set.samples, anchors.samples, eval_set.labels,
                                       config.vote_config());
        for (const CrcPrediction &r : results) {
            records.push_back(prediction_to_json(r.prediction.id, r.prediction, method, &r.votes));
            predictions.push_back(r.prediction);
        }
    } else {
        predictions = sp_infer(sp_head, eval_set.samples, FaultInjection{ config.fault_rate, config.stage_seed("fault") });
        for (const Prediction &p : predictions) {
            records.push_back(prediction_to_json(p.id, p, method));
        }
    }
    write_jsonl(config.out_dir / "predictions.jsonl", "predictions", config, records);

    EvalSummary summary;
    summary.report = evaluate(predictions, eval_set.samples, eval_set.labels, config.track);
    summary.failures = parse_failure_rate(predictions);
    const ErrorBreakdown breakdown = error_breakdown(predictions, eval_set.samples, eval_set.labels, config.track);

    nlohmann::ordered_json report;
    report["schema_version"] = kSchemaVersion;
    report["kind"] = "report";
    report["run_config"] = config.to_json();
    report["metrics"] = report_to_json(summary.report);
    report["parse_failures"] = { { "malformed", summary.failures.malformed },
                                 { "total", summary.failures.total },
                                 { "fraction", fmt::format("{}/{}", summary.failures.malformed, summary.failures.total) },
                                 { "rate", summary.failures.rate } };
    report["errors"] = breakdown_to_json(breakdown);
    // Scores of the full-size LLM recipe (English, track A); not comparable to the surrogate.
    report["reference"] = { { "sp_eng_track_a_macro", 0.828 }, { "sp_eng_track_a_micro", 0.808 } };
    {
        std::ofstream out = open_output(config.out_dir / "report.json");
        out << report.dump(2) << '\n';
    }

    std::ofstream txt = open_output(config.out_dir / "report.txt");
    txt << format_report_table({ { method, summary.report } }, eval_set.labels.language);
    txt << fmt::format("parse failures: {}/{} ({:.4f})\n", summary.failures.malformed, summary.failures.total,
                       summary.failures.rate);
    for (const std::string &w : summary.report.warnings) {
        txt << "warning: " << w << '\n';
    }
    return summary;
}

}  // namespace affect
