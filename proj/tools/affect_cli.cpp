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

// Command-line driver: prepare, train, eval, run (all three) and synth.

#include "affect/config.hpp"
#include "affect/error.hpp"
#include "affect/pipeline.hpp"
#include "affect/synthetic.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <iostream>
#include <sstream>

namespace {

int exit_code(affect::ErrorKind kind) {
    switch (kind) {
        case affect::ErrorKind::config: return 2;
        case affect::ErrorKind::data: return 3;
        case affect::ErrorKind::numeric: return 4;
    }
    return 1;
}

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string track;
    std::string method;
    std::string out;
};

affect::RunConfig resolve_config(const Flags &flags) {
    affect::ConfigOverrides overrides;
    overrides.seed = flags.seed;
    if (!flags.track.empty()) {
        overrides.track = affect::parse_track(flags.track);
        if (!overrides.track) {
            affect::throw_config("InvalidValue", "--track must be A or B");
        }
    }
    if (!flags.method.empty()) {
        overrides.method = affect::parse_method(flags.method);
        if (!overrides.method) {
            affect::throw_config("InvalidValue", "--method must be sp, crc, dpo or simpo");
        }
    }
    if (!flags.out.empty()) {
        overrides.out_dir = flags.out;
    }
    if (flags.config_path.empty()) {
        std::istringstream empty;
        return affect::parse_run_config(empty, overrides);
    }
    return affect::load_run_config(flags.config_path, overrides);
}

void prepare(const affect::RunConfig &config) {
    const auto s = affect::cmd_prepare(config);
    fmt::print("prepared {} samples: {} SP, {} CRC, {} preference pairs -> {}\n", s.samples, s.sp_instances,
               s.crc_instances, s.preference_pairs, config.out_dir.string());
}

void train(const affect::RunConfig &config) {
    const auto s = affect::cmd_train(config);
    if (affect::is_preference(config.method)) {
        fmt::print("trained {} steps, final loss {:.6f}, margin {:.6f}\n", s.steps, s.final_loss, s.final_margin);
    } else {
        fmt::print("trained {} steps, final loss {:.6f}\n", s.steps, s.final_loss);
    }
}

void eval(const affect::RunConfig &config) {
    const auto s = affect::cmd_eval(config);
    fmt::print("paper_macro {:.4f} paper_micro {:.4f} malformed {}/{}\n", s.report.paper_macro, s.report.paper_micro,
               s.failures.malformed, s.failures.total);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Emotion detection pipeline with a hashed-feature surrogate scorer" };
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config_path, "INI run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "Master seed");
    app.add_option("--track", flags.track, "A or B");
    app.add_option("--method", flags.method, "sp, crc, dpo or simpo");
    app.add_option("--out", flags.out, "Output directory");

    auto *prepare_cmd = app.add_subcommand("prepare", "Write SP/CRC/preference JSONL artifacts");
    auto *train_cmd = app.add_subcommand("train", "Train and write model.ckpt");
    auto *eval_cmd = app.add_subcommand("eval", "Predict on the eval set and write reports");
    auto *run_cmd = app.add_subcommand("run", "prepare, train and eval in sequence");

    auto *synth_cmd = app.add_subcommand("synth", "Write a separable toy corpus as CSV");
    std::size_t synth_n = 200;
    std::string synth_prefix = "syn";
    std::string synth_path;
    synth_cmd->add_option("-n,--count", synth_n, "Number of samples");
    synth_cmd->add_option("--prefix", synth_prefix, "Id prefix");
    synth_cmd->add_option("file", synth_path, "Output CSV")->required();

    for (CLI::App *sub : { prepare_cmd, train_cmd, eval_cmd, run_cmd, synth_cmd }) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth_cmd->parsed()) {
            const auto track = flags.track.empty() ? std::optional{ affect::Track::A } : affect::parse_track(flags.track);
            if (!track) {
                affect::throw_config("InvalidValue", "--track must be A or B");
            }
            const auto dataset = affect::make_separable_corpus(*track, synth_n, flags.seed.value_or(0), synth_prefix);
            affect::save_dataset(synth_path, dataset);
            fmt::print("wrote {} samples to {}\n", dataset.samples.size(), synth_path);
            return 0;
        }
        const affect::RunConfig config = resolve_config(flags);
        if (prepare_cmd->parsed() || run_cmd->parsed()) {
            prepare(config);
        }
        if (train_cmd->parsed() || run_cmd->parsed()) {
            train(config);
        }
        if (eval_cmd->parsed() || run_cmd->parsed()) {
            eval(config);
        }
    } catch (const affect::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
