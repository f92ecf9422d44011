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

#include "affect/config.hpp"

#include "affect/error.hpp"
#include "affect/text.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace affect {

namespace {

namespace pt = boost::property_tree;

std::uint64_t parse_u64(const std::string &key, std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw_config("InvalidValue", key + " expects a non-negative integer, got '" + std::string{ text } + "'");
    }
    return value;
}

double parse_double(const std::string &key, std::string_view text) {
    const std::string s{ trim(text) };
    try {
        std::size_t used = 0;
        const double value = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception &) {
        throw_config("InvalidValue", key + " expects a number, got '" + s + "'");
    }
}

std::string path_string(const std::filesystem::path &p) { return p.generic_string(); }

using Setter = std::function<void(RunConfig &, const std::string &key, const std::string &value)>;

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &value) {
    std::filesystem::path p{ std::string{ trim(value) } };
    if (p.is_relative() && !base.empty()) {
        p = base / p;
    }
    return p.lexically_normal();
}

std::map<std::string, Setter> make_setters(const std::filesystem::path &base) {
    std::map<std::string, Setter> s;
    s["run.language"] = [](RunConfig &c, const std::string &, const std::string &v) { c.language = to_lower(trim(v)); };
    s["run.seed"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.seed = parse_u64(k, v); };
    s["run.train_csv"] = [base](RunConfig &c, const std::string &, const std::string &v) { c.train_csv = resolve(base, v); };
    s["run.eval_csv"] = [base](RunConfig &c, const std::string &, const std::string &v) { c.eval_csv = resolve(base, v); };
    s["run.out"] = [base](RunConfig &c, const std::string &, const std::string &v) { c.out_dir = resolve(base, v); };
    s["run.sft_checkpoint"] = [base](RunConfig &c, const std::string &, const std::string &v) { c.sft_checkpoint = resolve(base, v); };
    s["scorer.feature_dim"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.feature_dim = parse_u64(k, v); };
    s["pairgen.cap_per_label"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.cap_per_label = parse_u64(k, v); };
    s["pairgen.sp_mix_ratio"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.sp_mix_ratio = parse_double(k, v); };
    s["mutation.reps"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.mutation_reps = parse_u64(k, v); };
    s["vote.n"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.vote_n = parse_u64(k, v); };
    s["eval.fault_rate"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.fault_rate = parse_double(k, v); };
    s["pref.beta"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.beta = parse_double(k, v); };
    s["pref.gamma"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.gamma = parse_double(k, v); };

    const auto add_train = [&s](const std::string &section, TrainConfig RunConfig::*member) {
        const auto field = [member](RunConfig &c) -> TrainConfig & { return c.*member; };
        s[section + ".learning_rate"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).learning_rate = parse_double(k, v); };
        s[section + ".epochs"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).epochs = parse_u64(k, v); };
        s[section + ".batch_size"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).batch_size = parse_u64(k, v); };
        s[section + ".adam_beta1"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).adam_beta1 = parse_double(k, v); };
        s[section + ".adam_beta2"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).adam_beta2 = parse_double(k, v); };
        s[section + ".weight_decay"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).weight_decay = parse_double(k, v); };
        s[section + ".warmup_ratio"] = [field](RunConfig &c, const std::string &k, const std::string &v) { field(c).warmup_ratio = parse_double(k, v); };
    };
    add_train("train", &RunConfig::sft);
    // pref.train lives inside PrefConfig
    s["pref.learning_rate"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.learning_rate = parse_double(k, v); };
    s["pref.epochs"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.epochs = parse_u64(k, v); };
    s["pref.batch_size"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.batch_size = parse_u64(k, v); };
    s["pref.adam_beta1"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.adam_beta1 = parse_double(k, v); };
    s["pref.adam_beta2"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.adam_beta2 = parse_double(k, v); };
    s["pref.weight_decay"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.weight_decay = parse_double(k, v); };
    s["pref.warmup_ratio"] = [](RunConfig &c, const std::string &k, const std::string &v) { c.pref.train.warmup_ratio = parse_double(k, v); };
    return s;
}

nlohmann::ordered_json train_to_json(const TrainConfig &t) {
    nlohmann::ordered_json j;
    j["learning_rate"] = t.learning_rate;
    j["epochs"] = t.epochs;
    j["batch_size"] = t.batch_size;
    j["adam_beta1"] = t.adam_beta1;
    j["adam_beta2"] = t.adam_beta2;
    j["adam_epsilon"] = t.adam_epsilon;
    j["weight_decay"] = t.weight_decay;
    j["warmup_ratio"] = t.warmup_ratio;
    j["schedule"] = "cosine";
    return j;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::sp: return "sp";
        case Method::crc: return "crc";
        case Method::dpo: return "dpo";
        case Method::simpo: return "simpo";
    }
    return "sp";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    const std::string lowered = to_lower(trim(name));
    for (const Method m : { Method::sp, Method::crc, Method::dpo, Method::simpo }) {
        if (lowered == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

RunConfig RunConfig::defaults(Track track, Method method) {
    RunConfig c;
    c.track = track;
    c.method = method;
    c.cap_per_label = PairGenConfig::defaults(track).cap_per_label;
    c.mutation_reps = default_mutation_reps(track);
    c.vote_n = VoteConfig::defaults(track).n;
    c.sft = TrainConfig::sft_defaults();
    c.pref = PrefConfig::defaults(method == Method::simpo ? PrefMethod::simpo : PrefMethod::dpo);
    return c;
}

std::uint64_t RunConfig::stage_seed(std::string_view stage) const { return derive_seed(seed, stage); }

PairGenConfig RunConfig::pairgen_config() const { return PairGenConfig{ cap_per_label, stage_seed("pairgen") }; }

VoteConfig RunConfig::vote_config() const { return VoteConfig{ vote_n, stage_seed("vote") }; }

TrainConfig RunConfig::sft_config() const {
    TrainConfig t = sft;
    t.seed = stage_seed("train");
    return t;
}

PrefConfig RunConfig::pref_config() const {
    PrefConfig p = pref;
    p.train.seed = stage_seed("pref");
    return p;
}

PrefMethod RunConfig::pref_method() const { return method == Method::simpo ? PrefMethod::simpo : PrefMethod::dpo; }

void RunConfig::validate() const {
    if (feature_dim < 2 || feature_dim > (std::size_t{ 1 } << 30)) {
        throw_config("InvalidValue", "scorer.feature_dim must be in [2, 2^30]");
    }
    if (cap_per_label < 1) {
        throw_config("InvalidValue", "pairgen.cap_per_label must be at least 1");
    }
    if (!(sp_mix_ratio >= 0.0 && sp_mix_ratio <= 1.0)) {
        throw_config("InvalidValue", "pairgen.sp_mix_ratio must lie in [0, 1]");
    }
    if (mutation_reps < 1) {
        throw_config("InvalidValue", "mutation.reps must be at least 1");
    }
    if (vote_n < 1) {
        throw_config("InvalidValue", "vote.n must be at least 1");
    }
    if (!(fault_rate >= 0.0 && fault_rate <= 1.0)) {
        throw_config("InvalidValue", "eval.fault_rate must lie in [0, 1]");
    }
    if (language.empty()) {
        throw_config("InvalidValue", "run.language must not be empty");
    }
    sft.validate();
    pref.validate();
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["track"] = std::string{ to_string(track) };
    j["language"] = language;
    j["method"] = std::string{ to_string(method) };
    j["seed"] = seed;
    j["train_csv"] = path_string(train_csv);
    j["eval_csv"] = path_string(eval_csv);
    j["sft_checkpoint"] = path_string(sft_checkpoint);
    j["feature_dim"] = feature_dim;
    j["pairgen"] = { { "cap_per_label", cap_per_label }, { "sp_mix_ratio", sp_mix_ratio } };
    j["mutation"] = { { "reps", mutation_reps },
                      { "distribution", MutationDistribution::kPublished },
                      { "renormalized", true } };
    j["train"] = train_to_json(sft);
    nlohmann::ordered_json pref_json = train_to_json(pref.train);
    pref_json["beta"] = pref.beta;
    pref_json["gamma"] = pref.gamma;
    j["pref"] = std::move(pref_json);
    j["vote"] = { { "n", vote_n }, { "tie_break", "smallest" } };
    j["eval"] = { { "fault_rate", fault_rate } };
    j["lora"] = { { "rank", lora_rank }, { "alpha", lora_alpha }, { "used", false } };
    return j;
}

RunConfig parse_run_config(std::istream &in, const ConfigOverrides &overrides, const std::filesystem::path &base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw_config("ConfigSyntax", e.message() + " at line " + std::to_string(e.line()));
    }

    std::map<std::string, std::string> entries;
    for (const auto &[section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw_config("ConfigSyntax", "key '" + section + "' must appear under a [section]");
        }
        for (const auto &[key, value] : body) {
            entries[to_lower(section) + "." + to_lower(key)] = value.data();
        }
    }

    Track track = Track::A;
    Method method = Method::sp;
    if (const auto it = entries.find("run.track"); it != entries.end()) {
        const auto parsed = parse_track(it->second);
        if (!parsed) {
            throw_config("InvalidValue", "run.track must be A or B, got '" + it->second + "'");
        }
        track = *parsed;
        entries.erase(it);
    }
    if (const auto it = entries.find("run.method"); it != entries.end()) {
        const auto parsed = parse_method(it->second);
        if (!parsed) {
            throw_config("InvalidValue", "run.method must be sp, crc, dpo or simpo, got '" + it->second + "'");
        }
        method = *parsed;
        entries.erase(it);
    }
    track = overrides.track.value_or(track);
    method = overrides.method.value_or(method);

    RunConfig config = RunConfig::defaults(track, method);
    const auto setters = make_setters(base_dir);
    for (const auto &[key, value] : entries) {
        const auto setter = setters.find(key);
        if (setter == setters.end()) {
            throw_config("UnknownKey", "unknown configuration key '" + key + "'");
        }
        setter->second(config, key, value);
    }
    if (overrides.seed) {
        config.seed = *overrides.seed;
    }
    if (overrides.out_dir) {
        config.out_dir = *overrides.out_dir;
    }
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path &path, const ConfigOverrides &overrides) {
    std::ifstream in(path);
    if (!in) {
        throw_config("ConfigNotFound", "cannot open config " + path.string());
    }
    return parse_run_config(in, overrides, path.parent_path());
}

}  // namespace affect
