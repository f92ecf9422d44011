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

#include "affect/templates.hpp"

#include "affect/error.hpp"
#include "affect/pairgen.hpp"
#include "affect/text.hpp"

#include <algorithm>
#include <map>

namespace affect {

namespace {

constexpr std::string_view kLanguageList =
    "Afrikaans, Algerian Arabic, Amharic, Emakhuwa, Hausa, Igbo, Kinyarwanda, Moroccan Arabic, "
    "Mozambican Portuguese, Nigerian-Pidgin, Oromo, Setswana, Somali, Swahili, Sundanese, Tigrinya, "
    "Xitsonga, IsiXhosa, Yoruba, isiZulu Arabic, Chinese, Hindi, Indonesian, Javanese, Marathi English, "
    "German, Romanian, Russian, Latin American Spanish, Tatar, Ukrainian, Swedish, Mozambican Portuguese, "
    "and Brazilian Portuguese.";

std::string build_sp_a() {
    std::string t;
    t += "Task Description:\n";
    t += "You are tasked with determining the perceived emotion(s) of a speaker based on a conversation. "
         "Specifically, your goal is to predict the emotions that most people would associate with the "
         "speaker's last utterance. The possible emotions are: joy, sadness, fear, anger, surprise, and "
         "disgust. The conversation may be in any of the following languages: ";
    t += kLanguageList;
    t += "\n\nInstructions:\n";
    t += "1. The language of the conversation will be explicitly indicated at the first place.\n";
    t += "2. Each turn in the conversation will be marked with \"Speaker1\" or \"Speaker2\" to indicate the speaker.\n";
    t += "3. You need to predict the emotions based on the last utterance from \"Speaker1\" (and any additional "
         "context or dialogue history if provided).\n";
    t += "4. For each emotion, indicate whether it applies using binary labels: 1 (emotion is present) or 0 "
         "(emotion is absent).\n";
    t += "\nExample Output Format:\n";
    t += "joy: {{ 1 or 0 }}, sadness: {{ 1 or 0 }}, fear: {{ 1 or 0 }}, anger: {{ 1 or 0 }}, (optional) "
         "surprise: {{ 1 or 0 }}, (optional) disgust: {{ 1 or 0 }}.\n";
    t += "\nLanguage:\n{lan}\n\nContent:\nSpeaker1: {text}";
    return t;
}

std::string build_sp_b() {
    std::string t;
    t += "Task Description:\n";
    t += "You are tasked with predicting the intensity for each of the perceived emotion classes of a speaker "
         "based on a conversation. Specifically, your prediction should represent the emotional intensity most "
         "people associate with the speaker's last utterance. The possible emotion classes are: joy, sadness, "
         "fear, anger, surprise, and disgust. The conversation may be in any of the following languages: ";
    t += kLanguageList;
    t += "\n\nInstructions:\n";
    t += "1. The language of the conversation will be explicitly indicated at the first place.\n";
    t += "2. Each turn in the conversation will be marked with \"Speaker1\" or \"Speaker2\" to indicate the speaker.\n";
    t += "3. You need to predict the emotion intensity based on the last utterance from \"Speaker1\" (and any "
         "additional context or dialogue history if provided).\n";
    t += "4. For each emotion class, the ordinal intensity levels include: 0 for no emotion, 1 for a low degree "
         "of emotion, 2 for a moderate degree of emotion, and 3 for a high degree of emotion.\n";
    t += "\nExample Output Format:\n";
    t += "joy: {{ 0, 1, 2, or 3 }}, sadness: {{ 0, 1, 2, or 3 }}, fear: {{ 0, 1, 2, or 3 }}, anger: {{ 0, 1, 2, "
         "or 3 }}, (optional) surprise: {{ 0, 1, 2, or 3 }}, (optional) disgust: {{ 0, 1, 2, or 3 }}.\n";
    t += "\nLanguage:\n{lan}\n\nContent:\nSpeaker1: {text}";
    return t;
}

constexpr std::string_view kCrcConversations =
    "\nConversation1:\nLanguage: {lan1}\nSpeaker1: {text1}\n\nConversation2:\nLanguage: {lan2}\nSpeaker1: {text2}";

std::string build_crc_a() {
    std::string t;
    t += "Task Description:\n";
    t += "Your task is to compare and predict the perceived emotional label exhibited by the speaker in two "
         "separate conversations. The target emotion for comparison is \"{label}\". The conversation may be in "
         "any of the following languages: ";
    t += kLanguageList;
    t += "\n\nInstructions:\n";
    t += "1. The two conversations will be marked as \"Conversation1\" and \"Conversation2\". Each turn in the "
         "conversation will be marked as \"Speaker1\" or \"Speaker2\" to indicate the speaker.\n";
    t += "2. The language of the conversation will be explicitly stated at the beginning of each conversation.\n";
    t += "3. You only need to predict the emotions of \"Speaker1\" in both conversations. No predictions are "
         "required for \"Speaker2\".\n";
    t += "4. Your comparison and prediction should be based on the last utterance of \"Speaker1\" in each "
         "conversation, while also considering any additional background or dialogue history if provided.\n";
    t += "5. First, provide a brief summary of the comparison result between the two conversations. Then, use "
         "binary labels to indicate whether the specified emotion (\"{label}\") is present in each conversation: "
         "1 (emotion is present) or 0 (emotion is absent).\n";
    t += "\nExample Output Format:\n";
    t += "For emotion label \"{label}\", {{Brief summary of the comparison result}}. Conversation1: {{1 or 0}}, "
         "Conversation2: {{1 or 0}}.\n";
    t += kCrcConversations;
    return t;
}

std::string build_crc_b() {
    std::string t;
    t += "Task Description:\n";
    t += "Your task is to compare and predict the intensity of the specific perceived emotion class in two "
         "separate conversations. The target preceived emotion class for comparison is \"{label}\". The "
         "conversation may be in any of the following languages: ";
    t += kLanguageList;
    t += "\n\nInstructions:\n";
    t += "1. The two conversations will be marked as \"Conversation1\" and \"Conversation2\". Each turn in the "
         "conversation will be marked as \"Speaker1\" or \"Speaker2\" to indicate the speaker.\n";
    t += "2. The language of the conversation will be explicitly stated at the beginning of each conversation.\n";
    t += "3. You only need to predict the emotional intensity of \"Speaker1\" in both conversations. No "
         "predictions are required for \"Speaker2\".\n";
    t += "4. Your comparison and prediction should be based on the last utterance of \"Speaker1\" in each "
         "conversation, while also considering any additional background or dialogue history if provided.\n";
    t += "5. First, provide a brief summary of the comparison result between the two conversations. Then, use "
         "one of the four levels to indicate the target ordinal intensity:  0 for no emotion, 1 for a low degree "
         "of emotion, 2 for a moderate degree of emotion, and 3 for a high degree of emotion.\n";
    t += "\nExample Output Format:\n";
    t += "For emotion label \"{label}\", {{Brief summary of the comparison result}}.  Conversation1: {{ 0, 1, 2, "
         "or 3 }}, Conversation2: {{ 0, 1, 2, or 3 }}.\n";
    t += kCrcConversations;
    return t;
}

const std::map<std::string, std::string, std::less<>> &language_names() {
    static const std::map<std::string, std::string, std::less<>> names{
        { "afr", "Afrikaans" }, { "amh", "Amharic" }, { "arq", "Algerian Arabic" }, { "ary", "Moroccan Arabic" },
        { "chn", "Chinese" }, { "deu", "German" }, { "eng", "English" }, { "esp", "Latin American Spanish" },
        { "hau", "Hausa" }, { "hin", "Hindi" }, { "ibo", "Igbo" }, { "ind", "Indonesian" }, { "jav", "Javanese" },
        { "kin", "Kinyarwanda" }, { "mar", "Marathi" }, { "orm", "Oromo" }, { "pcm", "Nigerian-Pidgin" },
        { "ptbr", "Brazilian Portuguese" }, { "ptmz", "Mozambican Portuguese" }, { "ron", "Romanian" },
        { "rus", "Russian" }, { "som", "Somali" }, { "sun", "Sundanese" }, { "swa", "Swahili" },
        { "swe", "Swedish" }, { "tat", "Tatar" }, { "tir", "Tigrinya" }, { "tsn", "Setswana" },
        { "tso", "Xitsonga" }, { "ukr", "Ukrainian" }, { "vmw", "Emakhuwa" }, { "xho", "IsiXhosa" },
        { "yor", "Yoruba" }, { "zul", "isiZulu" },
    };
    return names;
}

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) {
        return false;
    }
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (ascii_lower(text[pos + i]) != word[i]) {
            return false;
        }
    }
    return true;
}

std::size_t ifind_last(std::string_view text, std::string_view word) {
    if (word.size() > text.size()) {
        return std::string_view::npos;
    }
    for (std::size_t pos = text.size() - word.size() + 1; pos-- > 0;) {
        if (iequals_prefix(text, pos, word)) {
            return pos;
        }
    }
    return std::string_view::npos;
}

Prediction malformed(std::string_view raw) {
    return Prediction{ {}, {}, ParseStatus::malformed, std::string{ raw } };
}

// Strips one trailing period (after whitespace trimming).
std::string_view strip_period(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.back() == '.') {
        s.remove_suffix(1);
    }
    return trim(s);
}

}  // namespace

std::string_view to_string(PromptTask task) noexcept {
    switch (task) {
        case PromptTask::sp_a: return "SP_A";
        case PromptTask::sp_b: return "SP_B";
        case PromptTask::crc_a: return "CRC_A";
        case PromptTask::crc_b: return "CRC_B";
    }
    return "SP_A";
}

std::optional<PromptTask> parse_prompt_task(std::string_view name) noexcept {
    for (const PromptTask task : { PromptTask::sp_a, PromptTask::sp_b, PromptTask::crc_a, PromptTask::crc_b }) {
        if (name == to_string(task)) {
            return task;
        }
    }
    return std::nullopt;
}

PromptTask sp_task(Track track) noexcept { return track == Track::A ? PromptTask::sp_a : PromptTask::sp_b; }
PromptTask crc_task(Track track) noexcept { return track == Track::A ? PromptTask::crc_a : PromptTask::crc_b; }
Track track_of(PromptTask task) noexcept {
    return (task == PromptTask::sp_a || task == PromptTask::crc_a) ? Track::A : Track::B;
}
bool is_crc(PromptTask task) noexcept { return task == PromptTask::crc_a || task == PromptTask::crc_b; }

std::string_view template_text(PromptTask task) noexcept {
    static const std::string sp_a = build_sp_a();
    static const std::string sp_b = build_sp_b();
    static const std::string crc_a = build_crc_a();
    static const std::string crc_b = build_crc_b();
    switch (task) {
        case PromptTask::sp_a: return sp_a;
        case PromptTask::sp_b: return sp_b;
        case PromptTask::crc_a: return crc_a;
        case PromptTask::crc_b: return crc_b;
    }
    return sp_a;
}

std::string language_display_name(std::string_view code) {
    const auto &names = language_names();
    const auto it = names.find(to_lower(trim(code)));
    return it == names.end() ? std::string{ code } : it->second;
}

std::string fill_placeholders(std::string_view pattern,
                              std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
    std::string out;
    out.reserve(pattern.size() + 256);
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        const std::size_t open = pattern.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(pattern.substr(pos));
            break;
        }
        out.append(pattern.substr(pos, open - pos));
        bool replaced = false;
        for (const auto &[name, value] : values) {
            if (pattern.compare(open + 1, name.size(), name) == 0 && open + 1 + name.size() < pattern.size() &&
                pattern[open + 1 + name.size()] == '}') {
                out.append(value);
                pos = open + name.size() + 2;
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            out.push_back('{');
            pos = open + 1;
        }
    }
    return out;
}

std::string render_sp_input(Track track, std::string_view language, std::string_view text) {
    const std::string lan = language_display_name(language);
    return fill_placeholders(template_text(sp_task(track)), { { "lan", lan }, { "text", text } });
}

std::string render_sp_target(const LabelMap &values) {
    std::string out;
    for (const Emotion e : kOutputOrder) {
        const auto it = values.find(e);
        if (it == values.end()) {
            continue;
        }
        if (!out.empty()) {
            out += ", ";
        }
        out += to_string(e);
        out += ": ";
        out += std::to_string(it->second);
    }
    out += '.';
    return out;
}

PromptInstance render_sp(const EmotionSample &sample) {
    PromptInstance instance;
    instance.task = sp_task(sample.track);
    instance.input = render_sp_input(sample.track, sample.language, sample.text);
    instance.target = render_sp_target(sample.values);
    instance.meta.ids = { sample.id };
    return instance;
}

std::string render_crc_target(Emotion focus, std::string_view summary, int value1, int value2) {
    std::string out = "For emotion label \"";
    out += to_string(focus);
    out += "\", ";
    out += summary;
    out += ". Conversation1: ";
    out += std::to_string(value1);
    out += ", Conversation2: ";
    out += std::to_string(value2);
    out += '.';
    return out;
}

PromptInstance render_crc(const ContrastivePair &pair, int test_position) {
    if (test_position != 1 && test_position != 2) {
        throw_config("InvalidPosition", "test position must be 1 or 2, got " + std::to_string(test_position));
    }
    if (!pair.s1.values.contains(pair.focus) || !pair.s2.values.contains(pair.focus)) {
        throw_data("FocusEmotionMissing", std::string{ to_string(pair.focus) } + " absent from pair (" + pair.s1.id + ", " + pair.s2.id + ")");
    }
    const bool natural = test_position == 2;
    const EmotionSample &first = natural ? pair.s1 : pair.s2;
    const EmotionSample &second = natural ? pair.s2 : pair.s1;
    const int value1 = first.values.at(pair.focus);
    const int value2 = second.values.at(pair.focus);

    const std::string label{ to_string(pair.focus) };
    const std::string lan1 = language_display_name(first.language);
    const std::string lan2 = language_display_name(second.language);

    PromptInstance instance;
    instance.task = crc_task(pair.s1.track);
    instance.input = fill_placeholders(template_text(instance.task), { { "label", label },
                                                                       { "lan1", lan1 },
                                                                       { "text1", first.text },
                                                                       { "lan2", lan2 },
                                                                       { "text2", second.text } });
    instance.target = render_crc_target(pair.focus, summarize_contrast(first.track, pair.focus, value1, value2), value1, value2);
    instance.meta.ids = { first.id, second.id };
    instance.meta.focus = pair.focus;
    instance.meta.test_position = test_position;
    return instance;
}

Prediction parse_sp_output(std::string_view text, const LabelSet &labels, Track track) {
    const std::string_view body = strip_period(text);
    if (body.empty()) {
        return malformed(text);
    }
    LabelMap values;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t comma = body.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = body.size();
        }
        const std::string_view item = body.substr(pos, comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
            return malformed(text);
        }
        const auto emotion = parse_emotion(item.substr(0, colon));
        const auto value = parse_int(trim(item.substr(colon + 1)));
        if (!emotion || !value || !in_range(track, *value) || !labels.contains(*emotion) ||
            values.contains(*emotion)) {
            return malformed(text);
        }
        values[*emotion] = *value;
        pos = comma + 1;
    }
    if (values.size() != labels.size()) {
        return malformed(text);
    }
    return Prediction{ {}, std::move(values), ParseStatus::ok, std::string{ text } };
}

std::optional<CrcOutput> parse_crc_output(std::string_view text, Track track) {
    constexpr std::string_view kLead = "for emotion label \"";
    constexpr std::string_view kConv1 = "conversation1:";
    constexpr std::string_view kConv2 = "conversation2:";

    const std::string_view body = strip_period(text);
    if (!iequals_prefix(body, 0, kLead)) {
        return std::nullopt;
    }
    const std::size_t label_end = body.find('"', kLead.size());
    if (label_end == std::string_view::npos) {
        return std::nullopt;
    }
    CrcOutput out;
    out.label = to_lower(trim(body.substr(kLead.size(), label_end - kLead.size())));
    if (!parse_emotion(out.label)) {
        return std::nullopt;
    }
    std::size_t pos = label_end + 1;
    if (pos >= body.size() || body[pos] != ',') {
        return std::nullopt;
    }
    ++pos;
    const std::size_t conv1 = ifind_last(body, kConv1);
    if (conv1 == std::string_view::npos || conv1 < pos) {
        return std::nullopt;
    }
    out.summary = std::string{ strip_period(body.substr(pos, conv1 - pos)) };
    if (out.summary.empty()) {
        return std::nullopt;
    }
    const std::string_view tail = body.substr(conv1 + kConv1.size());
    const std::size_t comma = tail.find(',');
    if (comma == std::string_view::npos) {
        return std::nullopt;
    }
    const auto value1 = parse_int(trim(tail.substr(0, comma)));
    const std::string_view rest = trim(tail.substr(comma + 1));
    if (!iequals_prefix(rest, 0, kConv2)) {
        return std::nullopt;
    }
    const auto value2 = parse_int(trim(rest.substr(kConv2.size())));
    if (!value1 || !value2 || !in_range(track, *value1) || !in_range(track, *value2)) {
        return std::nullopt;
    }
    out.value1 = *value1;
    out.value2 = *value2;
    return out;
}

nlohmann::ordered_json instance_to_json(const PromptInstance &instance) {
    nlohmann::ordered_json record;
    record["task"] = std::string{ to_string(instance.task) };
    record["input"] = instance.input;
    record["target"] = instance.target;
    nlohmann::ordered_json meta;
    meta["ids"] = instance.meta.ids;
    if (instance.meta.focus) {
        meta["focus"] = std::string{ to_string(*instance.meta.focus) };
        meta["test_position"] = instance.meta.test_position;
    }
    record["meta"] = std::move(meta);
    return record;
}

PromptInstance instance_from_json(const nlohmann::json &record) {
    PromptInstance instance;
    const auto task = parse_prompt_task(record.at("task").get<std::string>());
    if (!task) {
        throw_data("UnknownTask", "record has an unknown task");
    }
    instance.task = *task;
    instance.input = record.at("input").get<std::string>();
    instance.target = record.at("target").get<std::string>();
    const auto &meta = record.at("meta");
    instance.meta.ids = meta.at("ids").get<std::vector<std::string>>();
    if (meta.contains("focus")) {
        const auto focus = parse_emotion(meta.at("focus").get<std::string>());
        if (!focus) {
            throw_data("UnknownEmotion", "record has an unknown focus emotion");
        }
        instance.meta.focus = focus;
        instance.meta.test_position = meta.at("test_position").get<int>();
    }
    return instance;
}

}  // namespace affect
