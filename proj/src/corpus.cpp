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

#include "affect/corpus.hpp"

#include "affect/error.hpp"
#include "affect/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace affect {

namespace {

constexpr std::array<std::string_view, 6> kEmotionNames{"anger", "fear", "joy", "sadness", "surprise", "disgust"};

// RFC 4180 style record reader: quoted fields may contain commas, doubled
// quotes and newlines. Returns false at end of input.
bool read_csv_record(std::istream &in, std::vector<std::string> &fields, std::size_t row) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) {
        return false;
    }
    std::string field;
    bool quoted = false;
    bool field_started_quoted = false;
    char c = 0;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_started_quoted) {
            quoted = true;
            field_started_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started_quoted = false;
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') {
                in.get(c);
            }
            break;
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        throw_data("MalformedCsv", "unterminated quoted field at row " + std::to_string(row));
    }
    fields.push_back(std::move(field));
    return true;
}

std::string quote_csv(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos || field.empty();
    if (!needs_quotes) {
        return std::string{ field };
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string_view to_string(Emotion emotion) noexcept {
    return kEmotionNames[static_cast<std::size_t>(emotion)];
}

std::optional<Emotion> parse_emotion(std::string_view name) noexcept {
    const std::string lowered = to_lower(trim(name));
    for (const Emotion e : kAllEmotions) {
        if (lowered == to_string(e)) {
            return e;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Track track) noexcept {
    return track == Track::A ? "A" : "B";
}

std::optional<Track> parse_track(std::string_view name) noexcept {
    const std::string lowered = to_lower(trim(name));
    if (lowered == "a") {
        return Track::A;
    }
    if (lowered == "b") {
        return Track::B;
    }
    return std::nullopt;
}

bool LabelSet::contains(Emotion emotion) const noexcept {
    return std::find(emotions.begin(), emotions.end(), emotion) != emotions.end();
}

std::string_view to_string(Violation::Kind kind) noexcept {
    switch (kind) {
        case Violation::Kind::value_out_of_range: return "ValueOutOfRange";
        case Violation::Kind::missing_value: return "MissingValue";
        case Violation::Kind::unexpected_emotion: return "UnexpectedEmotion";
        case Violation::Kind::empty_id: return "EmptyId";
    }
    return "Unknown";
}

std::vector<Violation> validate_sample(const EmotionSample &sample, const LabelSet &labels) {
    std::vector<Violation> violations;
    if (sample.id.empty()) {
        violations.push_back({ Violation::Kind::empty_id, std::nullopt });
    }
    for (const Emotion e : labels.emotions) {
        const auto it = sample.values.find(e);
        if (it == sample.values.end()) {
            violations.push_back({ Violation::Kind::missing_value, e });
        } else if (!in_range(sample.track, it->second)) {
            violations.push_back({ Violation::Kind::value_out_of_range, e });
        }
    }
    for (const auto &[e, value] : sample.values) {
        if (!labels.contains(e)) {
            violations.push_back({ Violation::Kind::unexpected_emotion, e });
        }
    }
    return violations;
}

Dataset parse_dataset_csv(std::istream &in, Track track, std::string_view language) {
    Dataset dataset;
    dataset.track = track;
    dataset.labels.language = to_lower(trim(language));

    std::vector<std::string> header;
    if (!read_csv_record(in, header, 0)) {
        throw_data("MissingColumn", "empty file, header row required");
    }
    if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) {
        header.front().erase(0, 3);
    }

    std::optional<std::size_t> id_col;
    std::optional<std::size_t> text_col;
    std::map<Emotion, std::size_t> emotion_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = to_lower(trim(header[i]));
        if (name == "id") {
            id_col = i;
        } else if (name == "text") {
            text_col = i;
        } else if (const auto e = parse_emotion(name)) {
            if (emotion_cols.contains(*e)) {
                throw_data("DuplicateColumn", "column '" + name + "' appears twice in header");
            }
            emotion_cols[*e] = i;
        }
    }
    if (!id_col) {
        throw_data("MissingColumn", "header lacks 'id' column (row 0)");
    }
    if (!text_col) {
        throw_data("MissingColumn", "header lacks 'text' column (row 0)");
    }
    if (emotion_cols.empty()) {
        throw_data("MissingColumn", "header names no emotion columns (row 0)");
    }
    for (const auto &[e, col] : emotion_cols) {
        dataset.labels.emotions.push_back(e);
    }

    std::unordered_set<std::string> seen_ids;
    std::vector<std::string> fields;
    std::size_t row = 0;
    while (read_csv_record(in, fields, row + 1)) {
        ++row;
        if (fields.size() == 1 && trim(fields.front()).empty()) {
            continue;  // blank line
        }
        if (fields.size() < header.size()) {
            throw_data("MissingColumn", "row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, header has " + std::to_string(header.size()));
        }
        EmotionSample sample;
        sample.id = std::string{ trim(fields[*id_col]) };
        sample.language = dataset.labels.language;
        sample.text = fields[*text_col];
        sample.track = track;
        if (sample.id.empty()) {
            throw_data("MissingValue", "empty id at row " + std::to_string(row));
        }
        if (!seen_ids.insert(sample.id).second) {
            throw_data("DuplicateId", "id '" + sample.id + "' repeated at row " + std::to_string(row));
        }
        for (const auto &[e, col] : emotion_cols) {
            const std::string_view cell = trim(fields[col]);
            if (cell.empty()) {
                throw_data("MissingValue", std::string{ to_string(e) } + " empty at row " + std::to_string(row));
            }
            const auto value = parse_int(cell);
            if (!value || !in_range(track, *value)) {
                throw_data("ValueOutOfRange", std::string{ to_string(e) } + "='" + std::string{ cell } + "' outside track " + std::string{ to_string(track) } + " range at row " + std::to_string(row));
            }
            sample.values[e] = *value;
        }
        if (trim(sample.text).empty()) {
            dataset.warnings.push_back("empty text for id '" + sample.id + "' at row " + std::to_string(row));
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

Dataset load_dataset(const std::filesystem::path &path, Track track, std::string_view language) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_data("FileNotFound", "cannot open " + path.string());
    }
    return parse_dataset_csv(in, track, language);
}

void write_dataset_csv(std::ostream &out, const Dataset &dataset) {
    out << "id,text";
    for (const Emotion e : dataset.labels.emotions) {
        out << ',' << to_string(e);
    }
    out << '\n';
    for (const EmotionSample &sample : dataset.samples) {
        out << quote_csv(sample.id) << ',' << quote_csv(sample.text);
        for (const Emotion e : dataset.labels.emotions) {
            out << ',' << sample.values.at(e);
        }
        out << '\n';
    }
}

void save_dataset(const std::filesystem::path &path, const Dataset &dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw_data("FileNotWritable", "cannot write " + path.string());
    }
    write_dataset_csv(out, dataset);
}

nlohmann::ordered_json label_map_to_json(const LabelMap &values) {
    nlohmann::ordered_json object = nlohmann::ordered_json::object();
    for (const auto &[e, value] : values) {
        object[std::string{ to_string(e) }] = value;
    }
    return object;
}

LabelMap label_map_from_json(const nlohmann::json &object) {
    LabelMap values;
    for (const auto &[key, value] : object.items()) {
        const auto e = parse_emotion(key);
        if (!e) {
            throw_data("UnknownEmotion", "'" + key + "' is not an emotion");
        }
        values[*e] = value.get<int>();
    }
    return values;
}

nlohmann::ordered_json sample_to_json(const EmotionSample &sample) {
    nlohmann::ordered_json record;
    record["id"] = sample.id;
    record["language"] = sample.language;
    record["track"] = std::string{ to_string(sample.track) };
    record["text"] = sample.text;
    record["values"] = label_map_to_json(sample.values);
    return record;
}

EmotionSample sample_from_json(const nlohmann::json &record) {
    EmotionSample sample;
    sample.id = record.at("id").get<std::string>();
    sample.language = record.at("language").get<std::string>();
    const auto track = parse_track(record.at("track").get<std::string>());
    if (!track) {
        throw_data("UnknownTrack", "record '" + sample.id + "' has an unknown track");
    }
    sample.track = *track;
    sample.text = record.at("text").get<std::string>();
    sample.values = label_map_from_json(record.at("values"));
    return sample;
}

}  // namespace affect
