// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/events.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace predgen {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKindNames{{
    {EventKind::chunk_received, "chunk_received"},
    {EventKind::verify, "verify"},
    {EventKind::generate_step, "generate_step"},
    {EventKind::tts_submit, "tts_submit"},
    {EventKind::tts_chunk_ready, "tts_chunk_ready"},
    {EventKind::audio_start, "audio_start"},
    {EventKind::sentence_emitted, "sentence_emitted"},
    {EventKind::turn_done, "turn_done"},
}};

constexpr std::array<std::string_view, 5> kHeaderKeys{"v", "t_ms", "kind", "turn_id", "round"};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

EventKind parse_event_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown event kind: " + std::string(name));
}

nlohmann::ordered_json to_json(const PipelineEvent& ev) {
    nlohmann::ordered_json j;
    j["v"] = kEventSchemaVersion;
    j["t_ms"] = to_ms(ev.t);
    j["kind"] = to_string(ev.kind);
    j["turn_id"] = ev.turn_id;
    j["round"] = ev.round;
    for (const auto& [key, value] : ev.payload.items()) {
        if (std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key) != kHeaderKeys.end()) {
            throw std::invalid_argument("event payload may not use reserved key \"" + key + "\"");
        }
        j[key] = value;
    }
    return j;
}

PipelineEvent event_from_json(const nlohmann::ordered_json& line) {
    if (!line.is_object()) {
        throw std::invalid_argument("event line is not a JSON object");
    }
    const int v = line.value("v", 0);
    if (v != kEventSchemaVersion) {
        throw std::invalid_argument("unsupported event schema version " + std::to_string(v));
    }
    PipelineEvent ev;
    ev.t = at_ms(line.at("t_ms").get<double>());
    ev.kind = parse_event_kind(line.at("kind").get<std::string>());
    ev.turn_id = line.at("turn_id").get<std::string>();
    ev.round = line.at("round").get<int>();
    for (const auto& [key, value] : line.items()) {
        if (std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key) == kHeaderKeys.end()) {
            ev.payload[key] = value;
        }
    }
    return ev;
}

std::vector<PipelineEvent> EventLog::turn(std::string_view turn_id) const {
    std::vector<PipelineEvent> out;
    for (const auto& ev : events_) {
        if (ev.turn_id == turn_id) {
            out.push_back(ev);
        }
    }
    return out;
}

std::vector<std::string> EventLog::turn_ids() const {
    std::vector<std::string> ids;
    for (const auto& ev : events_) {
        if (std::find(ids.begin(), ids.end(), ev.turn_id) == ids.end()) {
            ids.push_back(ev.turn_id);
        }
    }
    return ids;
}

void EventLog::append(const EventLog& other) {
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
}

void EventLog::write_jsonl(std::ostream& out) const {
    for (const auto& ev : events_) {
        out << to_json(ev).dump() << '\n';
    }
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

void EventLog::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_jsonl(out);
}

EventLog EventLog::read_jsonl(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            log.add(event_from_json(nlohmann::ordered_json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("event log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return log;
}

EventLog EventLog::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_jsonl(in);
}

}  // namespace predgen
