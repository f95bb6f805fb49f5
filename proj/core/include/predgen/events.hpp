// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "predgen/sim_clock.hpp"

namespace predgen {

enum class EventKind {
    chunk_received,
    verify,
    generate_step,
    tts_submit,
    tts_chunk_ready,
    audio_start,
    sentence_emitted,
    turn_done,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);

inline constexpr int kEventSchemaVersion = 1;

struct PipelineEvent {
    SimTime t;
    EventKind kind = EventKind::turn_done;
    std::string turn_id;
    int round = 1;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    bool operator==(const PipelineEvent&) const = default;
};

/// Append-only event record. One JSON object per line:
/// {"v", "t_ms", "kind", "turn_id", "round", <payload fields>}.
class EventLog {
public:
    void add(PipelineEvent ev) { events_.push_back(std::move(ev)); }

    const std::vector<PipelineEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    /// Events of one turn, in log order.
    std::vector<PipelineEvent> turn(std::string_view turn_id) const;
    /// Turn ids in order of first appearance.
    std::vector<std::string> turn_ids() const;

    void append(const EventLog& other);

    void write_jsonl(std::ostream& out) const;
    std::string to_jsonl() const;
    void save(const std::filesystem::path& path) const;

    static EventLog read_jsonl(std::istream& in);
    static EventLog load(const std::filesystem::path& path);

private:
    std::vector<PipelineEvent> events_;
};

nlohmann::ordered_json to_json(const PipelineEvent& ev);
PipelineEvent event_from_json(const nlohmann::ordered_json& line);

}  // namespace predgen
