// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "predgen/events.hpp"
#include "predgen/tts_sim.hpp"

namespace predgen {

class MetricsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MetricsRecord {
    std::string turn_id;
    int round = 1;
    std::string method;
    std::string dataset;
    double ttfs_ms = 0;
    int nfetfs = 0;
    double audio_latency_ms = 0;
    /// Baseline latency / this latency; 0 until paired with a baseline.
    double speedup = 0;
    /// Share of the candidate's first sentence accepted by the final
    /// verification; 0 when there was none.
    double accepted_fraction = 0;
    bool first_sentence_accepted = false;
    std::optional<TtsJobId> audio_job;
    /// The played job was submitted before the final chunk was received.
    bool audio_job_predates_final = false;
    std::string final_text;

    bool operator==(const MetricsRecord&) const = default;
};

/// Metrics of one turn from its events alone. Throws MetricsError naming
/// the missing events when the log is incomplete.
MetricsRecord compute_metrics(std::span<const PipelineEvent> turn_events);

/// One record per turn, in log order.
std::vector<MetricsRecord> compute_all(const EventLog& log);

/// Fills `speedup` of each record from the baseline record with the same
/// turn id.
void attach_speedups(std::vector<MetricsRecord>& records, const std::vector<MetricsRecord>& baseline);

struct SummaryRow {
    std::string method;
    std::string dataset;
    double mean_ttfs_ms = 0;
    double mean_nfetfs = 0;
    double mean_latency_ms = 0;
    double speedup = 0;
    std::string quality;
};

/// Means per method; speedup is mean baseline latency over mean latency.
/// Throws MetricsError on empty input or mismatched turn ids.
SummaryRow summarize(const std::vector<MetricsRecord>& records, const std::vector<MetricsRecord>& baseline);

inline constexpr std::array<std::string_view, 5> kNfetfsBins{"1", "2-5", "6-10", "11-20", ">20"};

std::size_t nfetfs_bin(int nfetfs);

/// Counts per round (or under round 0 when not split by round).
using NfetfsHistogram = std::map<int, std::array<std::size_t, kNfetfsBins.size()>>;
NfetfsHistogram nfetfs_histogram(const std::vector<MetricsRecord>& records, bool by_round = true);

nlohmann::ordered_json histogram_json(const NfetfsHistogram& hist);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_per_turn_csv(std::ostream& out, const std::vector<MetricsRecord>& records);

}  // namespace predgen
