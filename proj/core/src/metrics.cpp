// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/metrics.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

namespace predgen {

namespace {

const PipelineEvent* find_first(std::span<const PipelineEvent> evs, EventKind kind) {
    for (const auto& ev : evs) {
        if (ev.kind == kind) {
            return &ev;
        }
    }
    return nullptr;
}

const PipelineEvent* find_final_chunk(std::span<const PipelineEvent> evs) {
    for (const auto& ev : evs) {
        if (ev.kind == EventKind::chunk_received && ev.payload.value("is_final", false)) {
            return &ev;
        }
    }
    return nullptr;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string num(double v) { return fmt::format("{:.3f}", v); }

}  // namespace

MetricsRecord compute_metrics(std::span<const PipelineEvent> evs) {
    const PipelineEvent* final_chunk = find_final_chunk(evs);
    const PipelineEvent* first_sentence = find_first(evs, EventKind::sentence_emitted);
    const PipelineEvent* audio = find_first(evs, EventKind::audio_start);
    const PipelineEvent* done = find_first(evs, EventKind::turn_done);
    std::vector<std::string> missing;
    if (!final_chunk) missing.emplace_back("final chunk_received");
    if (!first_sentence) missing.emplace_back("sentence_emitted");
    if (!audio) missing.emplace_back("audio_start");
    if (!done) missing.emplace_back("turn_done");
    if (!missing.empty()) {
        std::string msg = "malformed turn log";
        if (!evs.empty()) {
            msg += " for " + evs.front().turn_id;
        }
        msg += ": missing";
        for (const auto& m : missing) {
            msg += " " + m;
        }
        throw MetricsError(msg);
    }

    const SimTime arrival = at_ms(final_chunk->payload.at("arrival_ms").get<double>());
    MetricsRecord rec;
    rec.turn_id = done->turn_id;
    rec.round = done->round;
    rec.method = done->payload.value("method", std::string{});
    rec.dataset = done->payload.value("dataset", std::string{});
    rec.final_text = done->payload.value("text", std::string{});
    rec.ttfs_ms = to_ms(first_sentence->t - arrival);
    rec.audio_latency_ms = to_ms(audio->t - arrival);

    const double arrival_ms = to_ms(arrival);
    for (const auto& ev : evs) {
        if (&ev == first_sentence) {
            break;
        }
        if ((ev.kind == EventKind::verify || ev.kind == EventKind::generate_step) &&
            ev.payload.at("start_ms").get<double>() >= arrival_ms) {
            rec.nfetfs += ev.payload.at("nfe").get<int>();
        }
    }

    for (const auto& ev : evs) {
        if (ev.kind != EventKind::verify || !ev.payload.value("final", false)) {
            continue;
        }
        const auto k = ev.payload.at("k").get<std::size_t>();
        const auto& fs = ev.payload.at("first_sentence_end");
        rec.first_sentence_accepted = ev.payload.at("first_sentence_accepted").get<bool>();
        if (!fs.is_null()) {
            const auto end = fs.get<std::size_t>();
            rec.accepted_fraction = static_cast<double>(std::min(k, end)) / static_cast<double>(end);
        } else if (const auto len = ev.payload.at("response_len").get<std::size_t>(); len > 0) {
            rec.accepted_fraction = static_cast<double>(k) / static_cast<double>(len);
        }
    }

    if (const auto& job = audio->payload.at("job"); !job.is_null()) {
        rec.audio_job = job.get<TtsJobId>();
        for (const auto& ev : evs) {
            if (&ev == final_chunk) {
                break;
            }
            if (ev.kind == EventKind::tts_submit && ev.payload.at("job").get<TtsJobId>() == *rec.audio_job) {
                rec.audio_job_predates_final = true;
            }
        }
    }
    return rec;
}

std::vector<MetricsRecord> compute_all(const EventLog& log) {
    std::vector<MetricsRecord> out;
    for (const auto& id : log.turn_ids()) {
        const auto evs = log.turn(id);
        out.push_back(compute_metrics(evs));
    }
    return out;
}

void attach_speedups(std::vector<MetricsRecord>& records, const std::vector<MetricsRecord>& baseline) {
    for (auto& r : records) {
        auto it = std::find_if(baseline.begin(), baseline.end(),
                               [&](const MetricsRecord& b) { return b.turn_id == r.turn_id; });
        if (it == baseline.end()) {
            throw MetricsError("no baseline record for turn " + r.turn_id);
        }
        r.speedup = r.audio_latency_ms > 0 ? it->audio_latency_ms / r.audio_latency_ms : 0.0;
    }
}

SummaryRow summarize(const std::vector<MetricsRecord>& records, const std::vector<MetricsRecord>& baseline) {
    if (records.empty() || baseline.empty()) {
        throw MetricsError("cannot summarize an empty record set");
    }
    if (records.size() != baseline.size()) {
        throw MetricsError(fmt::format("{} records but {} baseline records", records.size(), baseline.size()));
    }
    bool identical = true;
    double ttfs = 0, nfetfs = 0, latency = 0, base_latency = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].turn_id != baseline[i].turn_id) {
            throw MetricsError("turn id mismatch: " + records[i].turn_id + " vs " + baseline[i].turn_id);
        }
        identical = identical && records[i].final_text == baseline[i].final_text;
        ttfs += records[i].ttfs_ms;
        nfetfs += records[i].nfetfs;
        latency += records[i].audio_latency_ms;
        base_latency += baseline[i].audio_latency_ms;
    }
    const auto n = static_cast<double>(records.size());
    SummaryRow row;
    row.method = records.front().method;
    row.dataset = records.front().dataset;
    row.mean_ttfs_ms = ttfs / n;
    row.mean_nfetfs = nfetfs / n;
    row.mean_latency_ms = latency / n;
    row.speedup = latency > 0 ? base_latency / latency : 0.0;
    if (identical) {
        row.quality = "identical to baseline";
    }
    return row;
}

std::size_t nfetfs_bin(int nfetfs) {
    if (nfetfs <= 1) return 0;
    if (nfetfs <= 5) return 1;
    if (nfetfs <= 10) return 2;
    if (nfetfs <= 20) return 3;
    return 4;
}

NfetfsHistogram nfetfs_histogram(const std::vector<MetricsRecord>& records, bool by_round) {
    NfetfsHistogram hist;
    for (const auto& r : records) {
        hist[by_round ? r.round : 0][nfetfs_bin(r.nfetfs)] += 1;
    }
    return hist;
}

nlohmann::ordered_json histogram_json(const NfetfsHistogram& hist) {
    nlohmann::ordered_json out;
    out["bins"] = kNfetfsBins;
    auto& rounds = out["rounds"] = nlohmann::ordered_json::array();
    for (const auto& [round, counts] : hist) {
        rounds.push_back({{"round", round}, {"counts", counts}});
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "method,dataset,mean_ttfs_ms,mean_nfetfs,mean_latency_ms,speedup,quality\n";
    for (const auto& r : rows) {
        out << csv_field(r.method) << ',' << csv_field(r.dataset) << ',' << num(r.mean_ttfs_ms) << ','
            << num(r.mean_nfetfs) << ',' << num(r.mean_latency_ms) << ',' << num(r.speedup) << ','
            << csv_field(r.quality) << '\n';
    }
}

void write_per_turn_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
    out << "method,dataset,turn_id,round,ttfs_ms,nfetfs,audio_latency_ms,speedup,accepted_fraction,"
           "first_sentence_accepted,audio_job\n";
    for (const auto& r : records) {
        out << csv_field(r.method) << ',' << csv_field(r.dataset) << ',' << csv_field(r.turn_id) << ','
            << r.round << ',' << num(r.ttfs_ms) << ',' << r.nfetfs << ',' << num(r.audio_latency_ms) << ','
            << num(r.speedup) << ',' << num(r.accepted_fraction) << ','
            << (r.first_sentence_accepted ? "true" : "false") << ','
            << (r.audio_job ? std::to_string(*r.audio_job) : std::string{}) << '\n';
    }
}

}  // namespace predgen
