// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "predgen/metrics.hpp"
#include "predgen/pipeline.hpp"
#include "predgen/scripted_lm.hpp"

namespace predgen {

/// Toy n-gram backend seeded from cfg.seed.
BackendFactory toy_backend(LatencyModel latency = {});
/// Scripted backend; every conversation gets its own copy.
BackendFactory scripted_backend(Script script, LatencyModel latency = {});

/// A method run next to the baseline on the same dataset.
struct Evaluation {
    EventLog log;
    EventLog baseline_log;
    std::vector<MetricsRecord> records;
    std::vector<MetricsRecord> baseline_records;
    SummaryRow summary;
    SummaryRow baseline_summary;
};

Evaluation evaluate(const std::vector<Conversation>& dataset, const PipelineConfig& cfg,
                    const BackendFactory& make_backend, const std::string& dataset_name);

/// Recomputes an evaluation from serialized logs.
Evaluation evaluate_logs(EventLog log, EventLog baseline_log);

/// Writes events.jsonl, baseline_events.jsonl, per_turn.csv, summary.csv and
/// nfetfs_histogram.json into `dir`.
void write_outputs(const Evaluation& eval, const std::filesystem::path& dir);

/// One summary row per K (top-K verifier), baseline first.
std::vector<SummaryRow> sweep_topk(const std::vector<Conversation>& dataset, const std::vector<std::size_t>& ks,
                                   const PipelineConfig& cfg, const BackendFactory& make_backend,
                                   const std::string& dataset_name);

}  // namespace predgen
