// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/experiment.hpp"

#include <fstream>

#include "predgen/toy_lm.hpp"

namespace predgen {

BackendFactory toy_backend(LatencyModel latency) {
    return [latency](const PipelineConfig& cfg) {
        Backend b;
        b.vocab = std::make_unique<Vocabulary>(toy_vocabulary());
        b.lm = make_toy_lm(*b.vocab, cfg.seed, latency);
        return b;
    };
}

BackendFactory scripted_backend(Script script, LatencyModel latency) {
    return [script = std::move(script), latency](const PipelineConfig&) {
        Backend b;
        b.vocab = std::make_unique<Vocabulary>();
        b.lm = std::make_unique<ScriptedLm>(script, *b.vocab, latency);
        return b;
    };
}

Evaluation evaluate_logs(EventLog log, EventLog baseline_log) {
    Evaluation eval;
    eval.log = std::move(log);
    eval.baseline_log = std::move(baseline_log);
    eval.records = compute_all(eval.log);
    eval.baseline_records = compute_all(eval.baseline_log);
    attach_speedups(eval.records, eval.baseline_records);
    attach_speedups(eval.baseline_records, eval.baseline_records);
    eval.summary = summarize(eval.records, eval.baseline_records);
    eval.baseline_summary = summarize(eval.baseline_records, eval.baseline_records);
    return eval;
}

Evaluation evaluate(const std::vector<Conversation>& dataset, const PipelineConfig& cfg,
                    const BackendFactory& make_backend, const std::string& dataset_name) {
    RunOutput run = run_dataset(dataset, cfg, make_backend, RunMode::predgen, dataset_name);
    RunOutput base = run_dataset(dataset, cfg, make_backend, RunMode::baseline, dataset_name);
    return evaluate_logs(std::move(run.log), std::move(base.log));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void write_outputs(const Evaluation& eval, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    eval.log.save(dir / "events.jsonl");
    eval.baseline_log.save(dir / "baseline_events.jsonl");
    {
        auto out = open_out(dir / "per_turn.csv");
        std::vector<MetricsRecord> all = eval.baseline_records;
        all.insert(all.end(), eval.records.begin(), eval.records.end());
        write_per_turn_csv(out, all);
    }
    {
        auto out = open_out(dir / "summary.csv");
        write_summary_csv(out, {eval.baseline_summary, eval.summary});
    }
    {
        auto out = open_out(dir / "nfetfs_histogram.json");
        nlohmann::ordered_json j;
        j["method"] = eval.summary.method;
        j["histogram"] = histogram_json(nfetfs_histogram(eval.records));
        j["baseline"] = histogram_json(nfetfs_histogram(eval.baseline_records));
        out << j.dump(2) << '\n';
    }
}

std::vector<SummaryRow> sweep_topk(const std::vector<Conversation>& dataset, const std::vector<std::size_t>& ks,
                                   const PipelineConfig& cfg, const BackendFactory& make_backend,
                                   const std::string& dataset_name) {
    RunOutput base = run_dataset(dataset, cfg, make_backend, RunMode::baseline, dataset_name);
    const auto base_records = compute_all(base.log);
    std::vector<SummaryRow> rows{summarize(base_records, base_records)};
    for (std::size_t k : ks) {
        if (k == 0) {
            throw std::invalid_argument("top-k values must be >= 1");
        }
        PipelineConfig c = cfg;
        c.verifier = {VerifierKind::topk, k};
        RunOutput run = run_dataset(dataset, c, make_backend, RunMode::predgen, dataset_name);
        rows.push_back(summarize(compute_all(run.log), base_records));
    }
    return rows;
}

}  // namespace predgen
