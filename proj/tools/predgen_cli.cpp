// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

// predgen: run the speculative voice-chat pipeline over a dataset on the
// virtual clock and write event logs and latency reports.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "predgen/experiment.hpp"
#include "predgen/toy_lm.hpp"

namespace fs = std::filesystem;
using namespace predgen;

namespace {

struct Options {
    std::string dataset;
    std::string dataset_name;
    std::string verifier = "greedy";
    std::size_t topk = 3;
    std::string generator = "ar";
    double rate = PromptStream::kDefaultRate;
    std::size_t chunk_words = PromptStream::kDefaultChunkWords;
    std::uint64_t seed = 42;
    std::string out = "predgen_out";
    std::string backend = "toy";
    std::string script;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
    LatencyModel latency;
    TtsLatencyModel tts;
    std::string system_prompt_file;
};

PipelineConfig make_config(const Options& o) {
    PipelineConfig cfg;
    cfg.verifier = {parse_verifier_kind(o.verifier), o.topk};
    cfg.generator = parse_generator_kind(o.generator);
    cfg.tts = o.tts;
    cfg.max_new_tokens = o.max_new_tokens;
    cfg.rate_chars_per_min = o.rate;
    cfg.chunk_words = o.chunk_words;
    cfg.seed = o.seed;
    if (!o.system_prompt_file.empty()) {
        std::ifstream in(o.system_prompt_file);
        if (!in) {
            throw std::runtime_error("cannot open " + o.system_prompt_file);
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg.system_prompt = ss.str();
    }
    cfg.validate();
    return cfg;
}

BackendFactory make_factory(const Options& o) {
    o.latency.validate();
    if (o.backend == "toy") {
        return toy_backend(o.latency);
    }
    if (o.backend == "scripted") {
        if (o.script.empty()) {
            throw std::invalid_argument("--backend scripted needs --script FILE");
        }
        return scripted_backend(load_script(o.script), o.latency);
    }
    throw std::invalid_argument("unknown backend: " + o.backend);
}

std::vector<Conversation> read_dataset(const Options& o) {
    if (o.dataset.empty()) {
        throw std::invalid_argument("--dataset is required");
    }
    return load_dataset(o.dataset);
}

std::string dataset_label(const Options& o) {
    return o.dataset_name.empty() ? fs::path(o.dataset).stem().string() : o.dataset_name;
}

void print_summary(const std::vector<SummaryRow>& rows) {
    write_summary_csv(std::cout, rows);
}

int cmd_simulate(const Options& o) {
    const auto eval = evaluate(read_dataset(o), make_config(o), make_factory(o), dataset_label(o));
    write_outputs(eval, o.out);
    print_summary({eval.baseline_summary, eval.summary});
    return 0;
}

int cmd_baseline(const Options& o) {
    const PipelineConfig cfg = make_config(o);
    RunOutput run = run_dataset(read_dataset(o), cfg, make_factory(o), RunMode::baseline, dataset_label(o));
    auto records = compute_all(run.log);
    attach_speedups(records, records);
    fs::create_directories(o.out);
    run.log.save(fs::path(o.out) / "baseline_events.jsonl");
    std::ofstream per_turn(fs::path(o.out) / "per_turn.csv", std::ios::binary);
    write_per_turn_csv(per_turn, records);
    const std::vector<SummaryRow> rows{summarize(records, records)};
    std::ofstream summary(fs::path(o.out) / "summary.csv", std::ios::binary);
    write_summary_csv(summary, rows);
    print_summary(rows);
    return 0;
}

int cmd_sweep(const Options& o, const std::vector<std::size_t>& ks) {
    const auto rows = sweep_topk(read_dataset(o), ks, make_config(o), make_factory(o), dataset_label(o));
    fs::create_directories(o.out);
    std::ofstream out(fs::path(o.out) / "sweep.csv", std::ios::binary);
    write_summary_csv(out, rows);
    print_summary(rows);
    return 0;
}

int cmd_report(const std::string& events_dir, const std::string& out_dir) {
    const fs::path dir(events_dir);
    auto eval = evaluate_logs(EventLog::load(dir / "events.jsonl"), EventLog::load(dir / "baseline_events.jsonl"));
    write_outputs(eval, out_dir.empty() ? dir : fs::path(out_dir));
    print_summary({eval.baseline_summary, eval.summary});
    return 0;
}

// Reads typed lines from stdin, timestamping each on the wall clock, then
// replays the turn on the virtual clock with those arrival times.
int cmd_live(const Options& o) {
    const PipelineConfig cfg = make_config(o);
    std::cerr << "type the prompt, one or more words per line; an empty line or EOF ends the turn\n";
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<PromptChunk> chunks;
    std::string text;
    for (std::string line; std::getline(std::cin, line) && !line.empty();) {
        const auto elapsed = std::chrono::duration_cast<SimDuration>(std::chrono::steady_clock::now() - t0);
        text += (text.empty() ? "" : " ") + line;
        chunks.push_back({text, count_chars(text), SimTime{elapsed}});
    }
    if (chunks.empty()) {
        chunks.push_back({"", 0, SimTime{}});
    }
    const PromptStream stream = PromptStream::from_chunks(std::move(chunks), cfg.rate_chars_per_min);
    const BackendFactory factory = make_factory(o);

    for (RunMode mode : {RunMode::baseline, RunMode::predgen}) {
        Backend backend = factory(cfg);
        SimClock clock;
        TtsSimulator tts(clock, cfg.tts);
        EventLog log;
        Session session{*backend.lm, *backend.vocab, clock, tts, log};
        const TurnInfo info{"live/1", 1, "live"};
        const TurnResult r = mode == RunMode::predgen ? run_turn(session, {}, stream, cfg, info)
                                                      : run_baseline(session, {}, stream, cfg, info);
        const MetricsRecord m = compute_all(log).front();
        fmt::print("{}: ttfs {:.3f} ms, nfetfs {}, audio latency {:.3f} ms\n  {}\n", m.method, m.ttfs_ms, m.nfetfs,
                   m.audio_latency_ms, r.final_text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Input-time speculative generation for cascaded voice chat, on a virtual clock"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file (INI/TOML); flags override it");

    Options o;
    {
        CLI::App* sub = &app;
        sub->add_option("--dataset", o.dataset, "JSONL dataset, one {\"id\", \"turns\"} object per line");
        sub->add_option("--dataset-name", o.dataset_name, "Label for reports (default: file stem)");
        sub->add_option("--verifier", o.verifier, "greedy | topk | reflection")
            ->check(CLI::IsMember({"greedy", "topk", "reflection"}));
        sub->add_option("--generator", o.generator, "ar | jacobi")->check(CLI::IsMember({"ar", "jacobi"}));
        sub->add_option("--rate", o.rate, "Input rate in characters per minute")->check(CLI::PositiveNumber);
        sub->add_option("--chunk-words", o.chunk_words, "Words per prompt chunk")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Toy model seed");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--backend", o.backend, "toy | scripted")->check(CLI::IsMember({"toy", "scripted"}));
        sub->add_option("--script", o.script, "Scenario JSON for the scripted backend");
        sub->add_option("--max-new-tokens", o.max_new_tokens, "Response length cap");
        sub->add_option("--pass-ms", o.latency.pass_base_ms, "Cost of one forward pass");
        sub->add_option("--per-token-ms", o.latency.per_new_token_ms, "Extra cost per uncached position");
        sub->add_option("--tts-first-chunk-ms", o.tts.first_chunk_ms, "Time to the first audio chunk");
        sub->add_option("--tts-per-chunk-ms", o.tts.per_chunk_ms, "Time per later audio chunk");
        sub->add_option("--tts-chunk-audio-ms", o.tts.chunk_audio_ms, "Playback length of one chunk");
        sub->add_option("--tts-buffer", o.tts.buffer_target, "Audio chunks to pre-buffer");
        sub->add_option("--tts-chars-per-chunk", o.tts.chars_per_chunk, "Characters of text per chunk");
        sub->add_option("--system-prompt-file", o.system_prompt_file, "Replace the default system prompt");
    }

    auto* simulate = app.add_subcommand("simulate", "Run a method and the baseline; write logs and reports");
    simulate->fallthrough();
    simulate->add_option("--topk", o.topk, "K for the top-K verifier")->check(CLI::PositiveNumber);

    auto* baseline = app.add_subcommand("baseline", "Run only the baseline cascade");
    baseline->fallthrough();

    std::vector<std::size_t> ks{1, 2, 3, 5, 10};
    auto* sweep = app.add_subcommand("sweep", "Summaries across top-K values");
    sweep->fallthrough();
    sweep->add_option("--topk", ks, "Comma-separated K values")->delimiter(',')->check(CLI::PositiveNumber);

    std::string events_dir;
    auto* report = app.add_subcommand("report", "Recompute reports from saved event logs");
    report->fallthrough();
    report->add_option("--events", events_dir, "Directory with events.jsonl and baseline_events.jsonl")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* live = app.add_subcommand("live", "Type a prompt on stdin, then replay it on the virtual clock");
    live->fallthrough();
    live->add_option("--topk", o.topk, "K for the top-K verifier")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(o);
        if (*baseline) return cmd_baseline(o);
        if (*sweep) return cmd_sweep(o, ks);
        if (*report) return cmd_report(events_dir, app.count("--out") ? o.out : std::string{});
        if (*live) return cmd_live(o);
    } catch (const std::exception& e) {
        std::cerr << "predgen: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
