// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

// Wall-clock cost of the simulator itself. Virtual latencies are fixed by
// the cost model and are not what these measure.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "predgen/experiment.hpp"
#include "predgen/generator.hpp"
#include "predgen/toy_lm.hpp"
#include "predgen/verifier.hpp"

using namespace predgen;

namespace {

std::string words(const Vocabulary& vocab, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Token> pick(5, static_cast<Token>(vocab.size() - 1));
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        out += (i ? " " : "") + vocab.surface(pick(rng));
    }
    return out;
}

void BM_VerifyGreedy(benchmark::State& state) {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 3);
    const TokenSeq ctx = tokenize(words(vocab, 40, 1), vocab);
    const TokenSeq resp = greedy_decode(*lm, ctx, static_cast<std::size_t>(state.range(0)));
    const TokenSeq cand(resp.begin() + static_cast<std::ptrdiff_t>(ctx.size()), resp.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_greedy(*lm, vocab, ctx, cand));
    }
}
BENCHMARK(BM_VerifyGreedy)->Arg(16)->Arg(64)->Arg(256);

void BM_Generate(benchmark::State& state) {
    const auto kind = static_cast<GeneratorKind>(state.range(0));
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 5);
    const TokenSeq ctx = tokenize(words(vocab, 40, 2), vocab);
    const TokenSeq draft = tokenize(words(vocab, 32, 3), vocab);
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(kind, *lm, ctx, draft, 0, std::nullopt, {std::nullopt, 64}));
    }
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Generate)->Arg(static_cast<int>(GeneratorKind::ar))->Arg(static_cast<int>(GeneratorKind::jacobi));

void BM_Turn(benchmark::State& state) {
    const auto mode = state.range(0) == 0 ? RunMode::baseline : RunMode::predgen;
    const Vocabulary vocab = toy_vocabulary();
    const std::vector<Conversation> ds{{"bench", {words(vocab, 30, 4)}}};
    PipelineConfig cfg;
    cfg.max_new_tokens = 64;
    const auto backend = toy_backend();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_dataset(ds, cfg, backend, mode, "bench"));
    }
    state.SetLabel(mode == RunMode::baseline ? "baseline" : "predgen");
}
BENCHMARK(BM_Turn)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
