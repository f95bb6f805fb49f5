// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "predgen/lm.hpp"

namespace predgen {

struct NgramLmConfig {
    std::size_t vocab_size = 0;
    std::size_t order = 3;
    std::uint64_t seed = 42;
    std::vector<Token> terminators;  // receive terminator_bonus
    float terminator_bonus = 0.04f;
    float eos_bonus = 0.02f;
};

/// Deterministic n-gram stand-in: the scores following a position are a
/// seeded pseudorandom function of the last `order` tokens. Nothing is
/// trained; the point is arbitrary but reproducible distributions.
class HashNgramLm final : public LanguageModel {
public:
    explicit HashNgramLm(NgramLmConfig config, LatencyModel latency = {});

    std::size_t vocab_size() const override { return config_.vocab_size; }
    const NgramLmConfig& config() const { return config_; }

protected:
    void score_positions(std::span<const Token> context, std::size_t first, LogitsBlock& out) override;

private:
    NgramLmConfig config_;
    std::vector<float> bonus_;
};

/// A small closed English vocabulary: EOS, punctuation, then common words.
Vocabulary toy_vocabulary();

/// HashNgramLm whose output vocabulary is every word currently in `vocab`.
std::unique_ptr<HashNgramLm> make_toy_lm(const Vocabulary& vocab, std::uint64_t seed,
                                         LatencyModel latency = {}, std::size_t order = 3);

}  // namespace predgen
