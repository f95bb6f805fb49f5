// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/toy_lm.hpp"

#include <array>
#include <string_view>

namespace predgen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

float to_unit(std::uint64_t x) {
    // 24 high bits -> [0, 1), exactly representable in float.
    return static_cast<float>(x >> 40) / static_cast<float>(1u << 24);
}

constexpr std::array<std::string_view, 60> kToyWords = {
    "the",   "a",      "you",    "I",       "it",     "is",     "was",   "will",  "have",   "can",
    "to",    "of",     "and",    "in",      "on",     "with",   "for",   "that",  "this",   "my",
    "your",  "we",     "they",   "time",    "day",    "water",  "tree",  "city",  "music",  "book",
    "food",  "friend", "idea",   "answer",  "story",  "good",   "great", "small", "old",    "new",
    "first", "last",   "very",   "often",   "never",  "always", "think", "know",  "like",   "see",
    "make",  "go",     "apples", "Alice",   "Bob",    "2",      "3",     "sure",  "here",   "because",
};

}  // namespace

HashNgramLm::HashNgramLm(NgramLmConfig config, LatencyModel latency)
    : LanguageModel(latency), config_(std::move(config)) {
    if (config_.vocab_size == 0) {
        throw std::invalid_argument("n-gram LM needs a non-empty vocabulary");
    }
    if (config_.order == 0) {
        throw std::invalid_argument("n-gram order must be at least 1");
    }
    bonus_.assign(config_.vocab_size, 0.0f);
    for (const Token t : config_.terminators) {
        if (t < bonus_.size()) {
            bonus_[t] += config_.terminator_bonus;
        }
    }
    bonus_[kEosToken] += config_.eos_bonus;
}

void HashNgramLm::score_positions(std::span<const Token> context, std::size_t first, LogitsBlock& out) {
    for (std::size_t pos = first; pos < context.size(); ++pos) {
        const std::size_t begin = pos + 1 >= config_.order ? pos + 1 - config_.order : 0;
        std::uint64_t h = splitmix64(config_.seed ^ (0x5851F42D4C957F2Dull * (pos + 1 - begin)));
        for (std::size_t i = begin; i <= pos; ++i) {
            h = splitmix64(h ^ context[i]);
        }
        auto row = out.append_row();
        for (std::size_t v = 0; v < row.size(); ++v) {
            row[v] = to_unit(splitmix64(h + 0x9E3779B97F4A7C15ull * (v + 1))) + bonus_[v];
        }
    }
}

Vocabulary toy_vocabulary() {
    Vocabulary vocab;
    for (const std::string_view p : {".", "?", "!", ","}) {
        vocab.intern(p);
    }
    for (const auto w : kToyWords) {
        vocab.intern(w);
    }
    return vocab;
}

std::unique_ptr<HashNgramLm> make_toy_lm(const Vocabulary& vocab, std::uint64_t seed,
                                         LatencyModel latency, std::size_t order) {
    NgramLmConfig cfg;
    cfg.vocab_size = vocab.size();
    cfg.order = order;
    cfg.seed = seed;
    for (const std::string_view p : {".", "?", "!"}) {
        if (auto id = vocab.find(p)) {
            cfg.terminators.push_back(*id);
        }
    }
    return std::make_unique<HashNgramLm>(std::move(cfg), latency);
}

}  // namespace predgen
