// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "predgen/lm.hpp"

namespace predgen {

enum class VerifierKind { greedy, topk, reflection };

std::string_view to_string(VerifierKind kind);
VerifierKind parse_verifier_kind(std::string_view name);

enum class JudgeVerdict { none, yes, no, unsupported };

/// How much of a candidate response survives a newer prompt.
struct VerifierOutcome {
    std::size_t accepted = 0;
    bool first_sentence_accepted = false;
    /// End of the candidate's first sentence, if it has one.
    std::optional<std::size_t> first_sentence_end;
    /// Covers exactly context + accepted tokens when present.
    std::optional<CacheHandle> cache;
    SimDuration cost{};
    int nfe = 0;
    JudgeVerdict judge = JudgeVerdict::none;
};

// `context` is everything the model conditions on before the response
// (system prompt, history, partial prompt) and must be non-empty. `cache`,
// if given, may cover any prefix of it; only the shared prefix is reused.

/// Accepts the longest prefix of `response` matching the argmax of a single
/// pass over context ++ response.
VerifierOutcome verify_greedy(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                              std::span<const Token> response, const std::optional<CacheHandle>& cache = {});

/// Like verify_greedy, but a token survives when it ranks in the top `k`.
VerifierOutcome verify_topk(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                            std::span<const Token> response, std::size_t k,
                            const std::optional<CacheHandle>& cache = {});

/// Asks the model's judge whether the first sentence of `response` is
/// consistent with `prompt_text`; "yes" accepts exactly that sentence with no
/// cache, anything else falls back to verify_greedy (plus the judge pass).
VerifierOutcome verify_reflection(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                                  std::string_view prompt_text, std::span<const Token> response,
                                  const std::optional<CacheHandle>& cache = {});

struct VerifierConfig {
    VerifierKind kind = VerifierKind::greedy;
    std::size_t top_k = 3;
};

VerifierOutcome verify(const VerifierConfig& cfg, LanguageModel& lm, const Vocabulary& vocab,
                       std::span<const Token> context, std::string_view prompt_text,
                       std::span<const Token> response, const std::optional<CacheHandle>& cache = {});

}  // namespace predgen
