// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/verifier.hpp"

#include <algorithm>

namespace predgen {

std::string_view to_string(VerifierKind kind) {
    switch (kind) {
        case VerifierKind::greedy: return "greedy";
        case VerifierKind::topk: return "topk";
        case VerifierKind::reflection: return "reflection";
    }
    return "unknown";
}

VerifierKind parse_verifier_kind(std::string_view name) {
    if (name == "greedy") return VerifierKind::greedy;
    if (name == "topk") return VerifierKind::topk;
    if (name == "reflection") return VerifierKind::reflection;
    throw std::invalid_argument("unknown verifier: " + std::string(name));
}

namespace {

template <typename Accept>
VerifierOutcome verify_prefix(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                              std::span<const Token> response, const std::optional<CacheHandle>& cache,
                              Accept accept) {
    VerifierOutcome out;
    out.first_sentence_end = sentence_end(response, 0, vocab);
    if (response.empty()) {
        return out;
    }
    if (context.empty()) {
        throw std::invalid_argument("verification needs a non-empty context");
    }
    TokenSeq seq(context.begin(), context.end());
    seq.insert(seq.end(), response.begin(), response.end());

    // The row at the last context position predicts response[0], so at most
    // context.size() - 1 positions may come from the cache.
    std::optional<CacheHandle> reuse;
    if (cache) {
        const std::size_t usable = std::min(cache->common_prefix(seq), context.size() - 1);
        if (usable > 0) {
            reuse = cache->truncated(usable);
        }
    }
    ForwardResult fwd = lm.forward(seq, reuse);
    std::size_t k = 0;
    while (k < response.size() && accept(fwd.logits.at_position(context.size() - 1 + k), response[k])) {
        ++k;
    }
    out.accepted = k;
    out.first_sentence_accepted = out.first_sentence_end && k >= *out.first_sentence_end;
    out.cache = fwd.cache.truncated(context.size() + k);
    out.cost = fwd.cost;
    out.nfe = 1;
    return out;
}

}  // namespace

VerifierOutcome verify_greedy(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                              std::span<const Token> response, const std::optional<CacheHandle>& cache) {
    return verify_prefix(lm, vocab, context, response, cache,
                         [](std::span<const float> row, Token t) { return argmax_token(row) == t; });
}

VerifierOutcome verify_topk(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                            std::span<const Token> response, std::size_t k,
                            const std::optional<CacheHandle>& cache) {
    if (k == 0) {
        throw std::invalid_argument("top-k verification needs k >= 1");
    }
    return verify_prefix(lm, vocab, context, response, cache,
                         [k](std::span<const float> row, Token t) { return in_topk(row, t, k); });
}

VerifierOutcome verify_reflection(LanguageModel& lm, const Vocabulary& vocab, std::span<const Token> context,
                                  std::string_view prompt_text, std::span<const Token> response,
                                  const std::optional<CacheHandle>& cache) {
    const auto end = sentence_end(response, 0, vocab);
    if (!end) {
        return verify_greedy(lm, vocab, context, response, cache);
    }
    JudgeOutcome judged;
    try {
        judged = lm.judge_consistency(prompt_text, detokenize(response.first(*end), vocab));
    } catch (const CapabilityError&) {
        VerifierOutcome out = verify_greedy(lm, vocab, context, response, cache);
        out.judge = JudgeVerdict::unsupported;
        return out;
    }
    if (judged.verdict.says_yes()) {
        VerifierOutcome out;
        out.accepted = *end;
        out.first_sentence_accepted = true;
        out.first_sentence_end = end;
        out.cost = judged.cost;
        out.nfe = 1;
        out.judge = JudgeVerdict::yes;
        return out;
    }
    VerifierOutcome out = verify_greedy(lm, vocab, context, response, cache);
    out.cost += judged.cost;
    out.nfe += 1;
    out.judge = JudgeVerdict::no;
    return out;
}

VerifierOutcome verify(const VerifierConfig& cfg, LanguageModel& lm, const Vocabulary& vocab,
                       std::span<const Token> context, std::string_view prompt_text,
                       std::span<const Token> response, const std::optional<CacheHandle>& cache) {
    switch (cfg.kind) {
        case VerifierKind::greedy: return verify_greedy(lm, vocab, context, response, cache);
        case VerifierKind::topk: return verify_topk(lm, vocab, context, response, cfg.top_k, cache);
        case VerifierKind::reflection:
            return verify_reflection(lm, vocab, context, prompt_text, response, cache);
    }
    throw std::logic_error("unreachable verifier kind");
}

}  // namespace predgen
