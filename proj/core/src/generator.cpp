// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/generator.hpp"

#include <algorithm>

namespace predgen {

std::string_view to_string(GeneratorKind kind) {
    return kind == GeneratorKind::ar ? "ar" : "jacobi";
}

GeneratorKind parse_generator_kind(std::string_view name) {
    if (name == "ar") return GeneratorKind::ar;
    if (name == "jacobi") return GeneratorKind::jacobi;
    throw std::invalid_argument("unknown generator: " + std::string(name));
}

void PassMeter::record(PassKind kind, SimDuration cost, std::size_t new_positions,
                       std::size_t response_length) {
    PassRecord rec;
    rec.kind = kind;
    rec.start = clock_.now();
    clock_.charge(cost);
    rec.end = clock_.now();
    rec.cost = cost;
    rec.new_positions = new_positions;
    rec.response_length = response_length;
    if (on_pass_) {
        on_pass_(rec);
    }
}

namespace {

// Cache prefix usable for a pass over `seq` that must produce logits from
// position `first_needed` on.
std::optional<CacheHandle> reusable(const std::optional<CacheHandle>& cache, std::span<const Token> seq,
                                    std::size_t first_needed) {
    if (!cache) {
        return std::nullopt;
    }
    const std::size_t usable = std::min(cache->common_prefix(seq), first_needed);
    if (usable == 0) {
        return std::nullopt;
    }
    return cache->truncated(usable);
}

TokenSeq concat(std::span<const Token> a, std::span<const Token> b) {
    TokenSeq out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

GenerationResult ar_generate(LanguageModel& lm, std::span<const Token> context,
                             std::span<const Token> response, std::size_t accepted,
                             const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                             const StopRule& stop, PassMeter* meter) {
    if (accepted > response.size()) {
        throw std::invalid_argument("accepted count exceeds response length");
    }
    GenerationResult res;
    res.response.assign(response.begin(), response.begin() + static_cast<std::ptrdiff_t>(accepted));
    res.cache = cache;
    TokenSeq seq = concat(context, res.response);

    while (true) {
        if (!res.response.empty() && res.response.back() == kEosToken) {
            res.complete = true;
            break;
        }
        if (res.response.size() >= budget.max_new_tokens || (stop && stop(res.response))) {
            break;
        }
        if (seq.empty()) {
            throw std::invalid_argument("generation needs a non-empty context");
        }
        auto reuse = reusable(res.cache, seq, seq.size() - 1);
        const std::size_t new_positions = seq.size() - (reuse ? reuse->length() : 0);
        if (meter && !meter->admits(lm.pass_cost(new_positions), budget.deadline)) {
            res.interrupted = true;
            break;
        }
        ForwardResult fwd = lm.forward(seq, reuse);
        const Token next = argmax_token(fwd.logits.row(fwd.logits.rows() - 1));
        res.cache = fwd.cache;
        res.cost += fwd.cost;
        ++res.nfe;
        seq.push_back(next);
        res.response.push_back(next);
        if (meter) {
            meter->record(PassKind::ar_step, fwd.cost, new_positions, res.response.size());
        }
    }
    return res;
}

GenerationResult jacobi_generate(LanguageModel& lm, std::span<const Token> context,
                                 std::span<const Token> response, std::size_t accepted,
                                 const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                                 const StopRule& stop, PassMeter* meter) {
    if (accepted > response.size()) {
        throw std::invalid_argument("accepted count exceeds response length");
    }
    const std::span<const Token> prefix = response.first(accepted);
    const std::size_t room = budget.max_new_tokens > accepted ? budget.max_new_tokens - accepted : 0;
    TokenSeq window(response.begin() + static_cast<std::ptrdiff_t>(accepted), response.end());
    if (window.size() > room) {
        window.resize(room);
    }

    GenerationResult res;
    res.cache = cache;
    const std::size_t base = context.size() + accepted;
    const bool skip = window.empty() || (stop && stop(prefix)) ||
                      (!prefix.empty() && prefix.back() == kEosToken);

    if (!skip) {
        if (base == 0) {
            throw std::invalid_argument("generation needs a non-empty context");
        }
        while (true) {
            TokenSeq seq = concat(concat(context, prefix), window);
            // Every window position is recomputed: rows start at base - 1.
            auto reuse = reusable(res.cache, seq, base - 1);
            const std::size_t new_positions = seq.size() - (reuse ? reuse->length() : 0);
            if (meter && !meter->admits(lm.pass_cost(new_positions), budget.deadline)) {
                res.interrupted = true;
                if (auto eos = std::find(window.begin(), window.end(), kEosToken); eos != window.end()) {
                    window.erase(eos + 1, window.end());
                }
                break;
            }
            ForwardResult fwd = lm.forward(seq, reuse);
            TokenSeq next(window.size());
            for (std::size_t i = 0; i < window.size(); ++i) {
                next[i] = argmax_token(fwd.logits.at_position(base - 1 + i));
            }
            res.cache = fwd.cache;
            res.cost += fwd.cost;
            ++res.nfe;
            ++res.jacobi_iterations;
            if (meter) {
                meter->record(PassKind::jacobi_iteration, fwd.cost, new_positions, accepted + next.size());
            }

            // If the first m tokens were unchanged, the first m + 1 tokens of
            // the new window are the greedy continuation.
            std::size_t agree = 0;
            while (agree < window.size() && window[agree] == next[agree]) {
                ++agree;
            }
            const std::size_t fixed = std::min(agree + 1, next.size());
            window = std::move(next);
            if (auto eos = std::find(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(fixed), kEosToken);
                eos != window.begin() + static_cast<std::ptrdiff_t>(fixed)) {
                window.erase(eos + 1, window.end());
                res.converged = true;
                break;
            }
            if (fixed == window.size()) {
                res.converged = true;
                break;
            }
        }
    }

    TokenSeq current = concat(prefix, window);
    if (res.interrupted) {
        res.response = std::move(current);
        return res;
    }
    GenerationResult tail = ar_generate(lm, context, current, current.size(), res.cache, budget, stop, meter);
    tail.nfe += res.nfe;
    tail.cost += res.cost;
    tail.jacobi_iterations = res.jacobi_iterations;
    tail.converged = res.converged;
    return tail;
}

GenerationResult generate(GeneratorKind kind, LanguageModel& lm, std::span<const Token> context,
                          std::span<const Token> response, std::size_t accepted,
                          const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                          const StopRule& stop, PassMeter* meter) {
    if (kind == GeneratorKind::jacobi) {
        return jacobi_generate(lm, context, response, accepted, cache, budget, stop, meter);
    }
    return ar_generate(lm, context, response, accepted, cache, budget, stop, meter);
}

}  // namespace predgen
