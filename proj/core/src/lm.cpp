// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/lm.hpp"

#include <algorithm>
#include <cmath>

namespace predgen {

std::string format_judge_prompt(std::string_view partial_prompt, std::string_view partial_answer) {
    std::string out;
    out += "<|im_start|>user\n";
    out += "You are given an incomplete prompt and the model's speculative partial answer.\n";
    out += "Please judge whether the partial prompt is consistent with the model's answer.\n";
    out += "Partial Prompt: ";
    out += partial_prompt;
    out += "\nPartial Answer: ";
    out += partial_answer;
    out += "\n<|im_end|>\n<|im_start|>assistant\n";
    return out;
}

SimDuration LatencyModel::pass_cost(std::size_t new_positions) const {
    return from_ms(pass_base_ms + per_new_token_ms * static_cast<double>(new_positions));
}

void LatencyModel::validate() const {
    if (!(pass_base_ms >= 0.0) || !(per_new_token_ms >= 0.0)) {
        throw std::invalid_argument("latency model costs must be non-negative");
    }
}

std::span<float> LogitsBlock::append_row() {
    const auto offset = scores_.size();
    scores_.resize(offset + vocab_size_, 0.0f);
    return std::span<float>(scores_).subspan(offset, vocab_size_);
}

std::span<const float> LogitsBlock::row(std::size_t r) const {
    if (r >= rows()) {
        throw std::out_of_range("logits row out of range");
    }
    return std::span<const float>(scores_).subspan(r * vocab_size_, vocab_size_);
}

std::span<const float> LogitsBlock::at_position(std::size_t pos) const {
    if (pos < first_position_) {
        throw std::out_of_range("position covered by cache, no logits row");
    }
    return row(pos - first_position_);
}

bool CacheHandle::valid_for(std::span<const Token> context) const {
    return common_prefix(context) == length_;
}

std::size_t CacheHandle::common_prefix(std::span<const Token> context) const {
    const std::size_t n = std::min(length_, context.size());
    std::size_t i = 0;
    while (i < n && (*tokens_)[i] == context[i]) {
        ++i;
    }
    return i;
}

CacheHandle CacheHandle::truncated(std::size_t length) const {
    if (length > length_) {
        throw PrefixViolation("cannot extend a cache by truncation");
    }
    return CacheHandle(id_, tokens_, length);
}

ForwardResult LanguageModel::forward(std::span<const Token> context, const std::optional<CacheHandle>& cache) {
    std::size_t first = 0;
    if (cache) {
        if (!cache->valid_for(context)) {
            throw PrefixViolation("context does not extend cached prefix of length " +
                                  std::to_string(cache->length()));
        }
        first = cache->length();
    }
    if (first >= context.size()) {
        throw std::invalid_argument("forward pass with no uncached positions");
    }
    LogitsBlock logits(vocab_size(), first);
    score_positions(context, first, logits);
    const std::size_t new_positions = context.size() - first;
    auto tokens = std::make_shared<const TokenSeq>(context.begin(), context.end());
    return ForwardResult{std::move(logits), CacheHandle(next_cache_id_++, std::move(tokens), context.size()),
                         pass_cost(new_positions), new_positions};
}

JudgeOutcome LanguageModel::judge_consistency(std::string_view, std::string_view) {
    throw CapabilityError("backend does not support consistency judging");
}

SimDuration LanguageModel::judge_pass_cost(std::string_view partial_prompt,
                                           std::string_view partial_answer) const {
    return pass_cost(split_words(format_judge_prompt(partial_prompt, partial_answer)).size());
}

namespace {

// Strict weak order used for ranking: higher score first, then lower id.
bool ranks_before(std::span<const float> row, Token a, Token b) {
    return row[a] != row[b] ? row[a] > row[b] : a < b;
}

}  // namespace

Token argmax_token(std::span<const float> row) {
    if (row.empty()) {
        throw std::invalid_argument("argmax of empty row");
    }
    Token best = 0;
    for (Token t = 1; t < row.size(); ++t) {
        if (row[t] > row[best]) {
            best = t;
        }
    }
    return best;
}

std::vector<Token> topk_tokens(std::span<const float> row, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("top-k needs k >= 1");
    }
    std::vector<Token> ids(row.size());
    for (Token t = 0; t < row.size(); ++t) {
        ids[t] = t;
    }
    const std::size_t n = std::min(k, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](Token a, Token b) { return ranks_before(row, a, b); });
    ids.resize(n);
    return ids;
}

bool in_topk(std::span<const float> row, Token token, std::size_t k) {
    if (token >= row.size()) {
        return false;
    }
    std::size_t better = 0;
    for (Token t = 0; t < row.size() && better < k; ++t) {
        if (t != token && ranks_before(row, t, token)) {
            ++better;
        }
    }
    return better < k;
}

StopRule stop_after_first_sentence(const Vocabulary& vocab) {
    return [&vocab](std::span<const Token> generated) {
        return sentence_end(generated, 0, vocab).has_value();
    };
}

TokenSeq greedy_decode(LanguageModel& lm, std::span<const Token> prompt, std::size_t max_new,
                       const StopRule& stop) {
    TokenSeq seq(prompt.begin(), prompt.end());
    if (max_new == 0) {
        return seq;
    }
    if (seq.empty()) {
        throw std::invalid_argument("greedy decoding needs a non-empty prompt");
    }
    std::optional<CacheHandle> cache;
    for (std::size_t produced = 0; produced < max_new; ++produced) {
        ForwardResult fwd = lm.forward(seq, cache);
        const Token next = argmax_token(fwd.logits.row(fwd.logits.rows() - 1));
        cache = fwd.cache;
        seq.push_back(next);
        if (next == kEosToken) {
            break;
        }
        if (stop && stop(std::span<const Token>(seq).subspan(prompt.size()))) {
            break;
        }
    }
    return seq;
}

}  // namespace predgen
