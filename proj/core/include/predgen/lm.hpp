// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "predgen/sim_clock.hpp"
#include "predgen/text.hpp"

namespace predgen {

/// Chat-formatted system prompt prepended to every generation context.
inline constexpr std::string_view kDefaultSystemPrompt =
    "<|im_start|>system\n"
    "The instruction provided by the user may be truncated. In such cases, respond based on your "
    "best guess of the incomplete instruction. Do not complain about incomplete prompts.\n"
    "<|im_end|>\n";

/// Prompt asking the model whether a partial answer is consistent with a
/// partial prompt; the answer is scored as a single "yes"/"no" word.
std::string format_judge_prompt(std::string_view partial_prompt, std::string_view partial_answer);

/// Virtual cost of a forward pass.
struct LatencyModel {
    double pass_base_ms = 25.0;
    double per_new_token_ms = 0.0;

    SimDuration pass_cost(std::size_t new_positions) const;
    void validate() const;
};

/// Next-token scores for a contiguous run of context positions. Row r holds
/// the prediction for the token following position first_position() + r.
class LogitsBlock {
public:
    LogitsBlock() = default;
    LogitsBlock(std::size_t vocab_size, std::size_t first_position)
        : vocab_size_(vocab_size), first_position_(first_position) {}

    std::span<float> append_row();

    std::size_t rows() const { return vocab_size_ == 0 ? 0 : scores_.size() / vocab_size_; }
    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t first_position() const { return first_position_; }

    std::span<const float> row(std::size_t r) const;
    /// Row predicting the token after absolute context position `pos`.
    std::span<const float> at_position(std::size_t pos) const;

    bool operator==(const LogitsBlock&) const = default;

private:
    std::size_t vocab_size_ = 0;
    std::size_t first_position_ = 0;
    std::vector<float> scores_;
};

/// Reusable model state over an immutable token prefix.
class CacheHandle {
public:
    std::uint64_t id() const { return id_; }
    std::size_t length() const { return length_; }

    /// True when `context` extends the cached prefix.
    bool valid_for(std::span<const Token> context) const;
    /// Length of the cached prefix shared with `context`.
    std::size_t common_prefix(std::span<const Token> context) const;
    /// Handle over the first `length` cached tokens (KV truncation is free).
    CacheHandle truncated(std::size_t length) const;

private:
    friend class LanguageModel;
    CacheHandle(std::uint64_t id, std::shared_ptr<const TokenSeq> tokens, std::size_t length)
        : id_(id), tokens_(std::move(tokens)), length_(length) {}

    std::uint64_t id_ = 0;
    std::shared_ptr<const TokenSeq> tokens_;
    std::size_t length_ = 0;
};

struct ForwardResult {
    LogitsBlock logits;
    CacheHandle cache;
    SimDuration cost{};
    std::size_t new_positions = 0;
};

struct JudgeResult {
    double yes_score = 0.0;
    double no_score = 0.0;
    bool says_yes() const { return yes_score > no_score; }
};

struct JudgeOutcome {
    JudgeResult verdict;
    SimDuration cost{};
};

class PrefixViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised by backends that cannot score the consistency judge prompt.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Language model with prefix-cache semantics and modeled pass costs.
/// A backend instance serves one pipeline at a time.
class LanguageModel {
public:
    explicit LanguageModel(LatencyModel latency = {}) : latency_(latency) { latency_.validate(); }
    virtual ~LanguageModel() = default;

    LanguageModel(const LanguageModel&) = delete;
    LanguageModel& operator=(const LanguageModel&) = delete;

    virtual std::size_t vocab_size() const = 0;

    /// One pass over the positions of `context` not covered by `cache`.
    /// Throws PrefixViolation if `context` does not extend the cache.
    ForwardResult forward(std::span<const Token> context, const std::optional<CacheHandle>& cache = {});

    /// Scores "yes"/"no" for the judge prompt. The default backend has no
    /// judge and throws CapabilityError.
    virtual JudgeOutcome judge_consistency(std::string_view partial_prompt,
                                           std::string_view partial_answer);

    /// Cost a pass over `new_positions` uncached positions will be charged.
    /// Measured backends override this with their own estimate.
    virtual SimDuration pass_cost(std::size_t new_positions) const {
        return latency_.pass_cost(new_positions);
    }

    const LatencyModel& latency() const { return latency_; }
    void set_latency(LatencyModel m) {
        m.validate();
        latency_ = m;
    }

protected:
    /// Appends one row per position in [first, context.size()) to `out`.
    virtual void score_positions(std::span<const Token> context, std::size_t first,
                                 LogitsBlock& out) = 0;

    /// Cost of one pass over the judge prompt.
    SimDuration judge_pass_cost(std::string_view partial_prompt, std::string_view partial_answer) const;

private:
    LatencyModel latency_;
    std::uint64_t next_cache_id_ = 1;
};

/// Highest-scoring token; ties go to the lowest id.
Token argmax_token(std::span<const float> row);

/// The min(k, |V|) best tokens in rank order (score desc, id asc).
std::vector<Token> topk_tokens(std::span<const float> row, std::size_t k);

/// Whether `token` ranks within the top `k` under the same order.
bool in_topk(std::span<const float> row, Token token, std::size_t k);

using StopRule = std::function<bool(std::span<const Token> generated)>;

/// Stops once the generated tokens contain a complete sentence.
StopRule stop_after_first_sentence(const Vocabulary& vocab);

/// Reference greedy decoding: appends argmax tokens to `prompt` until EOS,
/// `stop`, or `max_new` new tokens. Returns prompt ++ generated.
TokenSeq greedy_decode(LanguageModel& lm, std::span<const Token> prompt, std::size_t max_new,
                       const StopRule& stop = {});

}  // namespace predgen
