// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "predgen/lm.hpp"

namespace predgen {

struct ScriptEntry {
    std::string prompt_prefix;
    std::string continuation;
};

struct VerdictEntry {
    std::string prompt;
    std::string answer;
    bool yes = false;
};

/// Scenario description for ScriptedLm.
struct Script {
    std::vector<ScriptEntry> entries;
    std::vector<VerdictEntry> verdicts;
    std::string fallback{kEosSurface};
};

/// Accepts {"entries": [...], "verdicts": [...], "fallback": "..."} or a flat
/// array whose elements are entries ({prompt_prefix, continuation}) or
/// verdicts ({prompt, answer, verdict: "yes"|"no"}).
Script parse_script(const nlohmann::json& doc);
Script load_script(const std::filesystem::path& path);

/// Table-driven model for constructing exact scenarios. The token after a
/// context is continuation[j] of the entry whose prompt_prefix ++
/// continuation[0:j] is the longest suffix of the context (earlier entries
/// win ties); the fallback token otherwise.
class ScriptedLm final : public LanguageModel {
public:
    /// Interns every scripted word into `vocab`; the output vocabulary is
    /// fixed to vocab.size() at construction.
    ScriptedLm(const Script& script, Vocabulary& vocab, LatencyModel latency = {});

    std::size_t vocab_size() const override { return vocab_size_; }

    /// Scripted verdict for (prompt, answer); unscripted pairs and empty
    /// answers score "no".
    JudgeOutcome judge_consistency(std::string_view partial_prompt,
                                   std::string_view partial_answer) override;

    Token predict(std::span<const Token> context) const;

protected:
    void score_positions(std::span<const Token> context, std::size_t first, LogitsBlock& out) override;

private:
    struct Compiled {
        TokenSeq prompt;
        TokenSeq continuation;
    };

    std::vector<Compiled> entries_;
    std::map<std::pair<std::string, std::string>, bool> verdicts_;
    Token fallback_ = kEosToken;
    std::size_t vocab_size_ = 0;
};

}  // namespace predgen
