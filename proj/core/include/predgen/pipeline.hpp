// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predgen/events.hpp"
#include "predgen/generator.hpp"
#include "predgen/lm.hpp"
#include "predgen/prompt_stream.hpp"
#include "predgen/tts_sim.hpp"
#include "predgen/verifier.hpp"

namespace predgen {

struct PipelineConfig {
    VerifierConfig verifier;
    GeneratorKind generator = GeneratorKind::ar;
    TtsLatencyModel tts;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
    double rate_chars_per_min = PromptStream::kDefaultRate;
    std::size_t chunk_words = PromptStream::kDefaultChunkWords;
    std::uint64_t seed = 42;
    std::string system_prompt{kDefaultSystemPrompt};

    void validate() const;
};

/// "predgen-greedy", "predgen-top3", "predgen-reflection", with a
/// "-jacobi" suffix for the Jacobi generator.
std::string method_name(const PipelineConfig& cfg);
inline constexpr std::string_view kBaselineMethod = "baseline";

/// Shared state of one conversation. The clock and TTS simulator belong to
/// it; the backend is used by one turn at a time.
struct Session {
    LanguageModel& lm;
    Vocabulary& vocab;
    SimClock& clock;
    TtsSimulator& tts;
    EventLog& log;
};

struct TurnInfo {
    std::string turn_id;
    int round = 1;
    std::string dataset;
};

struct TurnResult {
    std::string turn_id;
    int round = 1;
    std::string final_text;
    TokenSeq response;
    /// Audio job played for the first sentence, if any.
    std::optional<TtsJobId> first_audio_job;
};

/// Speculates while `stream` arrives, then verifies and answers the final
/// prompt. `history` is the tokenized conversation so far.
TurnResult run_turn(Session& session, std::span<const Token> history, const PromptStream& stream,
                    const PipelineConfig& cfg, const TurnInfo& info);

/// Waits for the final prompt, then decodes greedily.
TurnResult run_baseline(Session& session, std::span<const Token> history, const PromptStream& stream,
                        const PipelineConfig& cfg, const TurnInfo& info);

enum class RunMode { predgen, baseline };

/// Runs the user turns in order on one session; each turn's stream starts
/// when the previous turn is done and sees the earlier turns as history.
std::vector<TurnResult> run_conversation(Session& session, const std::vector<std::string>& turns,
                                         const PipelineConfig& cfg, RunMode mode,
                                         const std::string& conversation_id, const std::string& dataset = {});

struct Conversation {
    std::string id;
    std::vector<std::string> turns;
};

/// JSONL, one {"id": ..., "turns": [...]} object per line.
std::vector<Conversation> parse_dataset(std::istream& in);
std::vector<Conversation> load_dataset(const std::filesystem::path& path);

struct Backend {
    std::unique_ptr<Vocabulary> vocab;
    std::unique_ptr<LanguageModel> lm;
};
using BackendFactory = std::function<Backend(const PipelineConfig&)>;

struct RunOutput {
    EventLog log;
    std::vector<TurnResult> turns;
};

/// Every conversation gets a fresh backend, clock and TTS simulator.
RunOutput run_dataset(const std::vector<Conversation>& dataset, const PipelineConfig& cfg,
                      const BackendFactory& make_backend, RunMode mode, const std::string& dataset_name = {});

}  // namespace predgen
