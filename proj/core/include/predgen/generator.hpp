// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "predgen/lm.hpp"
#include "predgen/sim_clock.hpp"

namespace predgen {

enum class GeneratorKind { ar, jacobi };

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view name);

inline constexpr std::size_t kDefaultMaxNewTokens = 256;

struct GenerationBudget {
    /// Passes that would finish after this time are not started.
    std::optional<SimTime> deadline;
    /// Cap on the total response length (accepted prefix included).
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
};

struct GenerationResult {
    TokenSeq response;
    bool complete = false;      // response ends with EOS
    bool interrupted = false;   // stopped by the deadline
    int nfe = 0;
    SimDuration cost{};
    int jacobi_iterations = 0;
    bool converged = false;
    /// Model state after the last pass, for the next call to continue from.
    std::optional<CacheHandle> cache;
};

enum class PassKind { ar_step, jacobi_iteration };

struct PassRecord {
    PassKind kind = PassKind::ar_step;
    SimTime start;
    SimTime end;
    SimDuration cost{};
    std::size_t new_positions = 0;
    std::size_t response_length = 0;  // after the pass
};

/// Charges each forward pass to a clock and enforces deadlines.
class PassMeter {
public:
    using Observer = std::function<void(const PassRecord&)>;

    explicit PassMeter(SimClock& clock, Observer on_pass = {})
        : clock_(clock), on_pass_(std::move(on_pass)) {}

    bool admits(SimDuration cost, const std::optional<SimTime>& deadline) const {
        return !deadline || clock_.now() + cost <= *deadline;
    }
    void record(PassKind kind, SimDuration cost, std::size_t new_positions, std::size_t response_length);

    SimClock& clock() { return clock_; }

private:
    SimClock& clock_;
    Observer on_pass_;
};

// Generation condition on context ++ response[0:accepted]. Without a meter
// no time is charged and deadlines are ignored. `stop` sees the whole
// response and is checked before every pass.

/// Greedy token-by-token decoding from the accepted prefix.
GenerationResult ar_generate(LanguageModel& lm, std::span<const Token> context,
                             std::span<const Token> response, std::size_t accepted,
                             const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                             const StopRule& stop = {}, PassMeter* meter = nullptr);

/// Jacobi fixed-point iteration over the rejected suffix response[accepted:],
/// followed by greedy continuation once the window has converged.
GenerationResult jacobi_generate(LanguageModel& lm, std::span<const Token> context,
                                 std::span<const Token> response, std::size_t accepted,
                                 const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                                 const StopRule& stop = {}, PassMeter* meter = nullptr);

GenerationResult generate(GeneratorKind kind, LanguageModel& lm, std::span<const Token> context,
                          std::span<const Token> response, std::size_t accepted,
                          const std::optional<CacheHandle>& cache, const GenerationBudget& budget,
                          const StopRule& stop = {}, PassMeter* meter = nullptr);

}  // namespace predgen
