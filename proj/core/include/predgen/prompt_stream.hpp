// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predgen/sim_clock.hpp"

namespace predgen {

struct PromptChunk {
    std::string text;    // cumulative prefix of the full prompt
    std::size_t chars;   // code points in `text`
    SimTime arrival;
};

/// A user turn arriving as word-aligned cumulative prefixes at a fixed
/// character rate.
class PromptStream {
public:
    static constexpr double kDefaultRate = 600.0;  // characters per minute
    static constexpr std::size_t kDefaultChunkWords = 2;

    /// Splits `text` into prefixes of `chunk_words` words each; a prefix of c
    /// characters arrives at start_at + c / rate minutes.
    static PromptStream make(std::string_view text, double rate_chars_per_min = kDefaultRate,
                             std::size_t chunk_words = kDefaultChunkWords,
                             SimTime start_at = SimTime{});

    /// Builds a stream from explicit chunks (e.g. captured keystrokes).
    /// Chunks must be strictly growing prefixes with nondecreasing arrivals.
    static PromptStream from_chunks(std::vector<PromptChunk> chunks, double rate_chars_per_min);

    struct Poll {
        std::optional<std::size_t> index;  // nullopt before the first arrival
        std::string_view text;
        bool is_final = false;
    };

    /// Latest prefix whose arrival time is <= now.
    Poll poll(SimTime now) const;

    const std::string& full_text() const { return full_text_; }
    double rate() const { return rate_; }
    const std::vector<PromptChunk>& chunks() const { return chunks_; }
    const PromptChunk& final_chunk() const { return chunks_.back(); }

private:
    std::string full_text_;
    double rate_ = kDefaultRate;
    std::vector<PromptChunk> chunks_;
};

/// Number of UTF-8 code points in `s`.
std::size_t count_chars(std::string_view s);

}  // namespace predgen
