// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "predgen/sim_clock.hpp"

namespace predgen {

using TtsJobId = std::uint64_t;

class TtsError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct TtsLatencyModel {
    double first_chunk_ms = 200.0;
    double per_chunk_ms = 80.0;
    double chunk_audio_ms = 80.0;     // playback length of one chunk
    std::size_t buffer_target = 17;   // chunks synthesized before pausing
    double chars_per_chunk = 4.0;

    /// Audio chunks needed for the whole of `text`, at least 1.
    std::size_t total_chunks(std::string_view text) const;
    void validate() const;
};

enum class TtsState { synthesizing, buffered, resumed, canceled };

std::string_view to_string(TtsState state);

struct TtsJob {
    TtsJobId id = 0;
    std::string text;
    std::size_t buffer_target = 0;  // min(model target, total chunks)
    std::size_t total_chunks = 0;
    std::size_t chunks_ready = 0;
    TtsState state = TtsState::synthesizing;
    SimTime submitted_at;
    SimTime first_chunk_ready_at;
    SimTime buffered_at;
    /// Opaque resume token, set once the buffer is complete.
    std::optional<std::uint64_t> saved_state;
    /// Playback requested while still synthesizing.
    bool resume_pending = false;
};

/// Operations a streaming TTS engine offers the pipeline.
class TtsEngine {
public:
    virtual ~TtsEngine() = default;

    virtual TtsJobId synthesize_buffer(std::string_view text) = 0;
    /// Playable times of every chunk when streaming resumes at `at`.
    virtual std::vector<SimTime> resume(TtsJobId id, SimTime at) = 0;
    virtual void cancel(TtsJobId id) = 0;
    virtual const TtsJob& job(TtsJobId id) const = 0;
};

/// Chunked TTS on the virtual clock. Buffer chunks become ready through
/// clock events, so job state only changes while the clock advances.
class TtsSimulator final : public TtsEngine {
public:
    /// Called for every buffered chunk as it becomes ready (1-based index).
    using ChunkObserver = std::function<void(const TtsJob&, std::size_t chunk)>;

    explicit TtsSimulator(SimClock& clock, TtsLatencyModel model = {}, ChunkObserver on_chunk = {});

    /// Starts synthesizing the buffer for `text` at the current time.
    TtsJobId synthesize_buffer(std::string_view text) override;
    /// Requires a buffered job; buffered chunks are playable at `at`, the
    /// rest follow every per_chunk_ms.
    std::vector<SimTime> resume(TtsJobId id, SimTime at) override;
    /// Idempotent. Chunks not yet ready are discarded.
    void cancel(TtsJobId id) override;
    const TtsJob& job(TtsJobId id) const override;

    /// Time the first audio chunk can play when playback is requested at
    /// `now`: `now` for a buffered job, the first chunk's ready time for a
    /// job still synthesizing (it resumes once buffered).
    SimTime start_playback(TtsJobId id, SimTime now);

    void set_observer(ChunkObserver on_chunk) { on_chunk_ = std::move(on_chunk); }

    const TtsLatencyModel& model() const { return model_; }
    /// Synthesis time spent on buffers, whether or not they were played.
    SimDuration buffer_synthesis_cost() const { return buffer_cost_; }
    /// Synthesis time spent after resume.
    SimDuration resume_synthesis_cost() const { return resume_cost_; }
    std::size_t job_count() const { return jobs_.size(); }

private:
    TtsJob& get(TtsJobId id);
    void chunk_ready(TtsJobId id, std::size_t chunk);

    SimClock& clock_;
    TtsLatencyModel model_;
    ChunkObserver on_chunk_;
    std::map<TtsJobId, TtsJob> jobs_;
    TtsJobId next_id_ = 1;
    std::uint64_t next_state_ = 1;
    SimDuration buffer_cost_{};
    SimDuration resume_cost_{};
};

}  // namespace predgen
