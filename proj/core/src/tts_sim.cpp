// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/tts_sim.hpp"

#include <algorithm>
#include <cmath>

#include "predgen/prompt_stream.hpp"

namespace predgen {

std::size_t TtsLatencyModel::total_chunks(std::string_view text) const {
    const double n = std::ceil(static_cast<double>(count_chars(text)) / chars_per_chunk);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

void TtsLatencyModel::validate() const {
    if (first_chunk_ms < 0 || per_chunk_ms < 0 || chunk_audio_ms < 0) {
        throw std::invalid_argument("TTS latencies must be >= 0");
    }
    if (buffer_target == 0) {
        throw std::invalid_argument("TTS buffer target must be >= 1");
    }
    if (!(chars_per_chunk > 0)) {
        throw std::invalid_argument("chars_per_chunk must be > 0");
    }
}

std::string_view to_string(TtsState state) {
    switch (state) {
        case TtsState::synthesizing: return "synthesizing";
        case TtsState::buffered: return "buffered";
        case TtsState::resumed: return "resumed";
        case TtsState::canceled: return "canceled";
    }
    return "unknown";
}

TtsSimulator::TtsSimulator(SimClock& clock, TtsLatencyModel model, ChunkObserver on_chunk)
    : clock_(clock), model_(model), on_chunk_(std::move(on_chunk)) {
    model_.validate();
}

TtsJobId TtsSimulator::synthesize_buffer(std::string_view text) {
    if (text.empty()) {
        throw std::invalid_argument("cannot synthesize empty text");
    }
    TtsJob job;
    job.id = next_id_++;
    job.text = std::string(text);
    job.total_chunks = model_.total_chunks(text);
    job.buffer_target = std::min(model_.buffer_target, job.total_chunks);
    job.submitted_at = clock_.now();
    job.first_chunk_ready_at = job.submitted_at + from_ms(model_.first_chunk_ms);
    job.buffered_at = job.first_chunk_ready_at +
                      from_ms(model_.per_chunk_ms) * static_cast<std::int64_t>(job.buffer_target - 1);
    const TtsJobId id = job.id;
    jobs_.emplace(id, std::move(job));
    const TtsJob& stored = jobs_.at(id);
    for (std::size_t c = 1; c <= stored.buffer_target; ++c) {
        const SimTime at = stored.first_chunk_ready_at + from_ms(model_.per_chunk_ms) * static_cast<std::int64_t>(c - 1);
        clock_.schedule(at, [this, id, c] { chunk_ready(id, c); });
    }
    return id;
}

void TtsSimulator::chunk_ready(TtsJobId id, std::size_t chunk) {
    TtsJob& job = get(id);
    if (job.state == TtsState::canceled) {
        return;
    }
    buffer_cost_ += chunk == 1 ? from_ms(model_.first_chunk_ms) : from_ms(model_.per_chunk_ms);
    job.chunks_ready = chunk;
    if (chunk == job.buffer_target) {
        job.state = TtsState::buffered;
        job.saved_state = next_state_++;
    }
    if (on_chunk_) {
        on_chunk_(job, chunk);
    }
    if (job.state == TtsState::buffered && job.resume_pending) {
        job.resume_pending = false;
        resume(id, clock_.now());
    }
}

std::vector<SimTime> TtsSimulator::resume(TtsJobId id, SimTime at) {
    TtsJob& job = get(id);
    if (job.state == TtsState::canceled) {
        throw TtsError("cannot resume canceled TTS job " + std::to_string(id));
    }
    if (job.state != TtsState::buffered) {
        throw TtsError("TTS job " + std::to_string(id) + " is " + std::string(to_string(job.state)) +
                       ", not buffered");
    }
    std::vector<SimTime> times(job.total_chunks, at);
    const SimDuration step = from_ms(model_.per_chunk_ms);
    for (std::size_t c = job.buffer_target; c < job.total_chunks; ++c) {
        times[c] = at + step * static_cast<std::int64_t>(c - job.buffer_target + 1);
    }
    resume_cost_ += step * static_cast<std::int64_t>(job.total_chunks - job.buffer_target);
    job.state = TtsState::resumed;
    return times;
}

SimTime TtsSimulator::start_playback(TtsJobId id, SimTime now) {
    TtsJob& job = get(id);
    switch (job.state) {
        case TtsState::buffered:
            resume(id, now);
            return now;
        case TtsState::synthesizing:
            job.resume_pending = true;
            return std::max(now, job.first_chunk_ready_at);
        case TtsState::resumed:
            throw TtsError("TTS job " + std::to_string(id) + " is already playing");
        case TtsState::canceled:
            throw TtsError("cannot play canceled TTS job " + std::to_string(id));
    }
    throw std::logic_error("unreachable TTS state");
}

void TtsSimulator::cancel(TtsJobId id) {
    TtsJob& job = get(id);
    if (job.state == TtsState::synthesizing) {
        job.chunks_ready = 0;
    }
    job.state = TtsState::canceled;
    job.resume_pending = false;
}

const TtsJob& TtsSimulator::job(TtsJobId id) const {
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        throw TtsError("unknown TTS job " + std::to_string(id));
    }
    return it->second;
}

TtsJob& TtsSimulator::get(TtsJobId id) {
    return const_cast<TtsJob&>(std::as_const(*this).job(id));
}

}  // namespace predgen
