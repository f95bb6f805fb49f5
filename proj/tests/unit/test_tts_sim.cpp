// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>
#include <vector>

#include "predgen/tts_sim.hpp"

using namespace predgen;

namespace {

const std::string kLong(100, 'a');  // 25 chunks of 4 characters

}  // namespace

TEST_CASE("buffer chunks follow the latency model") {
    SimClock clock(at_ms(1000));
    std::vector<std::pair<std::size_t, SimTime>> ready;
    TtsSimulator tts(clock, {}, [&](const TtsJob&, std::size_t c) { ready.emplace_back(c, clock.now()); });
    const TtsJobId id = tts.synthesize_buffer(kLong);
    const TtsJob& job = tts.job(id);
    CHECK(job.total_chunks == 25);
    CHECK(job.buffer_target == 17);
    CHECK(job.state == TtsState::synthesizing);
    CHECK(job.first_chunk_ready_at == at_ms(1200));
    clock.run_all();
    REQUIRE(ready.size() == 17);
    CHECK(ready.front().second == at_ms(1200));
    CHECK(ready.back().second == at_ms(1200 + 16 * 80));
    for (std::size_t i = 1; i < ready.size(); ++i) {
        CHECK(ready[i].second > ready[i - 1].second);
    }
    CHECK(tts.job(id).state == TtsState::buffered);
    CHECK(tts.job(id).chunks_ready == 17);
    CHECK(tts.job(id).saved_state.has_value());
    CHECK(tts.buffer_synthesis_cost() == from_ms(200 + 16 * 80));
}

TEST_CASE("short text buffers fewer chunks") {
    SimClock clock;
    TtsSimulator tts(clock);
    const TtsJobId id = tts.synthesize_buffer("Hi.");
    CHECK(tts.job(id).total_chunks == 1);
    CHECK(tts.job(id).buffer_target == 1);
    clock.run_all();
    CHECK(clock.now() == at_ms(200));
    CHECK(tts.job(id).state == TtsState::buffered);
}

TEST_CASE("buffer target of one") {
    SimClock clock;
    TtsLatencyModel m;
    m.buffer_target = 1;
    TtsSimulator tts(clock, m);
    const TtsJobId id = tts.synthesize_buffer(kLong);
    clock.run_all();
    CHECK(clock.now() == at_ms(200));
    CHECK(tts.job(id).chunks_ready == 1);
}

TEST_CASE("resume plays the buffer at once and streams the rest") {
    SimClock clock;
    TtsSimulator tts(clock);
    const TtsJobId id = tts.synthesize_buffer(kLong);
    clock.run_all();
    const SimTime at = at_ms(5000);
    const auto times = tts.resume(id, at);
    REQUIRE(times.size() == 25);
    CHECK(times.front() == at);
    for (std::size_t c = 0; c < 17; ++c) {
        CHECK(times[c] == at);
    }
    CHECK(times[17] == at + from_ms(80));
    CHECK(times[24] == at + from_ms(8 * 80));
    CHECK(tts.job(id).state == TtsState::resumed);
    // Playback of chunk c starts at at + c * chunk_audio_ms; never before it is ready.
    for (std::size_t c = 0; c < times.size(); ++c) {
        CHECK(times[c] <= at + from_ms(80) * static_cast<std::int64_t>(c));
    }
    CHECK_THROWS_AS(tts.resume(id, at), TtsError);
}

TEST_CASE("no underrun whenever synthesis keeps up with playback") {
    for (double per : {10.0, 40.0, 80.0}) {
        SimClock clock;
        TtsLatencyModel m;
        m.per_chunk_ms = per;
        m.buffer_target = 3;
        TtsSimulator tts(clock, m);
        const TtsJobId id = tts.synthesize_buffer(kLong);
        clock.run_all();
        const auto times = tts.resume(id, clock.now());
        for (std::size_t c = 0; c < times.size(); ++c) {
            CHECK(times[c] <= clock.now() + from_ms(m.chunk_audio_ms) * static_cast<std::int64_t>(c));
        }
    }
}

TEST_CASE("resume requires a buffered job") {
    SimClock clock;
    TtsSimulator tts(clock);
    const TtsJobId id = tts.synthesize_buffer(kLong);
    CHECK_THROWS_AS(tts.resume(id, clock.now()), TtsError);
    tts.cancel(id);
    clock.run_all();
    CHECK_THROWS_AS(tts.resume(id, clock.now()), TtsError);
    CHECK_THROWS_AS(tts.job(999), TtsError);
}

TEST_CASE("cancel semantics") {
    SimClock clock;
    int ready = 0;
    TtsSimulator tts(clock, {}, [&](const TtsJob&, std::size_t) { ++ready; });

    SUBCASE("before the first chunk nothing is ever ready") {
        const TtsJobId id = tts.synthesize_buffer(kLong);
        tts.cancel(id);
        tts.cancel(id);
        clock.run_all();
        CHECK(ready == 0);
        CHECK(tts.job(id).chunks_ready == 0);
        CHECK(tts.job(id).state == TtsState::canceled);
    }
    SUBCASE("mid-synthesis partial chunks are discarded") {
        const TtsJobId id = tts.synthesize_buffer(kLong);
        clock.advance_to(at_ms(400));
        CHECK(tts.job(id).chunks_ready == 3);
        tts.cancel(id);
        clock.run_all();
        CHECK(tts.job(id).chunks_ready == 0);
        CHECK(ready == 3);
        CHECK(tts.buffer_synthesis_cost() == from_ms(200 + 2 * 80));
    }
    SUBCASE("a new job after cancel is independent") {
        const TtsJobId a = tts.synthesize_buffer("first one.");
        clock.run_all();
        tts.cancel(a);
        const TtsJobId b = tts.synthesize_buffer("second.");
        CHECK(b != a);
        clock.run_all();
        CHECK(tts.job(b).state == TtsState::buffered);
        CHECK(tts.job(a).state == TtsState::canceled);
    }
}

TEST_CASE("playback on a job still synthesizing waits for its first chunk") {
    SimClock clock;
    TtsSimulator tts(clock);
    const TtsJobId id = tts.synthesize_buffer(kLong);
    clock.advance_to(at_ms(50));
    CHECK(tts.start_playback(id, clock.now()) == at_ms(200));
    clock.run_all();
    CHECK(tts.job(id).state == TtsState::resumed);

    const TtsJobId late = tts.synthesize_buffer("x.");
    clock.advance_to(clock.now() + from_ms(300));
    CHECK(tts.job(late).state == TtsState::buffered);
    CHECK(tts.start_playback(late, clock.now()) == clock.now());
}

TEST_CASE("synthesis cost does not depend on resume") {
    SimClock c1, c2;
    TtsSimulator played(c1), idle(c2);
    const auto a = played.synthesize_buffer(kLong);
    idle.synthesize_buffer(kLong);
    c1.run_all();
    c2.run_all();
    played.resume(a, c1.now());
    CHECK(played.buffer_synthesis_cost() == idle.buffer_synthesis_cost());
    CHECK(played.resume_synthesis_cost() == from_ms(8 * 80));
}

TEST_CASE("invalid TTS input") {
    SimClock clock;
    TtsSimulator tts(clock);
    CHECK_THROWS_AS(tts.synthesize_buffer(""), std::invalid_argument);
    TtsLatencyModel bad;
    bad.first_chunk_ms = -1;
    CHECK_THROWS_AS(TtsSimulator(clock, bad), std::invalid_argument);
    bad = {};
    bad.buffer_target = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(to_string(TtsState::resumed) == "resumed");
}
