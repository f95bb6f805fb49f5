// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/sim_clock.hpp"

#include <cmath>
#include <string>

namespace predgen {

SimDuration from_ms(double ms) { return SimDuration{std::llround(ms * 1000.0)}; }

double to_ms(SimDuration d) { return static_cast<double>(d.count()) / 1000.0; }

void SimClock::charge(SimDuration cost) {
    if (cost < SimDuration::zero()) {
        throw ClockError("negative charge");
    }
    advance_to(now_ + cost);
}

void SimClock::advance_to(SimTime t) {
    if (t < now_) {
        throw ClockError("cannot move clock backwards from " + std::to_string(to_ms(now_)) +
                         " ms to " + std::to_string(to_ms(t)) + " ms");
    }
    while (!queue_.empty() && queue_.top().at <= t) {
        fire_next();
    }
    now_ = t;
}

std::uint64_t SimClock::schedule(SimTime at, Callback cb) {
    if (at < now_) {
        throw ClockError("event scheduled in the past at " + std::to_string(to_ms(at)) + " ms");
    }
    const auto seq = next_seq_++;
    queue_.push(Event{at, seq, std::move(cb)});
    return seq;
}

bool SimClock::advance_until(const std::function<bool()>& done) {
    while (!done()) {
        if (queue_.empty()) {
            return false;
        }
        fire_next();
    }
    return true;
}

void SimClock::run_all() {
    while (!queue_.empty()) {
        fire_next();
    }
}

std::optional<SimTime> SimClock::next_event_time() const {
    if (queue_.empty()) {
        return std::nullopt;
    }
    return queue_.top().at;
}

void SimClock::fire_next() {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    if (ev.cb) {
        ev.cb();
    }
}

}  // namespace predgen
