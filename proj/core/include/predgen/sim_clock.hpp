// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace predgen {

/// Tag clock for virtual time. Time only moves through SimClock.
struct VirtualClock {
    using duration = std::chrono::microseconds;
    using rep = duration::rep;
    using period = duration::period;
    using time_point = std::chrono::time_point<VirtualClock, duration>;
    static constexpr bool is_steady = true;
};

using SimDuration = VirtualClock::duration;
using SimTime = VirtualClock::time_point;

/// Rounds to the nearest microsecond.
SimDuration from_ms(double ms);
double to_ms(SimDuration d);
inline double to_ms(SimTime t) { return to_ms(t.time_since_epoch()); }
inline SimTime at_ms(double ms) { return SimTime{from_ms(ms)}; }

class ClockError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Discrete-event clock. Events fire in timestamp order, ties in insertion
/// order; `now()` never decreases.
class SimClock {
public:
    using Callback = std::function<void()>;

    explicit SimClock(SimTime start = SimTime{}) : now_(start) {}

    SimTime now() const { return now_; }

    /// Advances by `cost`, firing every event due on the way.
    void charge(SimDuration cost);
    /// Advances to `t` (>= now), firing every event due on the way.
    void advance_to(SimTime t);
    /// Schedules `cb` at `at`; throws ClockError when `at` is in the past.
    std::uint64_t schedule(SimTime at, Callback cb);
    /// Fires events in order until `done()` holds or the queue is empty.
    bool advance_until(const std::function<bool()>& done);
    /// Fires every pending event.
    void run_all();

    std::size_t pending() const { return queue_.size(); }
    std::optional<SimTime> next_event_time() const;

private:
    struct Event {
        SimTime at;
        std::uint64_t seq;
        Callback cb;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };

    void fire_next();

    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace predgen
