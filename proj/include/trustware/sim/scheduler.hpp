// Copyright 2026 The Trustware Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <queue>
#include <vector>

#include "trustware/clock.hpp"

namespace trustware::sim {

/// Ordering of events that fall on the same second.
enum class Phase : int {
  SessionOpen = 0,
  Advertise = 1,
  Adversary = 2,
  Delivery = 3,
  Deadline = 4,
};

/// Discrete-event driver and sole owner of virtual time. Events at equal
/// (time, phase) run in scheduling order. In real-time mode it sleeps until
/// each event's wall-clock second before running it.
class Scheduler {
 public:
  Scheduler(VirtualClock& clock, bool real_time = false) : clock_(clock), real_time_(real_time) {}

  /// Thread-safe.
  void at(UnixSeconds t, Phase phase, std::function<void()> action);
  void after(std::int64_t delay_s, Phase phase, std::function<void()> action);

  /// Runs events with time <= `end`. Returns the number run.
  std::size_t run_until(UnixSeconds end);

  UnixSeconds now() const { return clock_.now(); }
  std::size_t pending() const;

 private:
  struct Event {
    UnixSeconds t;
    int phase;
    std::uint64_t seq;
    std::function<void()> action;
    bool operator>(const Event& o) const {
      if (t != o.t) return t > o.t;
      if (phase != o.phase) return phase > o.phase;
      return seq > o.seq;
    }
  };

  VirtualClock& clock_;
  bool real_time_;
  mutable std::mutex mutex_;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
};

}  // namespace trustware::sim
