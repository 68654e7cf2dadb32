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

#include "trustware/sim/scheduler.hpp"

#include <chrono>
#include <thread>

namespace trustware::sim {

void Scheduler::at(UnixSeconds t, Phase phase, std::function<void()> action) {
  std::lock_guard lock(mutex_);
  queue_.push({t, static_cast<int>(phase), next_seq_++, std::move(action)});
}

void Scheduler::after(std::int64_t delay_s, Phase phase, std::function<void()> action) {
  at(clock_.now() + delay_s, phase, std::move(action));
}

std::size_t Scheduler::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::size_t Scheduler::run_until(UnixSeconds end) {
  std::size_t ran = 0;
  for (;;) {
    Event ev;
    {
      std::lock_guard lock(mutex_);
      if (queue_.empty() || queue_.top().t > end) break;
      ev = queue_.top();
      queue_.pop();
    }
    if (real_time_) {
      const auto wall = std::chrono::system_clock::from_time_t(static_cast<std::time_t>(ev.t));
      std::this_thread::sleep_until(wall);
    }
    if (ev.t > clock_.now()) clock_.set(ev.t);
    ev.action();
    ++ran;
  }
  return ran;
}

}  // namespace trustware::sim
