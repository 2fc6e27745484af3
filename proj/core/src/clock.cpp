// Copyright 2026 The SDE Authors
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

#include "sde/clock.hpp"

#include <chrono>

namespace sde {

std::int64_t SystemClock::now_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void SimClock::advance(std::int64_t delta_ms) {
    advance_to(now_ms() + delta_ms);
}

void SimClock::advance_to(std::int64_t t_ms) {
    while (true) {
        std::function<void()> fn;
        {
            std::lock_guard lock(mutex_);
            auto it = wakeups_.begin();
            if (it == wakeups_.end() || it->first > t_ms) break;
            now_.store(it->first, std::memory_order_relaxed);
            fn = std::move(it->second);
            wakeups_.erase(it);
        }
        fn();
    }
    now_.store(t_ms, std::memory_order_relaxed);
}

void SimClock::schedule(std::int64_t at_ms, std::function<void()> fn) {
    std::lock_guard lock(mutex_);
    wakeups_.emplace(at_ms, std::move(fn));
}

}  // namespace sde
