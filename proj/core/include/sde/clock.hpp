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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

namespace sde {

// Wall-clock abstraction so federation periods and timeouts run on a
// simulated clock in tests and benchmarks.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() const override;
};

// Manually advanced clock. advance() runs due wakeup callbacks on the
// advancing thread.
class SimClock final : public Clock {
public:
    explicit SimClock(std::int64_t start_ms = 0) : now_(start_ms) {}

    std::int64_t now_ms() const override { return now_.load(std::memory_order_relaxed); }

    void advance(std::int64_t delta_ms);
    void advance_to(std::int64_t t_ms);

    // Wakeup fires whenever the clock reaches `at_ms` (once).
    void schedule(std::int64_t at_ms, std::function<void()> fn);

private:
    std::atomic<std::int64_t> now_;
    std::mutex mutex_;
    std::multimap<std::int64_t, std::function<void()>> wakeups_;
};

}  // namespace sde
