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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sde {

// One of the four fixed engine channels (Data, Request, Output, Union): a
// newline-delimited message bus with broadcast subscriptions. A bounded
// topic blocks publishers while any subscriber queue is full, which is the
// engine's backpressure boundary; capacity 0 means unbounded.
class Topic {
public:
    class Sub {
    public:
        // Blocks up to timeout; nullopt on timeout or closed-and-drained.
        std::optional<std::string> pop(std::int64_t timeout_ms);
        std::optional<std::string> try_pop();
        bool closed_and_drained() const;

    private:
        friend class Topic;
        explicit Sub(Topic* topic) : topic_(topic) {}
        Topic* topic_;
        std::deque<std::string> queue_;
        bool active_ = true;
    };

    explicit Topic(std::string name, std::size_t capacity = 0)
        : name_(std::move(name)), capacity_(capacity) {}

    const std::string& name() const noexcept { return name_; }

    // Blocks while a bounded subscriber queue is full; drops when closed or
    // when nobody subscribes (nothing would consume the line).
    void publish(std::string line);
    bool try_publish(std::string line);  // false instead of blocking

    std::shared_ptr<Sub> subscribe();
    void unsubscribe(const std::shared_ptr<Sub>& sub);

    void close();
    bool closed() const;

    std::uint64_t published() const;
    std::uint64_t published_bytes() const;

private:
    bool publish_locked(std::unique_lock<std::mutex>& lock, std::string line, bool blocking);

    std::string name_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable data_cv_;   // consumers wait here
    std::condition_variable space_cv_;  // producers wait here
    std::vector<std::shared_ptr<Sub>> subs_;
    bool closed_ = false;
    std::uint64_t published_ = 0;
    std::uint64_t published_bytes_ = 0;
};

}  // namespace sde
