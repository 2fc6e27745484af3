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

#include "sde/channel.hpp"

#include <algorithm>
#include <chrono>

namespace sde {

std::optional<std::string> Topic::Sub::pop(std::int64_t timeout_ms) {
    std::unique_lock lock(topic_->mutex_);
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (queue_.empty()) {
        if (topic_->closed_ || !active_) return std::nullopt;
        if (topic_->data_cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
            queue_.empty()) {
            return std::nullopt;
        }
    }
    std::string line = std::move(queue_.front());
    queue_.pop_front();
    topic_->space_cv_.notify_all();
    return line;
}

std::optional<std::string> Topic::Sub::try_pop() {
    std::unique_lock lock(topic_->mutex_);
    if (queue_.empty()) return std::nullopt;
    std::string line = std::move(queue_.front());
    queue_.pop_front();
    topic_->space_cv_.notify_all();
    return line;
}

bool Topic::Sub::closed_and_drained() const {
    std::unique_lock lock(topic_->mutex_);
    return topic_->closed_ && queue_.empty();
}

bool Topic::publish_locked(std::unique_lock<std::mutex>& lock, std::string line, bool blocking) {
    if (closed_) return false;
    if (capacity_ > 0) {
        auto full = [&] {
            return std::any_of(subs_.begin(), subs_.end(), [&](const auto& s) {
                return s->active_ && s->queue_.size() >= capacity_;
            });
        };
        if (blocking) {
            space_cv_.wait(lock, [&] { return closed_ || !full(); });
            if (closed_) return false;
        } else if (full()) {
            return false;
        }
    }
    ++published_;
    published_bytes_ += line.size() + 1;  // counted as written: line + newline
    for (auto& s : subs_) {
        if (s->active_) s->queue_.push_back(line);
    }
    data_cv_.notify_all();
    return true;
}

void Topic::publish(std::string line) {
    std::unique_lock lock(mutex_);
    publish_locked(lock, std::move(line), /*blocking=*/true);
}

bool Topic::try_publish(std::string line) {
    std::unique_lock lock(mutex_);
    return publish_locked(lock, std::move(line), /*blocking=*/false);
}

std::shared_ptr<Topic::Sub> Topic::subscribe() {
    std::unique_lock lock(mutex_);
    auto sub = std::shared_ptr<Sub>(new Sub(this));
    subs_.push_back(sub);
    return sub;
}

void Topic::unsubscribe(const std::shared_ptr<Sub>& sub) {
    std::unique_lock lock(mutex_);
    sub->active_ = false;
    subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
    space_cv_.notify_all();
}

void Topic::close() {
    std::unique_lock lock(mutex_);
    closed_ = true;
    data_cv_.notify_all();
    space_cv_.notify_all();
}

bool Topic::closed() const {
    std::unique_lock lock(mutex_);
    return closed_;
}

std::uint64_t Topic::published() const {
    std::unique_lock lock(mutex_);
    return published_;
}

std::uint64_t Topic::published_bytes() const {
    std::unique_lock lock(mutex_);
    return published_bytes_;
}

}  // namespace sde
