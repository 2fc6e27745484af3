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

#include <deque>

#include "sde/synopsis.hpp"

namespace sde {

// Chain sampling over a count-based sliding window of the last W tuples:
// k independent slots each hold a uniform sample of the window. A slot
// replaces its chain with item t with probability 1/min(t, W); each chained
// element pre-selects its replacement index uniformly in (i, i + W] so that
// expiry promotes an already-buffered successor. Samples are uniform over
// the active window at every point.
class ChainSampler final : public Synopsis {
public:
    ChainSampler(const std::map<std::string, double>& params,
                 const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    void add_scalar(const Scalar& value);
    std::vector<Scalar> sample() const;
    std::int64_t window_length() const noexcept { return window_; }

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    struct Link {
        std::uint64_t index = 0;
        Scalar value;
    };
    struct Slot {
        std::deque<Link> chain;       // head = current sample candidate
        std::uint64_t successor = 0;  // index that extends the chain next
    };

    void expire(Slot& slot) const;

    std::int64_t window_ = 0;
    std::uint64_t position_ = 0;  // 1-based stream index
    SplitMix rng_;
    std::vector<Slot> slots_;
};

}  // namespace sde
