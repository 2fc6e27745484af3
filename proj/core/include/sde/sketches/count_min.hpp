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

#include "sde/synopsis.hpp"

namespace sde {

// Count-Min sketch: d x w counter matrix with w = ceil(e / epsilon) and
// d = ceil(ln(1 / delta)); one pairwise-independent row hash per row.
// Estimates are the minimum of the item's counters: never below the true
// count, above it by more than epsilon * N with probability < delta.
// Merging adds the matrices element-wise.
class CountMinSketch final : public Synopsis {
public:
    CountMinSketch(const std::map<std::string, double>& params,
                   const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    std::size_t width() const noexcept { return width_; }
    std::size_t depth() const noexcept { return depth_; }

    void add_key(std::uint64_t key, std::uint64_t weight = 1);
    std::uint64_t estimate_key(std::uint64_t key) const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::size_t width_ = 0;
    std::size_t depth_ = 0;
    std::vector<PairwiseHash> rows_;
    std::vector<std::uint64_t> counters_;  // depth_ * width_
};

}  // namespace sde
