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

// Flajolet-Martin distinct-count sketch. Each bitmap records the geometric
// hash positions of the items routed to it; the single-bitmap estimate is
// 2^R / phi with R the lowest unset bit position and phi = 0.77. When
// epsilon/delta are given, that many independent bitmaps are kept and
// combined by stochastic averaging: E = (maps / phi) * 2^(mean R).
// Merge is a bitwise OR per bitmap.
class FMSketch final : public Synopsis {
public:
    FMSketch(const std::map<std::string, double>& params,
             const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    std::size_t bitmap_bits() const noexcept { return bitmap_bits_; }
    std::size_t bitmap_count() const noexcept { return bitmaps_.size(); }

    void add_key(std::uint64_t key);
    double estimate_distinct() const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::size_t bitmap_bits_ = 0;
    std::uint64_t route_seed_ = 0;
    std::uint64_t position_seed_ = 0;
    std::vector<std::uint64_t> bitmaps_;  // one word per bitmap, bitmap_bits_ <= 64
};

}  // namespace sde
