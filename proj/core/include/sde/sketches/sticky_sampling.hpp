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

#include <unordered_map>

#include "sde/synopsis.hpp"

namespace sde {

// Sticky sampling with t = (1/epsilon) * ln(1 / (support * delta)): the first
// 2t items are sampled at rate 1, the next 2t at 1/2, then doubling segment
// lengths. On each rate change every tracked count is diminished by a run of
// coin tosses. Counts undercount by at most epsilon * N with probability
// 1 - delta; frequent items with support s are reported at
// count >= (s - epsilon) * N. All coins come from the synopsis seeds.
class StickySampling final : public Synopsis {
public:
    StickySampling(const std::map<std::string, double>& params,
                   const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    void add_item(const std::string& item);
    double count_of(const std::string& item) const;
    std::vector<ItemCount> frequent_items(double support) const;
    std::uint64_t sampling_rate() const noexcept { return rate_; }

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    void advance_rate();

    double support_ = 0;
    double epsilon_ = 0;
    double t_ = 0;
    std::uint64_t rate_ = 1;            // current sampling denominator
    std::uint64_t segment_end_ = 0;     // stream position at which rate doubles
    std::uint64_t stream_len_ = 0;
    SplitMix rng_;
    std::unordered_map<std::string, std::uint64_t> table_;
};

}  // namespace sde
