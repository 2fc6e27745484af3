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

// Streaming coreset via merge-and-reduce: bucket i holds a coreset of
// 2^i * bucketSize points; a full staging bucket cascades upward, reducing
// each collision of two coresets back to bucketSize points with a coreset
// tree (D^2 sampling: leaves split under cost-proportional descent, new
// representatives drawn with probability proportional to weighted squared
// distance). The estimate is the union of all buckets reduced to at most
// bucketSize weighted points.
class CoreSetTree final : public Synopsis {
public:
    CoreSetTree(const std::map<std::string, double>& params,
                const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    void add_point(std::vector<double> coords, double weight = 1.0);
    std::vector<WeightedPoint> coreset() const;

    std::size_t bucket_size() const noexcept { return bucket_size_; }
    std::size_t dimension() const noexcept { return dimension_; }

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::vector<WeightedPoint> reduce(std::vector<WeightedPoint> points, SplitMix& rng) const;
    void carry_up(std::vector<WeightedPoint> coreset, std::size_t level);

    std::size_t bucket_size_ = 0;
    std::size_t dimension_ = 0;
    std::vector<WeightedPoint> staging_;
    std::vector<std::vector<WeightedPoint>> buckets_;  // empty vector = free slot
    SplitMix rng_;
};

}  // namespace sde
