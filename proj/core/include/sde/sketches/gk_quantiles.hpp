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

// Greenwald-Khanna quantile summary: a sorted tuple list (value, g, delta)
// maintaining max(g + delta) <= 2 * epsilon * N, so any rank query is
// answered within epsilon * N of the true rank. Merging interleaves two
// summaries, charging each side the other's floor(2 * eps * n) uncertainty;
// the merged summary is epsilon-approximate for epsilon = max of the inputs.
class GKQuantiles final : public Synopsis {
public:
    GKQuantiles(const std::map<std::string, double>& params,
                const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    void add_value(double v);
    // Value whose rank is within epsilon * N of ceil(phi * N); 0 on empty.
    double quantile(double phi) const;
    std::size_t tuple_count() const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    struct Tuple {
        double value = 0;
        std::int64_t g = 0;
        std::int64_t delta = 0;
    };

    void flush_head() const;
    void compress(double threshold) const;

    double epsilon_ = 0;
    std::size_t head_capacity_ = 0;
    // Buffered inserts are folded in lazily; logically const for queries.
    mutable std::vector<double> head_;
    mutable std::vector<Tuple> tuples_;
    mutable std::uint64_t count_ = 0;
};

}  // namespace sde
