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

// Lossy counting over buckets of width ceil(1 / epsilon): tracked counts
// undercount the truth by at most epsilon * N, and a frequent-items query
// with support s returns every item of true frequency >= s * N (reported
// when count >= (s - epsilon) * N, so no false negatives). Merge sums
// counts and error terms, then re-prunes at the combined epsilon * N.
class LossyCounting final : public Synopsis {
public:
    LossyCounting(const std::map<std::string, double>& params,
                  const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    void add_item(const std::string& item);
    double count_of(const std::string& item) const;
    std::vector<ItemCount> frequent_items(double support) const;
    std::size_t table_size() const noexcept { return table_.size(); }

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    struct Entry {
        std::uint64_t count = 0;
        std::uint64_t delta = 0;  // maximal undercount at insertion time
    };

    void prune(std::uint64_t threshold);

    double epsilon_ = 0;
    std::uint64_t bucket_width_ = 0;
    std::uint64_t stream_len_ = 0;
    std::unordered_map<std::string, Entry> table_;
};

}  // namespace sde
