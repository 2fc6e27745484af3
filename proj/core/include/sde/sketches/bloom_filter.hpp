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

// Bloom filter sized from (#elements, false-positive rate) with the optimal
// m = -n ln p / (ln 2)^2 bits and k = (m / n) ln 2 double-hashed probes.
// Membership has no false negatives; merge is a bitwise OR.
class BloomFilter final : public Synopsis {
public:
    BloomFilter(const std::map<std::string, double>& params,
                const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    std::size_t bit_count() const noexcept { return bits_; }
    std::size_t hash_count() const noexcept { return hashes_; }

    void add_key(std::uint64_t key);
    bool contains_key(std::uint64_t key) const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::size_t bits_ = 0;
    std::size_t hashes_ = 0;
    std::uint64_t seed_a_ = 0, seed_b_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace sde
