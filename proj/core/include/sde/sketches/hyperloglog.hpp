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

// HyperLogLog over a 64-bit hash: 2^m registers of max leading-zero ranks,
// harmonic-mean estimator with the linear-counting small-range correction
// and the (borderline unreachable) 64-bit large-range correction. Relative
// standard error ~ 1/sqrt(2^m) with this register budget. Parameter: m, or
// rse from which m = ceil(log2(1/rse^2)). Merge takes the element-wise
// register maximum.
class HyperLogLog final : public Synopsis {
public:
    HyperLogLog(const std::map<std::string, double>& params,
                const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    std::size_t register_count() const noexcept { return registers_.size(); }
    const std::vector<std::uint8_t>& registers() const noexcept { return registers_; }

    void add_key(std::uint64_t key);
    double estimate_distinct() const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::size_t index_bits_ = 0;
    std::uint64_t hash_seed_ = 0;
    std::vector<std::uint8_t> registers_;
};

}  // namespace sde
