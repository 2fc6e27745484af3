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

// AMS sketch of a frequency vector v: a d x w array whose every entry is the
// full projection sum_k v[k] * xi[k] under its own four-wise independent
// +/-1 family (degree-3 polynomial hashing over the Mersenne prime 2^61-1).
// Inner products and L2^2 are estimated as the median over the d rows of the
// mean over the w per-entry products. Sized w = ceil(8 / epsilon^2) and
// d = ceil(ln(1 / delta)) rounded up to odd, so a row mean deviates by more
// than epsilon * F2 with probability < 2.3% and the median misses on well
// under a delta fraction of queries. Merging adds entries element-wise.
class AMSSketch final : public Synopsis {
public:
    AMSSketch(const std::map<std::string, double>& params,
              const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;

    std::size_t width() const noexcept { return width_; }
    std::size_t depth() const noexcept { return depth_; }

    void add_key(std::uint64_t key, std::int64_t weight = 1);
    double self_join() const;

    // Inner product estimate of two mergeable sketches.
    static double inner_product(const AMSSketch& a, const AMSSketch& b);

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    std::size_t width_ = 0;
    std::size_t depth_ = 0;
    std::uint64_t xi_seed_ = 0;
    std::vector<std::int64_t> cells_;  // depth_ * width_
};

}  // namespace sde
