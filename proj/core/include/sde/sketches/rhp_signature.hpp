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

#include <map>

#include "sde/synopsis.hpp"

namespace sde {

// Random hyperplane projection signatures over a count sliding window:
// bit i = sign(window . h_i) for b seed-derived Gaussian hyperplanes.
// hamming(sig_a, sig_b) / b estimates the angle, cos of it the similarity;
// the bucket id is the signature prefix selecting one of the configured
// power-of-two buckets. Merge unions the per-stream states.
class RhpSignature final : public Synopsis {
public:
    RhpSignature(const std::map<std::string, double>& params,
                 const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;
    std::vector<std::uint8_t> serialize_summary() const override;

    void add_value(const std::string& stream, double value);

    std::optional<std::vector<std::uint64_t>> signature(const std::string& stream) const;
    std::optional<double> similarity(const std::string& a, const std::string& b) const;

    std::size_t bits() const noexcept { return bits_; }

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    struct StreamState {
        std::vector<double> buffer;
        std::size_t next = 0;
        std::uint64_t pushes = 0;
        bool summary_only = false;
        std::vector<std::uint64_t> summary_signature;
    };

    std::optional<std::vector<std::uint64_t>> signature_of(const StreamState& s) const;

    std::size_t bits_ = 0;
    std::size_t prefix_bits_ = 0;
    std::int64_t window_ = 0;
    std::uint64_t plane_seed_ = 0;
    std::map<std::string, StreamState> streams_;
};

}  // namespace sde
