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

#include <complex>
#include <map>

#include "sde/synopsis.hpp"

namespace sde {

// Sliding-window DFT correlation synopsis. Per stream it keeps the last n
// values, incrementally maintained unitary DFT coefficients F = 1..c of the
// raw window, and running sum / sum of squares; the normalized-series
// coefficients follow by linearity. Correlation against another stream is
// 1 - d_c^2 / 2 over the reduced coefficients, and every stream is hashed
// into the epsilon-grid (epsilon = sqrt(1 - threshold)) so that only same or
// adjacent buckets can host pairs with Corr >= threshold.
//
// Merge takes the union of per-stream states (streams live on exactly one
// shard / site); cross-site federation ships coefficient summaries instead
// of raw windows.
class DftCorrelator final : public Synopsis {
public:
    DftCorrelator(const std::map<std::string, double>& params,
                  const std::vector<std::uint64_t>& seeds);

    std::unique_ptr<Synopsis> clone() const override;
    std::vector<std::uint8_t> serialize_summary() const override;

    void add_value(const std::string& stream, double value);

    // Normalized coefficients F = 1..c of a full window; nullopt when the
    // window is unfilled or degenerate.
    std::optional<std::vector<std::complex<double>>> coefficients(const std::string& stream) const;
    std::optional<std::string> bucket_of(const std::string& stream) const;
    std::optional<double> correlation(const std::string& a, const std::string& b) const;

    double threshold() const noexcept { return threshold_; }
    double grid_epsilon() const noexcept { return epsilon_; }
    std::int64_t window_length() const noexcept { return window_; }
    std::size_t stream_count() const noexcept { return streams_.size(); }
    std::vector<std::string> stream_ids() const;

    // Streams whose buckets are same/adjacent to the given stream's bucket.
    std::vector<std::string> candidate_streams(const std::string& stream) const;

protected:
    void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) override;
    EstimateValue do_estimate(const Query& query) const override;
    void do_merge(const Synopsis& other) override;
    void write_payload(FrameWriter& w) const override;
    void read_payload(FrameReader& r) override;

private:
    struct StreamState {
        std::vector<double> buffer;   // ring buffer of the last n values
        std::size_t next = 0;         // ring write position
        std::uint64_t pushes = 0;
        double sum = 0;
        double sum_sq = 0;
        std::vector<std::complex<double>> raw;  // unitary DFT, F = 1..c
        std::uint32_t refresh_in = 0;           // slides until recompute
        bool summary_only = false;              // federated import: coeffs only
        std::vector<std::complex<double>> summary;

        bool full(std::int64_t n) const noexcept {
            return summary_only || pushes >= static_cast<std::uint64_t>(n);
        }
    };

    void push(StreamState& s, double value);
    void recompute(StreamState& s) const;
    std::optional<std::vector<std::complex<double>>> normalized(const StreamState& s) const;
    std::vector<PairScore> correlated_pairs(double threshold) const;

    double threshold_ = 0;
    double epsilon_ = 0;
    std::size_t coeff_count_ = 0;
    std::size_t grid_coeffs_ = 0;
    std::int64_t window_ = 0;
    std::map<std::string, StreamState> streams_;
};

}  // namespace sde
