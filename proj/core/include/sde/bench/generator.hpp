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

#include <cstdint>
#include <string>
#include <vector>

#include "sde/record.hpp"

namespace sde::bench {

// Synthetic Level 1 / Level 2 financial feed. Level 1 records are trades
// <level, price, volume>; each trade is preceded by the Level 2 bid activity
// <level, ask price, ask volume, bid price, bid volume> that accumulated
// until it. Bid intensity follows a market-wide random walk with per-stream
// factor loadings, so groups of streams produce correlated bid-count series.
// Fully deterministic in the seed; stream ids are stable across runs.
struct GeneratorConfig {
    std::size_t n_streams = 50;
    double level1_rate_hz = 1.0;     // mean trades per stream per second
    double rate_skew = 0.0;          // 0 = uniform rates; >0 = zipf-like skew
    double price_start = 100.0;
    double price_step_sd = 0.01;     // lognormal random-walk step
    double volume_mean = 100.0;
    double bids_per_trade = 4.0;     // base Level 2 intensity
    double market_factor_sd = 0.35;  // shared bid-intensity walk step
    double idio_noise_sd = 0.08;     // per-stream intensity noise
    std::size_t factor_groups = 4;   // streams i, i+groups, ... share a loading
    std::int64_t duration_ms = 60'000;
    std::int64_t start_ms = 1'600'000'000'000;
    std::uint64_t seed = 1;
    std::string dataset = "stocks";
};

inline std::string stream_name(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%04zu", index);
    return buf;
}

// All records of the configured span, ordered by event time (Level 2 bids
// directly before their trade).
std::vector<StreamRecord> generate(const GeneratorConfig& config);

// The trade count each stream produces under `config` (rate schedule only).
std::vector<std::size_t> expected_trades_per_stream(const GeneratorConfig& config);

}  // namespace sde::bench
