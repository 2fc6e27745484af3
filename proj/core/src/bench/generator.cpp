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

#include "sde/bench/generator.hpp"

#include <algorithm>
#include <cmath>

#include "sde/hash.hpp"

namespace sde::bench {

namespace {

double rate_of(const GeneratorConfig& config, std::size_t stream) {
    if (config.rate_skew <= 0) return config.level1_rate_hz;
    // zipf-like weights normalized to keep the mean rate at level1_rate_hz
    double weight = std::pow(static_cast<double>(stream + 1), -config.rate_skew);
    double total = 0;
    for (std::size_t i = 0; i < config.n_streams; ++i) {
        total += std::pow(static_cast<double>(i + 1), -config.rate_skew);
    }
    return config.level1_rate_hz * static_cast<double>(config.n_streams) * weight / total;
}

double gaussian(SplitMix& rng) {
    double u1 = std::max(rng.next_unit(), 1e-12);
    double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t poisson(SplitMix& rng, double lambda) {
    if (lambda <= 0) return 0;
    if (lambda > 64) {  // normal approximation for large intensities
        double v = lambda + std::sqrt(lambda) * gaussian(rng);
        return v < 0 ? 0 : static_cast<std::uint64_t>(v + 0.5);
    }
    double limit = std::exp(-lambda);
    double product = rng.next_unit();
    std::uint64_t n = 0;
    while (product > limit) {
        product *= rng.next_unit();
        ++n;
    }
    return n;
}

}  // namespace

std::vector<std::size_t> expected_trades_per_stream(const GeneratorConfig& config) {
    std::vector<std::size_t> counts(config.n_streams, 0);
    for (std::size_t i = 0; i < config.n_streams; ++i) {
        double interval_ms = 1000.0 / rate_of(config, i);
        counts[i] = static_cast<std::size_t>(
            std::floor(static_cast<double>(config.duration_ms) / interval_ms));
    }
    return counts;
}

std::vector<StreamRecord> generate(const GeneratorConfig& config) {
    struct TradePlan {
        std::int64_t at_ms;
        std::size_t stream;
        std::size_t index;  // trade sequence number within the stream
    };

    std::vector<TradePlan> plan;
    for (std::size_t i = 0; i < config.n_streams; ++i) {
        double interval_ms = 1000.0 / rate_of(config, i);
        std::size_t trades = static_cast<std::size_t>(
            std::floor(static_cast<double>(config.duration_ms) / interval_ms));
        for (std::size_t k = 0; k < trades; ++k) {
            std::int64_t at = config.start_ms +
                              static_cast<std::int64_t>(interval_ms * static_cast<double>(k + 1));
            plan.push_back({at, i, k});
        }
    }
    std::stable_sort(plan.begin(), plan.end(), [](const TradePlan& a, const TradePlan& b) {
        return a.at_ms != b.at_ms ? a.at_ms < b.at_ms : a.stream < b.stream;
    });

    // shared market-activity walk, stepped per trade index
    std::size_t max_index = 0;
    for (const auto& t : plan) max_index = std::max(max_index, t.index + 1);
    std::vector<double> market(max_index, 0.0);
    {
        SplitMix walk(derive_seed(config.seed, 1));
        double level = 0;
        for (std::size_t k = 0; k < max_index; ++k) {
            level += config.market_factor_sd * gaussian(walk);
            market[k] = level;
        }
    }

    std::vector<double> price(config.n_streams, config.price_start);
    std::vector<StreamRecord> records;
    records.reserve(plan.size() * (1 + static_cast<std::size_t>(config.bids_per_trade)));

    for (const auto& trade : plan) {
        const std::string stream = stream_name(trade.stream);
        SplitMix rng(derive_seed(config.seed,
                                 0x10000 + trade.stream * 0x100000ULL + trade.index));

        // price/volume walk
        price[trade.stream] *= std::exp(config.price_step_sd * gaussian(rng));
        double volume = config.volume_mean * std::exp(0.5 * gaussian(rng));

        // bid intensity from the shared factor; groups share a loading
        std::size_t groups = std::max<std::size_t>(1, config.factor_groups);
        double loading = static_cast<double>(trade.stream % groups) /
                         static_cast<double>(groups);
        double base = config.bids_per_trade * std::pow(2.2, static_cast<double>(trade.stream % groups));
        double log_intensity = loading * market[trade.index] +
                               config.idio_noise_sd * gaussian(rng);
        std::uint64_t bids = poisson(rng, base * std::exp(log_intensity));

        for (std::uint64_t b = 0; b < bids; ++b) {
            StreamRecord bid;
            bid.dataset_id = config.dataset;
            bid.stream_id = stream;
            bid.event_time_ms = trade.at_ms;
            double ask = price[trade.stream] * (1.0 + 0.001 * rng.next_unit());
            double bid_px = price[trade.stream] * (1.0 - 0.001 * rng.next_unit());
            bid.values = {std::string("2"), ask, volume * rng.next_unit(), bid_px,
                          volume * rng.next_unit()};
            records.push_back(std::move(bid));
        }

        StreamRecord rec;
        rec.dataset_id = config.dataset;
        rec.stream_id = stream;
        rec.event_time_ms = trade.at_ms;
        rec.values = {std::string("1"), price[trade.stream], volume};
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace sde::bench
