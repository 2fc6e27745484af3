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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sde/bench/generator.hpp"
#include "sde/bench/kmeans.hpp"

namespace sde::bench {

// The study workflow: Source -> Split (L1/L2) -> Filter -> Count(bids) ->
// Join-on-trade -> Window -> pairwise correlation -> ApplyThreshold. The
// synopsis strategies replace Window + correlation with the DFT grid served
// by a running engine: stream buckets prune the candidate pairs, and exact
// checks inside same/adjacent buckets keep the emitted set equal to brute
// force.
enum class Strategy { Naive, ParallelOnly, SynopsisOnly, SynopsisPlusParallel };

const char* strategy_name(Strategy strategy) noexcept;
Strategy strategy_from_name(const std::string& name);

struct WorkflowConfig {
    std::size_t n_streams = 50;
    std::uint32_t workers = 4;
    double threshold = 0.9;
    std::size_t window = 64;
    std::size_t coefficients = 8;
    std::size_t grid_coefficients = 2;
    double min_bid_volume = 0.0;  // Filter stage
    std::size_t sweeps = 12;      // correlation evaluations over the run
    std::size_t ticks = 0;        // trades per stream (0 -> window + 4 * sweeps)
    std::uint64_t seed = 1;
};

struct StrategyResult {
    Strategy strategy = Strategy::Naive;
    std::uint64_t tuples = 0;  // workflow records processed (L1 + L2)
    double wall_seconds = 0;
    double throughput = 0;  // tuples per second
    std::uint64_t pairs_compared = 0;  // exact similarity checks performed
    std::uint64_t sweeps = 0;
    std::set<std::pair<std::string, std::string>> emitted;  // pairs above threshold
};

StrategyResult run_workflow(Strategy strategy, const WorkflowConfig& config);

// Stream-mining variant: the aggregation is replaced by a coreset synopsis
// and clustering runs on the coreset; the reference clustering is weighted
// k-means. Costs are evaluated on the full point set.
struct ClusteringConfig {
    std::size_t n_streams = 50;
    std::uint32_t workers = 4;
    std::size_t k = 4;
    std::size_t bucket_size = 10;
    std::size_t dimension = 8;
    std::size_t sweeps = 6;
    std::size_t ticks = 0;  // trades per stream (0 -> dimension + 4 * sweeps)
    std::uint64_t seed = 1;
};

struct ClusteringResult {
    Strategy strategy = Strategy::Naive;
    std::uint64_t tuples = 0;
    double wall_seconds = 0;
    double throughput = 0;
    double solution_cost = 0;  // final centers scored on the full point set
    std::size_t coreset_size = 0;
    std::size_t full_points = 0;
    std::vector<std::vector<double>> centers;
};

ClusteringResult run_clustering_workflow(Strategy strategy, const ClusteringConfig& config);

}  // namespace sde::bench
