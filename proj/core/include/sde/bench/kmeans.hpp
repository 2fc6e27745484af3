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
#include <vector>

#include "sde/estimate.hpp"

namespace sde::bench {

struct KMeansResult {
    std::vector<std::vector<double>> centers;
    double cost = 0;  // weighted sum of squared distances
};

// Weighted Lloyd iterations seeded by weighted kmeans++ with a few restarts.
// Deterministic in `seed`. `parallel_threads` > 1 splits the assignment step.
KMeansResult weighted_kmeans(const std::vector<WeightedPoint>& points, std::size_t k,
                             std::uint64_t seed, std::size_t iterations = 25,
                             std::size_t restarts = 3, std::size_t parallel_threads = 1);

// Sum of squared distances of each point (weighted) to its nearest center.
double clustering_cost(const std::vector<WeightedPoint>& points,
                       const std::vector<std::vector<double>>& centers);

}  // namespace sde::bench
