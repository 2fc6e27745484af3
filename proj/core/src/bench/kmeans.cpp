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

#include "sde/bench/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "sde/hash.hpp"

namespace sde::bench {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

std::size_t nearest(const std::vector<double>& p,
                    const std::vector<std::vector<double>>& centers, double* dist_out) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        double d = sq_dist(p, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

std::vector<std::vector<double>> kmeanspp_seed(const std::vector<WeightedPoint>& points,
                                               std::size_t k, SplitMix& rng) {
    std::vector<std::vector<double>> centers;
    double total_w = 0;
    for (const auto& p : points) total_w += p.weight;
    double pick = rng.next_unit() * total_w;
    std::size_t first = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
        pick -= points[i].weight;
        if (pick <= 0) {
            first = i;
            break;
        }
    }
    centers.push_back(points[first].coords);

    std::vector<double> d2(points.size());
    while (centers.size() < k) {
        double total = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d;
            nearest(points[i].coords, centers, &d);
            d2[i] = points[i].weight * d;
            total += d2[i];
        }
        if (total <= 0) break;  // fewer distinct points than k
        double draw = rng.next_unit() * total;
        std::size_t chosen = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            draw -= d2[i];
            if (draw <= 0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(points[chosen].coords);
    }
    return centers;
}

}  // namespace

double clustering_cost(const std::vector<WeightedPoint>& points,
                       const std::vector<std::vector<double>>& centers) {
    double cost = 0;
    for (const auto& p : points) {
        double d;
        nearest(p.coords, centers, &d);
        cost += p.weight * d;
    }
    return cost;
}

KMeansResult weighted_kmeans(const std::vector<WeightedPoint>& points, std::size_t k,
                             std::uint64_t seed, std::size_t iterations, std::size_t restarts,
                             std::size_t parallel_threads) {
    KMeansResult best;
    best.cost = std::numeric_limits<double>::max();
    if (points.empty() || k == 0) {
        best.cost = 0;
        return best;
    }
    const std::size_t dim = points[0].coords.size();

    for (std::size_t r = 0; r < restarts; ++r) {
        SplitMix rng(derive_seed(seed, r));
        auto centers = kmeanspp_seed(points, k, rng);

        std::vector<std::size_t> assignment(points.size(), 0);
        for (std::size_t iter = 0; iter < iterations; ++iter) {
            // assignment step, optionally split across threads
            auto assign_range = [&](std::size_t from, std::size_t to) {
                for (std::size_t i = from; i < to; ++i) {
                    assignment[i] = nearest(points[i].coords, centers, nullptr);
                }
            };
            if (parallel_threads > 1 && points.size() > 256) {
                std::vector<std::thread> threads;
                std::size_t chunk = (points.size() + parallel_threads - 1) / parallel_threads;
                for (std::size_t t = 0; t < parallel_threads; ++t) {
                    std::size_t from = t * chunk;
                    std::size_t to = std::min(points.size(), from + chunk);
                    if (from < to) threads.emplace_back(assign_range, from, to);
                }
                for (auto& t : threads) t.join();
            } else {
                assign_range(0, points.size());
            }

            std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(dim, 0));
            std::vector<double> weights(centers.size(), 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                std::size_t c = assignment[i];
                weights[c] += points[i].weight;
                for (std::size_t d = 0; d < dim; ++d) {
                    sums[c][d] += points[i].weight * points[i].coords[d];
                }
            }
            bool moved = false;
            for (std::size_t c = 0; c < centers.size(); ++c) {
                if (weights[c] <= 0) continue;
                for (std::size_t d = 0; d < dim; ++d) {
                    double v = sums[c][d] / weights[c];
                    if (v != centers[c][d]) moved = true;
                    centers[c][d] = v;
                }
            }
            if (!moved) break;
        }

        double cost = clustering_cost(points, centers);
        if (cost < best.cost) {
            best.cost = cost;
            best.centers = centers;
        }
    }
    return best;
}

}  // namespace sde::bench
