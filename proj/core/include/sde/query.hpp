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

#include <string>
#include <variant>
#include <vector>

#include "sde/scalar.hpp"

namespace sde {

struct FrequencyQuery { std::vector<Scalar> item; };   // CountMin, LossyCounting, StickySampling
struct MembershipQuery { std::vector<Scalar> item; };  // BloomFilter
struct DistinctQuery {};                           // FMSketch, HyperLogLog
struct SelfJoinQuery {};                           // AMSSketch: L2 norm squared
struct QuantileQuery { double phi = 0.5; };        // GKQuantiles
struct FrequentItemsQuery { double support = 0; }; // LossyCounting, StickySampling
struct SampleQuery {};                             // ChainSampler
struct CoresetQuery {};                            // CoreSetTree
struct SeriesQuery { std::string stream_id; };     // DFT, RHP: coefficients/signature + bucket
struct SimilarityQuery { std::string stream_a, stream_b; };  // DFT, RHP
struct CorrelatedPairsQuery { double threshold = 0; };       // 0 -> synopsis threshold

using Query = std::variant<FrequencyQuery,
                           MembershipQuery,
                           DistinctQuery,
                           SelfJoinQuery,
                           QuantileQuery,
                           FrequentItemsQuery,
                           SampleQuery,
                           CoresetQuery,
                           SeriesQuery,
                           SimilarityQuery,
                           CorrelatedPairsQuery>;

}  // namespace sde
