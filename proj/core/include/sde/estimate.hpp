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
#include <string>
#include <variant>
#include <vector>

#include "sde/scalar.hpp"

namespace sde {

struct ItemCount {
    std::string item;
    double count = 0;
    bool operator==(const ItemCount&) const = default;
};

struct WeightedPoint {
    std::vector<double> coords;
    double weight = 0;
    bool operator==(const WeightedPoint&) const = default;
};

// DFT / RHP per-stream summary: reduced coefficients plus grid bucket id.
struct SeriesSummary {
    std::vector<std::complex<double>> coefficients;  // empty for RHP
    std::vector<std::uint64_t> signature;            // packed bits, RHP only
    std::string bucket;
    bool operator==(const SeriesSummary&) const = default;
};

struct PairScore {
    std::string a, b;
    double score = 0;
    bool operator==(const PairScore&) const = default;
};

// The shape is determined by the synopsis kind; monostate marks degenerate
// or empty results (never NaN on the wire).
using EstimateValue = std::variant<std::monostate,
                                   bool,
                                   double,
                                   std::vector<double>,
                                   std::vector<ItemCount>,
                                   std::vector<Scalar>,     // samples
                                   std::vector<WeightedPoint>,
                                   SeriesSummary,
                                   std::vector<PairScore>>;

}  // namespace sde
