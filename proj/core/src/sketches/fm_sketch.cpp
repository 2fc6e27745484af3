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

#include "sde/sketches/fm_sketch.hpp"

#include <bit>
#include <cmath>

namespace sde {

namespace {
constexpr double kPhi = 0.77;
}

FMSketch::FMSketch(const std::map<std::string, double>& params,
                   const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::FMSketch, kind_name(SynopsisKind::FMSketch), params, seeds) {
    bitmap_bits_ = static_cast<std::size_t>(this->params().at("bitmapSize"));
    std::size_t maps = 1;
    auto eps = this->params().find("epsilon");
    auto delta = this->params().find("delta");
    if (eps != this->params().end() && delta != this->params().end()) {
        // Chebyshev over the 0.78/sqrt(maps) standard error of averaged bitmaps.
        maps = static_cast<std::size_t>(
            std::ceil(0.6084 / (eps->second * eps->second * delta->second)));
        maps = std::max<std::size_t>(1, maps);
    }
    route_seed_ = derive_seed(seed_at(1), 0);
    position_seed_ = derive_seed(seed_at(1), 1);
    bitmaps_.assign(maps, 0);
}

std::unique_ptr<Synopsis> FMSketch::clone() const { return std::make_unique<FMSketch>(*this); }

void FMSketch::add_key(std::uint64_t key) {
    std::size_t map = bitmaps_.size() == 1
                          ? 0
                          : static_cast<std::size_t>(splitmix64(key ^ route_seed_) % bitmaps_.size());
    std::uint64_t h = splitmix64(key ^ position_seed_);
    std::size_t pos = h == 0 ? bitmap_bits_ - 1
                             : std::min<std::size_t>(std::countr_zero(h), bitmap_bits_ - 1);
    bitmaps_[map] |= 1ULL << pos;
}

double FMSketch::estimate_distinct() const {
    bool any = false;
    for (std::uint64_t bm : bitmaps_) any |= (bm != 0);
    if (!any) return 0.0;  // empty state estimates the zero element

    double rank_sum = 0;
    for (std::uint64_t bm : bitmaps_) {
        std::size_t lowest_unset = std::countr_one(bm);  // first 0 bit position
        rank_sum += static_cast<double>(std::min(lowest_unset, bitmap_bits_));
    }
    double mean_rank = rank_sum / static_cast<double>(bitmaps_.size());
    return static_cast<double>(bitmaps_.size()) / kPhi * std::exp2(mean_rank);
}

void FMSketch::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_key(update_key(record, fields));
}

EstimateValue FMSketch::do_estimate(const Query& query) const {
    if (!std::holds_alternative<DistinctQuery>(query)) query_mismatch("distinct");
    return estimate_distinct();
}

void FMSketch::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const FMSketch&>(other);
    for (std::size_t i = 0; i < bitmaps_.size(); ++i) bitmaps_[i] |= o.bitmaps_[i];
}

void FMSketch::write_payload(FrameWriter& w) const {
    w.varint(bitmaps_.size());
    for (std::uint64_t bm : bitmaps_) w.u64(bm);
}

void FMSketch::read_payload(FrameReader& r) {
    if (r.varint() != bitmaps_.size()) {
        throw SdeError(ErrorCode::ParseError, "fm frame: bitmap count mismatch");
    }
    for (auto& bm : bitmaps_) bm = r.u64();
}

}  // namespace sde
