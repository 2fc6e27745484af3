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

#include "sde/sketches/count_min.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sde {

namespace {

std::size_t cm_width(double epsilon) {
    return static_cast<std::size_t>(std::ceil(std::numbers::e / epsilon));
}

std::size_t cm_depth(double delta) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(1.0 / delta))));
}

}  // namespace

CountMinSketch::CountMinSketch(const std::map<std::string, double>& params,
                               const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::CountMin, kind_name(SynopsisKind::CountMin), params, seeds) {
    double epsilon = this->params().at("epsilon");
    double delta = this->params().at("delta");
    width_ = cm_width(epsilon);
    depth_ = cm_depth(delta);
    rows_.reserve(depth_);
    for (std::size_t j = 0; j < depth_; ++j) {
        rows_.push_back(PairwiseHash::from_seed(derive_seed(seed_at(1), j)));
    }
    counters_.assign(depth_ * width_, 0);
}

std::unique_ptr<Synopsis> CountMinSketch::clone() const {
    return std::make_unique<CountMinSketch>(*this);
}

void CountMinSketch::add_key(std::uint64_t key, std::uint64_t weight) {
    for (std::size_t j = 0; j < depth_; ++j) {
        counters_[j * width_ + rows_[j](key) % width_] += weight;
    }
}

std::uint64_t CountMinSketch::estimate_key(std::uint64_t key) const {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t j = 0; j < depth_; ++j) {
        best = std::min(best, counters_[j * width_ + rows_[j](key) % width_]);
    }
    return best;
}

void CountMinSketch::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_key(update_key(record, fields));
}

EstimateValue CountMinSketch::do_estimate(const Query& query) const {
    const auto* q = std::get_if<FrequencyQuery>(&query);
    if (!q) query_mismatch("frequency");
    return static_cast<double>(estimate_key(item_key(q->item, seed_at(0))));
}

void CountMinSketch::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const CountMinSketch&>(other);
    for (std::size_t i = 0; i < counters_.size(); ++i) counters_[i] += o.counters_[i];
}

void CountMinSketch::write_payload(FrameWriter& w) const {
    w.varint(depth_);
    w.varint(width_);
    for (std::uint64_t c : counters_) w.varint(c);
}

void CountMinSketch::read_payload(FrameReader& r) {
    std::size_t depth = r.varint();
    std::size_t width = r.varint();
    if (depth != depth_ || width != width_) {
        throw SdeError(ErrorCode::ParseError, "count-min frame: dimension mismatch");
    }
    for (auto& c : counters_) c = r.varint();
}

}  // namespace sde
