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

#include "sde/sketches/gk_quantiles.hpp"

#include <algorithm>
#include <cmath>

namespace sde {

GKQuantiles::GKQuantiles(const std::map<std::string, double>& params,
                         const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::GKQuantiles, kind_name(SynopsisKind::GKQuantiles), params, seeds) {
    epsilon_ = this->params().at("epsilon");
    head_capacity_ = std::max<std::size_t>(16, static_cast<std::size_t>(1.0 / (2.0 * epsilon_)));
}

std::unique_ptr<Synopsis> GKQuantiles::clone() const {
    return std::make_unique<GKQuantiles>(*this);
}

void GKQuantiles::add_value(double v) {
    head_.push_back(v);
    if (head_.size() >= head_capacity_) {
        flush_head();
        compress(2.0 * epsilon_ * static_cast<double>(count_));
    }
}

void GKQuantiles::flush_head() const {
    if (head_.empty()) return;
    std::sort(head_.begin(), head_.end());

    std::vector<Tuple> merged;
    merged.reserve(tuples_.size() + head_.size());
    std::size_t ti = 0;
    std::uint64_t running = count_;
    for (std::size_t hi = 0; hi < head_.size(); ++hi) {
        double v = head_[hi];
        while (ti < tuples_.size() && tuples_[ti].value <= v) merged.push_back(tuples_[ti++]);
        ++running;
        std::int64_t delta = 0;
        if (!merged.empty() && !(ti == tuples_.size() && hi == head_.size() - 1)) {
            delta = static_cast<std::int64_t>(
                std::floor(2.0 * epsilon_ * static_cast<double>(running)));
        }
        merged.push_back({v, 1, delta});
    }
    while (ti < tuples_.size()) merged.push_back(tuples_[ti++]);

    tuples_ = std::move(merged);
    head_.clear();
    count_ = running;
}

void GKQuantiles::compress(double threshold) const {
    if (tuples_.size() <= 2) return;
    std::vector<Tuple> kept;
    kept.reserve(tuples_.size());
    Tuple head = tuples_.back();
    for (std::size_t i = tuples_.size() - 2; i >= 1; --i) {
        const Tuple& t = tuples_[i];
        if (static_cast<double>(t.g + head.g + head.delta) < threshold) {
            head.g += t.g;
        } else {
            kept.push_back(head);
            head = t;
        }
    }
    kept.push_back(head);
    if (tuples_.front().value <= head.value) kept.push_back(tuples_.front());
    std::reverse(kept.begin(), kept.end());
    tuples_ = std::move(kept);
}

double GKQuantiles::quantile(double phi) const {
    flush_head();
    if (tuples_.empty()) return 0.0;
    phi = std::clamp(phi, 0.0, 1.0);
    if (phi <= epsilon_) return tuples_.front().value;
    if (phi >= 1.0 - epsilon_) return tuples_.back().value;

    std::int64_t max_gd = 0;
    for (const Tuple& t : tuples_) max_gd = std::max(max_gd, t.g + t.delta);
    const double target = static_cast<double>(max_gd) / 2.0;
    const auto rank = static_cast<std::int64_t>(
        std::ceil(phi * static_cast<double>(count_)));

    std::int64_t min_rank = tuples_.front().g;
    for (std::size_t i = 0; i + 1 < tuples_.size(); ++i) {
        std::int64_t max_rank = min_rank + tuples_[i].delta;
        if (static_cast<double>(max_rank) - target <= static_cast<double>(rank) &&
            static_cast<double>(rank) <= static_cast<double>(min_rank) + target) {
            return tuples_[i].value;
        }
        min_rank += tuples_[i + 1].g;
    }
    return tuples_.back().value;
}

std::size_t GKQuantiles::tuple_count() const {
    flush_head();
    return tuples_.size();
}

void GKQuantiles::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_value(number_at(record, fields.empty() ? 0 : fields[0]));
}

EstimateValue GKQuantiles::do_estimate(const Query& query) const {
    const auto* q = std::get_if<QuantileQuery>(&query);
    if (!q) query_mismatch("quantile");
    return quantile(q->phi);
}

void GKQuantiles::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const GKQuantiles&>(other);
    flush_head();
    o.flush_head();
    if (o.count_ == 0) return;
    if (count_ == 0) {
        tuples_ = o.tuples_;
        count_ = o.count_;
        return;
    }

    // Interleaved samples inherit the other side's rank uncertainty.
    const auto self_extra = static_cast<std::int64_t>(
        std::floor(2.0 * o.epsilon_ * static_cast<double>(o.count_)));
    const auto other_extra = static_cast<std::int64_t>(
        std::floor(2.0 * epsilon_ * static_cast<double>(count_)));

    std::vector<Tuple> merged;
    merged.reserve(tuples_.size() + o.tuples_.size());
    std::size_t si = 0, oi = 0;
    while (si < tuples_.size() && oi < o.tuples_.size()) {
        Tuple next;
        std::int64_t extra = 0;
        if (tuples_[si].value < o.tuples_[oi].value) {
            next = tuples_[si++];
            extra = oi > 0 ? self_extra : 0;
        } else {
            next = o.tuples_[oi++];
            extra = si > 0 ? other_extra : 0;
        }
        next.delta += extra;
        merged.push_back(next);
    }
    while (si < tuples_.size()) merged.push_back(tuples_[si++]);
    while (oi < o.tuples_.size()) merged.push_back(o.tuples_[oi++]);

    tuples_ = std::move(merged);
    count_ += o.count_;
    compress(2.0 * epsilon_ * static_cast<double>(count_));
}

void GKQuantiles::write_payload(FrameWriter& w) const {
    flush_head();
    w.varint(count_);
    w.varint(tuples_.size());
    for (const Tuple& t : tuples_) {
        w.f64(t.value);
        w.zigzag(t.g);
        w.zigzag(t.delta);
    }
}

void GKQuantiles::read_payload(FrameReader& r) {
    count_ = r.varint();
    tuples_.resize(r.varint());
    for (Tuple& t : tuples_) {
        t.value = r.f64();
        t.g = r.zigzag();
        t.delta = r.zigzag();
    }
    head_.clear();
}

}  // namespace sde
