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

#include "sde/sketches/sticky_sampling.hpp"

#include <algorithm>
#include <cmath>

namespace sde {

StickySampling::StickySampling(const std::map<std::string, double>& params,
                               const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::StickySampling, kind_name(SynopsisKind::StickySampling), params,
               seeds),
      rng_(seed_at(2)) {
    support_ = this->params().at("support");
    epsilon_ = this->params().at("epsilon");
    double delta = this->params().at("delta");
    t_ = std::log(1.0 / (support_ * delta)) / epsilon_;
    segment_end_ = static_cast<std::uint64_t>(std::ceil(2.0 * t_));
}

std::unique_ptr<Synopsis> StickySampling::clone() const {
    return std::make_unique<StickySampling>(*this);
}

void StickySampling::advance_rate() {
    rate_ *= 2;
    segment_end_ += static_cast<std::uint64_t>(std::ceil(t_)) * rate_;
    for (auto it = table_.begin(); it != table_.end();) {
        // diminish by an unbiased-coin run of tails
        while (it->second > 0 && (rng_.next() & 1)) --it->second;
        if (it->second == 0) {
            it = table_.erase(it);
        } else {
            ++it;
        }
    }
}

void StickySampling::add_item(const std::string& item) {
    ++stream_len_;
    while (stream_len_ > segment_end_) advance_rate();
    auto it = table_.find(item);
    if (it != table_.end()) {
        ++it->second;
        return;
    }
    if (rate_ == 1 || rng_.next_below(rate_) == 0) {
        table_.emplace(item, 1);
    }
}

double StickySampling::count_of(const std::string& item) const {
    auto it = table_.find(item);
    return it == table_.end() ? 0.0 : static_cast<double>(it->second);
}

std::vector<ItemCount> StickySampling::frequent_items(double support) const {
    std::vector<ItemCount> out;
    double cutoff = (support - epsilon_) * static_cast<double>(stream_len_);
    for (const auto& [item, count] : table_) {
        if (static_cast<double>(count) >= cutoff) {
            out.push_back({item, static_cast<double>(count)});
        }
    }
    std::sort(out.begin(), out.end(), [](const ItemCount& a, const ItemCount& b) {
        return a.count != b.count ? a.count > b.count : a.item < b.item;
    });
    return out;
}

void StickySampling::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_item(item_label(record, fields));
}

EstimateValue StickySampling::do_estimate(const Query& query) const {
    if (const auto* f = std::get_if<FrequencyQuery>(&query)) {
        std::string label;
        for (std::size_t i = 0; i < f->item.size(); ++i) {
            if (i) label.push_back('|');
            label += scalar_to_string(f->item[i]);
        }
        return count_of(label);
    }
    if (const auto* q = std::get_if<FrequentItemsQuery>(&query)) {
        return frequent_items(q->support);
    }
    query_mismatch("frequency or frequentItems");
}

void StickySampling::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const StickySampling&>(other);
    for (const auto& [item, count] : o.table_) table_[item] += count;
    stream_len_ += o.stream_len_;
    rate_ = std::max(rate_, o.rate_);
    segment_end_ = std::max(segment_end_, o.segment_end_);
    // re-prune at the combined error budget
    std::uint64_t cutoff = static_cast<std::uint64_t>(
        epsilon_ * static_cast<double>(stream_len_) / 2.0);
    for (auto it = table_.begin(); it != table_.end();) {
        if (it->second <= cutoff) {
            it = table_.erase(it);
        } else {
            ++it;
        }
    }
}

void StickySampling::write_payload(FrameWriter& w) const {
    w.varint(stream_len_);
    w.varint(rate_);
    w.varint(segment_end_);
    w.u64(rng_.state());
    w.varint(table_.size());
    std::vector<std::pair<std::string, std::uint64_t>> sorted(table_.begin(), table_.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [item, count] : sorted) {
        w.str(item);
        w.varint(count);
    }
}

void StickySampling::read_payload(FrameReader& r) {
    stream_len_ = r.varint();
    rate_ = r.varint();
    segment_end_ = r.varint();
    rng_.set_state(r.u64());
    std::size_t n = r.varint();
    table_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        std::string item = r.str();
        table_.emplace(std::move(item), r.varint());
    }
}

}  // namespace sde
