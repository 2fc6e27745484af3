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

#include "sde/sketches/lossy_counting.hpp"

#include <algorithm>
#include <cmath>

namespace sde {

LossyCounting::LossyCounting(const std::map<std::string, double>& params,
                             const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::LossyCounting, kind_name(SynopsisKind::LossyCounting), params,
               seeds) {
    epsilon_ = this->params().at("epsilon");
    bucket_width_ = static_cast<std::uint64_t>(std::ceil(1.0 / epsilon_));
}

std::unique_ptr<Synopsis> LossyCounting::clone() const {
    return std::make_unique<LossyCounting>(*this);
}

void LossyCounting::add_item(const std::string& item) {
    ++stream_len_;
    std::uint64_t bucket = (stream_len_ + bucket_width_ - 1) / bucket_width_;
    auto it = table_.find(item);
    if (it != table_.end()) {
        ++it->second.count;
    } else {
        table_.emplace(item, Entry{1, bucket - 1});
    }
    if (stream_len_ % bucket_width_ == 0) prune(bucket);
}

void LossyCounting::prune(std::uint64_t threshold) {
    for (auto it = table_.begin(); it != table_.end();) {
        if (it->second.count + it->second.delta <= threshold) {
            it = table_.erase(it);
        } else {
            ++it;
        }
    }
}

double LossyCounting::count_of(const std::string& item) const {
    auto it = table_.find(item);
    return it == table_.end() ? 0.0 : static_cast<double>(it->second.count);
}

std::vector<ItemCount> LossyCounting::frequent_items(double support) const {
    std::vector<ItemCount> out;
    double cutoff = (support - epsilon_) * static_cast<double>(stream_len_);
    for (const auto& [item, entry] : table_) {
        if (static_cast<double>(entry.count) >= cutoff) {
            out.push_back({item, static_cast<double>(entry.count)});
        }
    }
    std::sort(out.begin(), out.end(), [](const ItemCount& a, const ItemCount& b) {
        return a.count != b.count ? a.count > b.count : a.item < b.item;
    });
    return out;
}

void LossyCounting::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_item(item_label(record, fields));
}

EstimateValue LossyCounting::do_estimate(const Query& query) const {
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

void LossyCounting::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const LossyCounting&>(other);
    for (const auto& [item, entry] : o.table_) {
        Entry& mine = table_[item];
        mine.count += entry.count;
        mine.delta += entry.delta;
    }
    stream_len_ += o.stream_len_;
    prune(static_cast<std::uint64_t>(epsilon_ * static_cast<double>(stream_len_)));
}

void LossyCounting::write_payload(FrameWriter& w) const {
    w.varint(stream_len_);
    w.varint(table_.size());
    std::vector<std::pair<std::string, Entry>> sorted(table_.begin(), table_.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [item, entry] : sorted) {
        w.str(item);
        w.varint(entry.count);
        w.varint(entry.delta);
    }
}

void LossyCounting::read_payload(FrameReader& r) {
    stream_len_ = r.varint();
    std::size_t n = r.varint();
    table_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        std::string item = r.str();
        Entry e;
        e.count = r.varint();
        e.delta = r.varint();
        table_.emplace(std::move(item), e);
    }
}

}  // namespace sde
