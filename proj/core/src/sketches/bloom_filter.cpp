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

#include "sde/sketches/bloom_filter.hpp"

#include <cmath>
#include <numbers>

namespace sde {

BloomFilter::BloomFilter(const std::map<std::string, double>& params,
                         const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::BloomFilter, kind_name(SynopsisKind::BloomFilter), params, seeds) {
    double n = this->params().at("elements");
    double p = this->params().at("fpr");
    const double ln2 = std::numbers::ln2;
    bits_ = std::max<std::size_t>(8, static_cast<std::size_t>(
                                         std::ceil(-n * std::log(p) / (ln2 * ln2))));
    hashes_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(bits_) / n * ln2)));
    seed_a_ = derive_seed(seed_at(1), 0);
    seed_b_ = derive_seed(seed_at(1), 1);
    words_.assign((bits_ + 63) / 64, 0);
}

std::unique_ptr<Synopsis> BloomFilter::clone() const {
    return std::make_unique<BloomFilter>(*this);
}

void BloomFilter::add_key(std::uint64_t key) {
    std::uint64_t h1 = splitmix64(key ^ seed_a_);
    std::uint64_t h2 = splitmix64(key ^ seed_b_) | 1;
    for (std::size_t i = 0; i < hashes_; ++i) {
        std::uint64_t bit = (h1 + i * h2) % bits_;
        words_[bit / 64] |= 1ULL << (bit % 64);
    }
}

bool BloomFilter::contains_key(std::uint64_t key) const {
    std::uint64_t h1 = splitmix64(key ^ seed_a_);
    std::uint64_t h2 = splitmix64(key ^ seed_b_) | 1;
    for (std::size_t i = 0; i < hashes_; ++i) {
        std::uint64_t bit = (h1 + i * h2) % bits_;
        if (!(words_[bit / 64] & (1ULL << (bit % 64)))) return false;
    }
    return true;
}

void BloomFilter::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_key(update_key(record, fields));
}

EstimateValue BloomFilter::do_estimate(const Query& query) const {
    const auto* q = std::get_if<MembershipQuery>(&query);
    if (!q) query_mismatch("membership");
    return contains_key(item_key(q->item, seed_at(0)));
}

void BloomFilter::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const BloomFilter&>(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
}

void BloomFilter::write_payload(FrameWriter& w) const {
    w.varint(bits_);
    for (std::uint64_t word : words_) w.u64(word);
}

void BloomFilter::read_payload(FrameReader& r) {
    if (r.varint() != bits_) throw SdeError(ErrorCode::ParseError, "bloom frame: size mismatch");
    for (auto& word : words_) word = r.u64();
}

}  // namespace sde
