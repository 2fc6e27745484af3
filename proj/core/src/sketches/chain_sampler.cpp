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

#include "sde/sketches/chain_sampler.hpp"

#include <algorithm>

namespace sde {

ChainSampler::ChainSampler(const std::map<std::string, double>& params,
                           const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::ChainSampler, kind_name(SynopsisKind::ChainSampler), params, seeds),
      rng_(seed_at(2)) {
    window_ = static_cast<std::int64_t>(this->params().at("windowLength"));
    if (window_ < 1) {
        throw SdeError(ErrorCode::ParamError, "ChainSampler: windowLength must be >= 1");
    }
    slots_.resize(static_cast<std::size_t>(this->params().at("sampleSize")));
}

std::unique_ptr<Synopsis> ChainSampler::clone() const {
    return std::make_unique<ChainSampler>(*this);
}

void ChainSampler::expire(Slot& slot) const {
    const std::uint64_t w = static_cast<std::uint64_t>(window_);
    while (!slot.chain.empty() && slot.chain.front().index + w <= position_) {
        slot.chain.pop_front();
    }
}

void ChainSampler::add_scalar(const Scalar& value) {
    ++position_;
    const std::uint64_t w = static_cast<std::uint64_t>(window_);
    const std::uint64_t horizon = std::min<std::uint64_t>(position_, w);
    for (Slot& slot : slots_) {
        if (rng_.next_below(horizon) == 0) {
            // item `position_` becomes the sample; chain restarts here
            slot.chain.clear();
            slot.chain.push_back({position_, value});
            slot.successor = position_ + 1 + rng_.next_below(w);
        } else if (!slot.chain.empty() && position_ == slot.successor) {
            slot.chain.push_back({position_, value});
            slot.successor = position_ + 1 + rng_.next_below(w);
        }
        expire(slot);
    }
}

std::vector<Scalar> ChainSampler::sample() const {
    std::vector<Scalar> out;
    out.reserve(slots_.size());
    for (const Slot& slot : slots_) {
        Slot probe = slot;
        expire(probe);
        if (!probe.chain.empty()) out.push_back(probe.chain.front().value);
    }
    return out;
}

void ChainSampler::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_scalar(field_at(record, fields.empty() ? 0 : fields[0]));
}

EstimateValue ChainSampler::do_estimate(const Query& query) const {
    if (!std::holds_alternative<SampleQuery>(query)) query_mismatch("sample");
    return sample();
}

void ChainSampler::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const ChainSampler&>(other);
    // Weighted subsampling to the slot budget: draw each slot from one side
    // with probability proportional to its window fill.
    const std::uint64_t w = static_cast<std::uint64_t>(window_);
    std::uint64_t mine = std::min<std::uint64_t>(position_, w);
    std::uint64_t theirs = std::min<std::uint64_t>(o.position_, w);
    if (mine + theirs == 0) return;
    SplitMix coin(seed_at(3) ^ position_ ^ (o.position_ << 32));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (coin.next_below(mine + theirs) >= mine) {
            slots_[i] = o.slots_[i % o.slots_.size()];
        }
    }
    position_ = std::max(position_, o.position_);
}

void ChainSampler::write_payload(FrameWriter& w) const {
    w.varint(position_);
    w.u64(rng_.state());
    w.varint(slots_.size());
    for (const Slot& slot : slots_) {
        w.varint(slot.successor);
        w.varint(slot.chain.size());
        for (const Link& link : slot.chain) {
            w.varint(link.index);
            if (const double* d = std::get_if<double>(&link.value)) {
                w.u8(0);
                w.f64(*d);
            } else {
                w.u8(1);
                w.str(std::get<std::string>(link.value));
            }
        }
    }
}

void ChainSampler::read_payload(FrameReader& r) {
    position_ = r.varint();
    rng_.set_state(r.u64());
    std::size_t n = r.varint();
    if (n != slots_.size()) throw SdeError(ErrorCode::ParseError, "chain frame: slot mismatch");
    for (Slot& slot : slots_) {
        slot.successor = r.varint();
        slot.chain.clear();
        std::size_t len = r.varint();
        for (std::size_t i = 0; i < len; ++i) {
            Link link;
            link.index = r.varint();
            if (r.u8() == 0) {
                link.value = r.f64();
            } else {
                link.value = r.str();
            }
            slot.chain.push_back(std::move(link));
        }
    }
}

}  // namespace sde
