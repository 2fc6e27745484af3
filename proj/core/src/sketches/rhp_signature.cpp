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

#include "sde/sketches/rhp_signature.hpp"

#include <cmath>

#include "sde/series.hpp"

namespace sde {

RhpSignature::RhpSignature(const std::map<std::string, double>& params,
                           const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::RHP, kind_name(SynopsisKind::RHP), params, seeds) {
    bits_ = static_cast<std::size_t>(this->params().at("bits"));
    auto buckets = static_cast<std::uint64_t>(this->params().at("buckets"));
    prefix_bits_ = 0;
    while ((1ULL << prefix_bits_) < buckets) ++prefix_bits_;
    window_ = static_cast<std::int64_t>(this->params().at("windowLength"));
    plane_seed_ = derive_seed(seed_at(1), 0);
}

std::unique_ptr<Synopsis> RhpSignature::clone() const {
    return std::make_unique<RhpSignature>(*this);
}

void RhpSignature::add_value(const std::string& stream, double value) {
    StreamState& s = streams_[stream];
    if (s.summary_only) {
        throw SdeError(ErrorCode::ProtocolError, "RHP: cannot update an imported summary state");
    }
    const std::size_t n = static_cast<std::size_t>(window_);
    if (s.buffer.empty()) s.buffer.assign(n, 0.0);
    s.buffer[s.next] = value;
    s.next = (s.next + 1) % n;
    ++s.pushes;
}

std::optional<std::vector<std::uint64_t>> RhpSignature::signature_of(const StreamState& s) const {
    if (s.summary_only) return s.summary_signature;
    const std::size_t n = static_cast<std::size_t>(window_);
    if (s.pushes < n) return std::nullopt;
    std::vector<double> ordered(n);
    for (std::size_t k = 0; k < n; ++k) ordered[k] = s.buffer[(s.next + k) % n];
    return rhp_signature(ordered, bits_, plane_seed_);
}

std::optional<std::vector<std::uint64_t>> RhpSignature::signature(
    const std::string& stream) const {
    auto it = streams_.find(stream);
    if (it == streams_.end()) return std::nullopt;
    return signature_of(it->second);
}

std::optional<double> RhpSignature::similarity(const std::string& a, const std::string& b) const {
    auto sa = signature(a);
    auto sb = signature(b);
    if (!sa || !sb) return std::nullopt;
    return rhp_similarity(rhp_hamming(*sa, *sb, bits_), bits_);
}

void RhpSignature::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_value(record.stream_id, number_at(record, fields.empty() ? 0 : fields[0]));
}

EstimateValue RhpSignature::do_estimate(const Query& query) const {
    if (const auto* q = std::get_if<SeriesQuery>(&query)) {
        auto sig = signature(q->stream_id);
        if (!sig) return std::monostate{};
        SeriesSummary summary;
        summary.signature = *sig;
        summary.bucket = std::to_string(rhp_bucket(*sig, prefix_bits_));
        return summary;
    }
    if (const auto* q = std::get_if<SimilarityQuery>(&query)) {
        auto sim = similarity(q->stream_a, q->stream_b);
        if (!sim) return std::monostate{};
        return *sim;
    }
    query_mismatch("series or similarity");
}

void RhpSignature::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const RhpSignature&>(other);
    for (const auto& [id, state] : o.streams_) {
        auto [it, inserted] = streams_.emplace(id, state);
        if (!inserted && state.pushes > it->second.pushes) it->second = state;
    }
}

void RhpSignature::write_payload(FrameWriter& w) const {
    w.varint(streams_.size());
    for (const auto& [id, s] : streams_) {
        w.str(id);
        w.u8(s.summary_only ? 1 : 0);
        if (s.summary_only) {
            w.varint(s.summary_signature.size());
            for (std::uint64_t word : s.summary_signature) w.u64(word);
            continue;
        }
        w.varint(s.pushes);
        w.varint(s.next);
        w.varint(s.buffer.size());
        for (double v : s.buffer) w.f64(v);
    }
}

void RhpSignature::read_payload(FrameReader& r) {
    streams_.clear();
    std::size_t n = r.varint();
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = r.str();
        StreamState s;
        if (r.u8() == 1) {
            s.summary_only = true;
            s.summary_signature.resize(r.varint());
            for (auto& word : s.summary_signature) word = r.u64();
        } else {
            s.pushes = r.varint();
            s.next = r.varint();
            s.buffer.resize(r.varint());
            for (double& v : s.buffer) v = r.f64();
        }
        streams_.emplace(std::move(id), std::move(s));
    }
}

std::vector<std::uint8_t> RhpSignature::serialize_summary() const {
    RhpSignature reduced(params(), seeds());
    for (const auto& [id, s] : streams_) {
        auto sig = signature_of(s);
        if (!sig) continue;
        StreamState summary;
        summary.summary_only = true;
        summary.summary_signature = std::move(*sig);
        reduced.streams_.emplace(id, std::move(summary));
    }
    return reduced.serialize();
}

}  // namespace sde
