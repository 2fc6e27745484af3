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

#include "sde/synopsis.hpp"

#include <sstream>

#include "sde/hash.hpp"
#include "sde/sketches/ams_sketch.hpp"
#include "sde/sketches/bloom_filter.hpp"
#include "sde/sketches/chain_sampler.hpp"
#include "sde/sketches/coreset_tree.hpp"
#include "sde/sketches/count_min.hpp"
#include "sde/sketches/dft_correlator.hpp"
#include "sde/sketches/fm_sketch.hpp"
#include "sde/sketches/gk_quantiles.hpp"
#include "sde/sketches/hyperloglog.hpp"
#include "sde/sketches/lossy_counting.hpp"
#include "sde/sketches/rhp_signature.hpp"
#include "sde/sketches/sticky_sampling.hpp"

namespace sde {

namespace {
constexpr std::uint8_t kFrameVersion = 1;
constexpr char kFrameMagic[4] = {'S', 'D', 'E', 'F'};
}  // namespace

void Synopsis::require_mergeable(const Synopsis& other) const {
    if (mergeable_with(other)) return;
    std::ostringstream os;
    os << "incompatible states: " << label_ << "(";
    for (const auto& [k, v] : params_) os << k << "=" << v << " ";
    os << ") vs " << other.label_ << "(";
    for (const auto& [k, v] : other.params_) os << k << "=" << v << " ";
    os << ")";
    throw SdeError(ErrorCode::MergeError, os.str());
}

const Scalar& Synopsis::field_at(const StreamRecord& record, std::size_t index) {
    if (index >= record.values.size()) {
        throw SdeError(ErrorCode::SchemaError,
                       "record has no field index " + std::to_string(index));
    }
    return record.values[index];
}

double Synopsis::number_at(const StreamRecord& record, std::size_t index) {
    return scalar_number(field_at(record, index));
}

std::uint64_t Synopsis::update_key(const StreamRecord& record,
                                   const std::vector<std::size_t>& fields) const {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(fields.size() * 16);
    for (std::size_t index : fields) {
        append_canonical_bytes(field_at(record, index), bytes);
        bytes.push_back(0x1F);
    }
    return xxhash64(bytes.data(), bytes.size(), seed_at(0));
}

std::string Synopsis::item_label(const StreamRecord& record,
                                 const std::vector<std::size_t>& fields) {
    std::string label;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) label.push_back('|');
        label += scalar_to_string(field_at(record, fields[i]));
    }
    return label;
}

void Synopsis::query_mismatch(const char* expected) const {
    throw SdeError(ErrorCode::QueryMismatch,
                   label_ + ": query does not match this synopsis (expected " +
                       expected + ")");
}

std::vector<std::uint8_t> Synopsis::serialize() const {
    FrameWriter w;
    w.u8(static_cast<std::uint8_t>(kFrameMagic[0]));
    w.u8(static_cast<std::uint8_t>(kFrameMagic[1]));
    w.u8(static_cast<std::uint8_t>(kFrameMagic[2]));
    w.u8(static_cast<std::uint8_t>(kFrameMagic[3]));
    w.u8(kFrameVersion);
    w.u8(static_cast<std::uint8_t>(kind_));
    w.str(label_);
    w.varint(params_.size());
    for (const auto& [name, value] : params_) {
        w.str(name);
        w.f64(value);
    }
    w.varint(seeds_.size());
    for (std::uint64_t s : seeds_) w.u64(s);
    w.varint(items_seen_);
    FrameWriter payload;
    write_payload(payload);
    w.bytes(payload.data());
    return w.take();
}

PluginRegistry& PluginRegistry::global() {
    static PluginRegistry registry;
    return registry;
}

void PluginRegistry::register_plugin(const std::string& name, PluginFactory factory) {
    std::lock_guard lock(mutex_);
    if (factories_.count(name)) {
        throw SdeError(ErrorCode::RegistrationError, "plugin already registered: " + name);
    }
    factories_.emplace(name, std::move(factory));
}

bool PluginRegistry::has(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return factories_.count(name) > 0;
}

PluginFactory PluginRegistry::get(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = factories_.find(name);
    if (it == factories_.end()) {
        throw SdeError(ErrorCode::ProtocolError, "unknown synopsis kind: " + name);
    }
    return it->second;
}

std::vector<std::string> PluginRegistry::names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    out.reserve(factories_.size());
    for (const auto& [name, factory] : factories_) out.push_back(name);
    return out;
}

std::vector<std::uint64_t> derive_seed_list(std::uint64_t master_seed) {
    std::vector<std::uint64_t> seeds(kSeedSlots);
    for (std::size_t i = 0; i < kSeedSlots; ++i) seeds[i] = derive_seed(master_seed, i);
    return seeds;
}

std::unique_ptr<Synopsis> new_state(SynopsisKind kind,
                                    const std::map<std::string, double>& params,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::string& plugin_name) {
    switch (kind) {
        case SynopsisKind::CountMin: return std::make_unique<CountMinSketch>(params, seeds);
        case SynopsisKind::BloomFilter: return std::make_unique<BloomFilter>(params, seeds);
        case SynopsisKind::FMSketch: return std::make_unique<FMSketch>(params, seeds);
        case SynopsisKind::HyperLogLog: return std::make_unique<HyperLogLog>(params, seeds);
        case SynopsisKind::AMSSketch: return std::make_unique<AMSSketch>(params, seeds);
        case SynopsisKind::DFT: return std::make_unique<DftCorrelator>(params, seeds);
        case SynopsisKind::RHP: return std::make_unique<RhpSignature>(params, seeds);
        case SynopsisKind::LossyCounting: return std::make_unique<LossyCounting>(params, seeds);
        case SynopsisKind::StickySampling: return std::make_unique<StickySampling>(params, seeds);
        case SynopsisKind::ChainSampler: return std::make_unique<ChainSampler>(params, seeds);
        case SynopsisKind::GKQuantiles: return std::make_unique<GKQuantiles>(params, seeds);
        case SynopsisKind::CoreSetTree: return std::make_unique<CoreSetTree>(params, seeds);
        case SynopsisKind::Plugin: return PluginRegistry::global().get(plugin_name)(params, seeds);
    }
    throw SdeError(ErrorCode::Internal, "unhandled synopsis kind");
}

std::unique_ptr<Synopsis> make_synopsis(const SynopsisSpec& spec) {
    spec.validate();
    auto params = spec.params;
    // Natively windowed kinds carry their window length in the state so that
    // frames are self-describing and merge compatibility covers the window.
    if (spec.kind == SynopsisKind::DFT || spec.kind == SynopsisKind::RHP ||
        spec.kind == SynopsisKind::ChainSampler) {
        params.emplace("windowLength", static_cast<double>(spec.window.length));
    }
    SynopsisSpec sized = spec;
    sized.params = params;
    return new_state(spec.kind, params, derive_seed_list(spec.master_seed()), spec.plugin_name);
}

std::unique_ptr<Synopsis> deserialize_synopsis(std::span<const std::uint8_t> frame) {
    FrameReader r(frame);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kFrameMagic, 4) != 0) {
        throw SdeError(ErrorCode::ParseError, "frame: bad magic");
    }
    if (r.u8() != kFrameVersion) throw SdeError(ErrorCode::ParseError, "frame: unknown version");
    auto kind = static_cast<SynopsisKind>(r.u8());
    std::string label = r.str();
    std::map<std::string, double> params;
    std::uint64_t n_params = r.varint();
    for (std::uint64_t i = 0; i < n_params; ++i) {
        std::string name = r.str();
        params[name] = r.f64();
    }
    std::vector<std::uint64_t> seeds(r.varint());
    for (auto& s : seeds) s = r.u64();
    std::uint64_t items = r.varint();
    std::vector<std::uint8_t> payload = r.bytes();

    auto state = new_state(kind, params, seeds, label);
    state->items_seen_ = items;
    FrameReader pr(payload);
    state->read_payload(pr);
    return state;
}

}  // namespace sde
