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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sde/estimate.hpp"
#include "sde/frame.hpp"
#include "sde/query.hpp"
#include "sde/record.hpp"
#include "sde/synopsis_spec.hpp"

namespace sde {

// Uniform add / estimate / merge contract every synopsis implements.
//
// A live instance is single-writer: exactly one worker task owns and mutates
// it. merge() consumes another state of equal kind, params and seeds.
class Synopsis {
public:
    Synopsis(SynopsisKind kind, std::string label,
             std::map<std::string, double> params, std::vector<std::uint64_t> seeds)
        : kind_(kind), label_(std::move(label)),
          params_(std::move(params)), seeds_(std::move(seeds)) {}
    virtual ~Synopsis() = default;

    // Absorbs one record; `value_fields` addresses the summarized fields.
    // Rejects (throws TypeError / SchemaError) without mutating state.
    void add(const StreamRecord& record, const std::vector<std::size_t>& value_fields) {
        do_add(record, value_fields);
        ++items_seen_;
    }

    EstimateValue estimate(const Query& query) const { return do_estimate(query); }

    void merge(const Synopsis& other) {
        require_mergeable(other);
        do_merge(other);
        items_seen_ += other.items_seen_;
    }

    virtual std::unique_ptr<Synopsis> clone() const = 0;

    // Self-describing binary frame: kind tag, params, seeds, payload.
    // Round-trips bit-exactly through deserialize_synopsis().
    std::vector<std::uint8_t> serialize() const;

    // Compact form shipped between federation sites. Identical to
    // serialize() except for kinds that federate dimensionality-reduced
    // summaries (DFT coefficients, RHP signatures) instead of full state.
    virtual std::vector<std::uint8_t> serialize_summary() const { return serialize(); }

    SynopsisKind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    const std::map<std::string, double>& params() const noexcept { return params_; }
    const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }
    std::uint64_t items_seen() const noexcept { return items_seen_; }

    bool mergeable_with(const Synopsis& other) const noexcept {
        return kind_ == other.kind_ && label_ == other.label_ &&
               params_ == other.params_ && seeds_ == other.seeds_;
    }

protected:
    virtual void do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) = 0;
    virtual EstimateValue do_estimate(const Query& query) const = 0;
    virtual void do_merge(const Synopsis& other) = 0;
    virtual void write_payload(FrameWriter& w) const = 0;
    virtual void read_payload(FrameReader& r) = 0;

    void require_mergeable(const Synopsis& other) const;

    // Extraction helpers shared by the concrete sketches.
    static const Scalar& field_at(const StreamRecord& record, std::size_t index);
    static double number_at(const StreamRecord& record, std::size_t index);
    std::uint64_t update_key(const StreamRecord& record,
                             const std::vector<std::size_t>& fields) const;
    static std::string item_label(const StreamRecord& record,
                                  const std::vector<std::size_t>& fields);

    [[noreturn]] void query_mismatch(const char* expected) const;

    std::uint64_t seed_at(std::size_t i) const { return i < seeds_.size() ? seeds_[i] : 0; }

private:
    friend std::unique_ptr<Synopsis> deserialize_synopsis(std::span<const std::uint8_t>);

    SynopsisKind kind_;
    std::string label_;
    std::map<std::string, double> params_;
    std::vector<std::uint64_t> seeds_;
    std::uint64_t items_seen_ = 0;
};

using PluginFactory = std::function<std::unique_ptr<Synopsis>(
    const std::map<std::string, double>& params, const std::vector<std::uint64_t>& seeds)>;

// Process-wide plugin registry. Registration is permitted while the engine is
// running; Build requests resolve PluginKind names here.
class PluginRegistry {
public:
    static PluginRegistry& global();

    void register_plugin(const std::string& name, PluginFactory factory);
    bool has(const std::string& name) const;
    PluginFactory get(const std::string& name) const;  // throws ProtocolError when absent
    std::vector<std::string> names() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, PluginFactory> factories_;
};

// Number of derived structure seeds handed to every synopsis.
inline constexpr std::size_t kSeedSlots = 4;

std::vector<std::uint64_t> derive_seed_list(std::uint64_t master_seed);

// Constructs an empty state from a kind, a parameter map and derived seeds.
// The estimate of the fresh state is the kind's zero element.
std::unique_ptr<Synopsis> new_state(SynopsisKind kind,
                                    const std::map<std::string, double>& params,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::string& plugin_name = {});

// Constructs the state described by a validated spec (derives seeds from
// params["seed"], injects the window length for natively windowed kinds).
std::unique_ptr<Synopsis> make_synopsis(const SynopsisSpec& spec);

// Reconstructs a state from its binary frame; bit-exact.
std::unique_ptr<Synopsis> deserialize_synopsis(std::span<const std::uint8_t> frame);

}  // namespace sde
