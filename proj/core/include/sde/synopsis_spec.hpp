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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sde/error.hpp"

namespace sde {

enum class SynopsisKind {
    CountMin,
    BloomFilter,
    FMSketch,
    HyperLogLog,
    AMSSketch,
    DFT,
    RHP,
    LossyCounting,
    StickySampling,
    ChainSampler,
    GKQuantiles,
    CoreSetTree,
    Plugin,
};

const char* kind_name(SynopsisKind kind) noexcept;
// Parses a kind name; unknown names resolve to Plugin with plugin_name = name.
SynopsisKind kind_from_name(const std::string& name, std::string* plugin_name);

enum class ScopeType {
    SingleStream,       // one synopsis over one named stream
    PerStreamOfSource,  // one independent state per distinct stream of a source
    WholeSource,        // one logical synopsis sharded across `parallelism`
};

struct Scope {
    ScopeType type = ScopeType::WholeSource;
    std::string stream_id;  // SingleStream only

    static Scope single_stream(std::string id) { return {ScopeType::SingleStream, std::move(id)}; }
    static Scope per_stream() { return {ScopeType::PerStreamOfSource, {}}; }
    static Scope whole_source() { return {ScopeType::WholeSource, {}}; }
    bool operator==(const Scope&) const = default;
};

enum class WindowMode { None, TimeSliding, CountSliding };

struct WindowSpec {
    WindowMode mode = WindowMode::None;
    std::int64_t length = 0;            // ms or tuples
    std::int64_t slide = 0;             // ms or tuples, slide <= length
    std::int64_t allowed_lateness = 0;  // ms, drop policy relative to watermark

    bool windowed() const noexcept { return mode != WindowMode::None; }
    void validate() const;
    bool operator==(const WindowSpec&) const = default;
};

enum class Partitioning { KeyHash, RoundRobin };

struct FederationRole {
    std::string site_id;           // this site's id within the federation
    std::string responsible_site;  // site id (resolved via the peers table)
    bool operator==(const FederationRole&) const = default;
};

// Full description of one maintained synopsis. Parameters are a flat
// name -> number map (every Table-entry parameter is numeric); the master
// RNG seed lives in params["seed"] so two sites sharing a spec build
// bit-identical, mergeable sketches.
struct SynopsisSpec {
    std::string synopsis_id;
    SynopsisKind kind = SynopsisKind::CountMin;
    std::string plugin_name;  // kind == Plugin
    std::string dataset_id;
    Scope scope;
    std::size_t key_field = 0;                // index of the stream-key field in values
    std::vector<std::size_t> value_fields;    // summarized field indices
    std::map<std::string, double> params;
    std::uint32_t parallelism = 1;
    Partitioning partitioning = Partitioning::KeyHash;
    WindowSpec window;
    bool continuous = false;
    std::optional<FederationRole> federation;

    std::uint64_t master_seed() const noexcept;
    std::string kind_label() const;  // kind name, or the plugin name

    double param(const std::string& name) const;                  // throws ParamError if absent
    double param_or(const std::string& name, double dflt) const;
    bool has_param(const std::string& name) const;

    // Structural validation plus kind-specific parameter validation.
    void validate() const;

    bool operator==(const SynopsisSpec&) const = default;
};

}  // namespace sde
