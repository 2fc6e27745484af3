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
#include <set>
#include <string>
#include <vector>

#include "sde/synopsis_spec.hpp"

namespace sde {

// Routing key produced at registration time. The data path and the query
// path both derive shards through these functions, never independently.
struct PartitionKey {
    std::string synopsis_id;
    std::uint32_t shard = 0;         // in [0, parallelism)
    std::string stream_id;           // per-stream scopes: the stream this key covers

    bool operator==(const PartitionKey&) const = default;
    bool operator<(const PartitionKey& other) const {
        if (synopsis_id != other.synopsis_id) return synopsis_id < other.synopsis_id;
        if (shard != other.shard) return shard < other.shard;
        return stream_id < other.stream_id;
    }
};

// Shard of a stream under KeyHash partitioning.
std::uint32_t key_hash_shard(const std::string& stream_id, std::uint32_t parallelism) noexcept;

// Registration-time key generation. SingleStream -> one key; PerStreamOfSource
// -> one key per observed stream; WholeSource -> exactly `parallelism` keys.
// Deterministic across calls with the same inputs.
std::vector<PartitionKey> make_partition_keys(const SynopsisSpec& spec,
                                              const std::set<std::string>& observed_streams);

}  // namespace sde
