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

#include "sde/partition.hpp"

#include "sde/hash.hpp"

namespace sde {

std::uint32_t key_hash_shard(const std::string& stream_id, std::uint32_t parallelism) noexcept {
    if (parallelism <= 1) return 0;
    return static_cast<std::uint32_t>(stable_hash(stream_id) % parallelism);
}

std::vector<PartitionKey> make_partition_keys(const SynopsisSpec& spec,
                                              const std::set<std::string>& observed_streams) {
    std::vector<PartitionKey> keys;
    switch (spec.scope.type) {
        case ScopeType::SingleStream:
            keys.push_back({spec.synopsis_id, 0, spec.scope.stream_id});
            break;
        case ScopeType::PerStreamOfSource:
            keys.reserve(observed_streams.size());
            for (const std::string& stream : observed_streams) {
                keys.push_back({spec.synopsis_id, key_hash_shard(stream, spec.parallelism), stream});
            }
            break;
        case ScopeType::WholeSource:
            keys.reserve(spec.parallelism);
            for (std::uint32_t shard = 0; shard < spec.parallelism; ++shard) {
                keys.push_back({spec.synopsis_id, shard, {}});
            }
            break;
        default:
            throw SdeError(ErrorCode::ProtocolError, "unknown scope");
    }
    return keys;
}

}  // namespace sde
