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
#include <string>
#include <vector>

#include "sde/scalar.hpp"

namespace sde {

// One timestamped tuple of a named stream within a named data source.
// Immutable after construction; safe to share across threads.
struct StreamRecord {
    std::string dataset_id;                // data source, e.g. one exchange feed
    std::string stream_id;                 // key within the source, e.g. a stock symbol
    std::int64_t event_time_ms = 0;        // milliseconds since epoch
    std::vector<Scalar> values;            // fields addressed by zero-based index

    // dataset_id and stream_id non-empty, event_time >= 0, values non-empty.
    // stream_id may be empty on the wire when a synopsis key index supplies it.
    void validate(bool allow_empty_stream = false) const;
};

}  // namespace sde
