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

#include "sde/record.hpp"

#include "sde/error.hpp"

namespace sde {

void StreamRecord::validate(bool allow_empty_stream) const {
    if (dataset_id.empty()) throw SdeError(ErrorCode::SchemaError, "record: empty dataset id");
    if (stream_id.empty() && !allow_empty_stream) {
        throw SdeError(ErrorCode::SchemaError, "record: empty stream id");
    }
    if (event_time_ms < 0) throw SdeError(ErrorCode::SchemaError, "record: negative event time");
    if (values.empty()) throw SdeError(ErrorCode::SchemaError, "record: no values");
}

}  // namespace sde
