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

#include <optional>
#include <string>
#include <vector>

#include "sde/estimate.hpp"
#include "sde/query.hpp"
#include "sde/record.hpp"
#include "sde/synopsis_spec.hpp"

namespace sde {

// Newline-delimited JSON messages, one per line; field names and golden
// examples are documented in protocol.md. Every message carries v:1.

inline constexpr int kProtocolVersion = 1;

enum class Verb { Build, Stop, Load, AdHocQuery, Status };

const char* verb_name(Verb verb) noexcept;

struct Request {
    int version = kProtocolVersion;
    std::string request_id;
    Verb verb = Verb::Status;
    std::string target;                 // Stop / AdHocQuery / Load
    std::string stream;                 // addresses one state of a per-stream synopsis
    std::optional<SynopsisSpec> spec;   // Build (and optionally Load)
    std::optional<Query> query;         // AdHocQuery
    bool forwarded = false;             // set on federation re-broadcasts
};

struct ResponseError {
    ErrorCode code = ErrorCode::Internal;
    std::string message;
    std::int64_t byte_offset = -1;  // parse errors only
};

struct Response {
    int version = kProtocolVersion;
    std::string response_id;
    std::string request_id;
    std::string synopsis_id;
    std::map<std::string, double> params_echo;
    EstimateValue value;
    std::string site_id;
    std::string status = "ok";  // ok | degenerate | error
    std::optional<ResponseError> error;
    std::optional<std::uint64_t> sequence;  // continuous emissions
    std::string stream_id;                  // per-stream continuous emissions
};

struct StatusEntry {
    std::string synopsis_id;
    std::string kind;
    std::map<std::string, double> params;
    Scope scope;
    std::uint32_t parallelism = 1;
    bool continuous = false;
    bool federated = false;
    std::uint64_t items_seen = 0;
    std::uint32_t shard_count = 0;
};

struct EngineCounters {
    std::uint64_t records_ingested = 0;
    std::uint64_t records_dropped_no_route = 0;
    std::uint64_t records_dropped_late = 0;
    std::uint64_t records_rejected = 0;
    std::uint64_t request_warnings = 0;  // unknown fields etc.
};

struct StatusReport {
    std::string site_id;
    std::vector<StatusEntry> entries;
    EngineCounters counters;
};

// --- requests ---------------------------------------------------------

// Parses one request line. Throws SdeError (ParseError with byte offset on
// malformed JSON, SchemaError on field-level violations). Unknown fields are
// ignored; when `unknown_fields` is given it receives their count.
Request parse_request(const std::string& line, unsigned* unknown_fields = nullptr);
std::string format_request(const Request& request);

// --- responses --------------------------------------------------------

std::string format_response(const Response& response);
Response parse_response(const std::string& line);

Response error_response(std::string request_id, const SdeError& error, std::string site="");

// value <-> json helpers exposed for status formatting and tests
std::string format_status_report(const StatusReport& report, const std::string& response_id,
                                 const std::string& request_id);
StatusReport parse_status_report(const std::string& response_line);

// --- data records -----------------------------------------------------

StreamRecord parse_record(const std::string& line);
std::string format_record(const StreamRecord& record);

}  // namespace sde
