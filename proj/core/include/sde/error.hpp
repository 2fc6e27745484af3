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
#include <stdexcept>
#include <string>

namespace sde {

enum class ErrorCode {
    ParseError,        // malformed JSON / framing
    SchemaError,       // well-formed JSON violating the message schema
    ParamError,        // invalid or missing synopsis parameter
    ProtocolError,     // request cannot be executed (unknown synopsis, bad verb...)
    QueryMismatch,     // query payload does not fit the synopsis kind
    TypeError,         // record field has the wrong type for the synopsis
    MergeError,        // incompatible sketch states
    RegistrationError, // duplicate plugin / duplicate synopsis id
    FederationError,   // missing site frames, unreachable responsible site
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class SdeError : public std::runtime_error {
public:
    SdeError(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // byte position for parse errors, -1 otherwise
    std::int64_t byte_offset() const noexcept { return byte_offset_; }
    SdeError& at_byte(std::int64_t offset) noexcept {
        byte_offset_ = offset;
        return *this;
    }

private:
    ErrorCode code_;
    std::int64_t byte_offset_ = -1;
};

}  // namespace sde
