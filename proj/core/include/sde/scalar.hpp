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
#include <variant>
#include <vector>

#include "sde/hash.hpp"

namespace sde {

// One record field: a number or a string.
using Scalar = std::variant<double, std::string>;

inline bool is_number(const Scalar& s) noexcept { return std::holds_alternative<double>(s); }

// Numeric view of a scalar; throws TypeError for strings.
double scalar_number(const Scalar& s);

std::string scalar_to_string(const Scalar& s);

// Canonical byte encoding of a scalar (type tag + payload). Two sites feeding
// equal scalars into sketches with equal seeds must hash identically, so the
// encoding is pinned: 'n' + 8 IEEE-754 little-endian bytes, or 's' + UTF-8.
void append_canonical_bytes(const Scalar& s, std::vector<std::uint8_t>& out);

// 64-bit item key of one or more scalars under a seed; the single entry point
// through which record fields reach sketch hash functions.
std::uint64_t item_key(const Scalar& s, std::uint64_t seed = 0);
std::uint64_t item_key(const std::vector<Scalar>& fields, std::uint64_t seed = 0);

}  // namespace sde
