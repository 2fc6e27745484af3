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

#include "sde/scalar.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "sde/error.hpp"

namespace sde {

double scalar_number(const Scalar& s) {
    if (const double* d = std::get_if<double>(&s)) return *d;
    throw SdeError(ErrorCode::TypeError,
                   "expected a numeric field, got string \"" + std::get<std::string>(s) + "\"");
}

std::string scalar_to_string(const Scalar& s) {
    if (const std::string* str = std::get_if<std::string>(&s)) return *str;
    double d = std::get<double>(s);
    if (d == static_cast<double>(static_cast<long long>(d))) {
        return std::to_string(static_cast<long long>(d));
    }
    std::ostringstream os;
    os << d;
    return os.str();
}

void append_canonical_bytes(const Scalar& s, std::vector<std::uint8_t>& out) {
    if (const double* d = std::get_if<double>(&s)) {
        out.push_back('n');
        double v = (*d == 0.0) ? 0.0 : *d;  // collapse -0.0 and +0.0
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    } else {
        const std::string& str = std::get<std::string>(s);
        out.push_back('s');
        out.insert(out.end(), str.begin(), str.end());
    }
}

std::uint64_t item_key(const Scalar& s, std::uint64_t seed) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(16);
    append_canonical_bytes(s, bytes);
    bytes.push_back(0x1F);  // keep single-field and multi-field keys aligned
    return xxhash64(bytes.data(), bytes.size(), seed);
}

std::uint64_t item_key(const std::vector<Scalar>& fields, std::uint64_t seed) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(fields.size() * 16);
    for (const Scalar& s : fields) {
        append_canonical_bytes(s, bytes);
        bytes.push_back(0x1F);  // field separator
    }
    return xxhash64(bytes.data(), bytes.size(), seed);
}

}  // namespace sde
