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

#include "sde/sketches/ams_sketch.hpp"

#include <algorithm>
#include <cmath>

namespace sde {

namespace {

inline std::uint64_t reduce61(std::uint64_t v) noexcept {
    v = (v & kMersenne61) + (v >> 61);
    return v >= kMersenne61 ? v - kMersenne61 : v;
}

inline std::uint64_t mix64(std::uint64_t x, std::uint64_t mul) noexcept {
    x ^= x >> 33;
    x *= mul;
    x ^= x >> 29;
    return x;
}

inline std::uint64_t polymod61(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                               std::uint64_t d, std::uint64_t k, std::uint64_t k2,
                               std::uint64_t k3) noexcept {
    // a + b*k + c*k^2 + d*k^3 mod 2^61-1, all operands already reduced
    unsigned __int128 acc = static_cast<unsigned __int128>(b) * k;
    acc += static_cast<unsigned __int128>(c) * k2;
    acc += static_cast<unsigned __int128>(d) * k3;
    std::uint64_t r = static_cast<std::uint64_t>(acc & kMersenne61) +
                      static_cast<std::uint64_t>(acc >> 61);
    r = reduce61(r + a);
    return r;
}

}  // namespace

AMSSketch::AMSSketch(const std::map<std::string, double>& params,
                     const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::AMSSketch, kind_name(SynopsisKind::AMSSketch), params, seeds) {
    double epsilon = this->params().at("epsilon");
    double delta = this->params().at("delta");
    width_ = static_cast<std::size_t>(std::ceil(8.0 / (epsilon * epsilon)));
    depth_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(1.0 / delta))));
    if (depth_ % 2 == 0) ++depth_;  // median wants an odd row count
    xi_seed_ = derive_seed(seed_at(1), 0);
    cells_.assign(depth_ * width_, 0);
}

std::unique_ptr<Synopsis> AMSSketch::clone() const { return std::make_unique<AMSSketch>(*this); }

void AMSSketch::add_key(std::uint64_t key, std::int64_t weight) {
    const std::uint64_t k = key % kMersenne61;
    const std::uint64_t k2 = mulmod61(k, k);
    const std::uint64_t k3 = mulmod61(k2, k);
    const std::uint64_t seed = xi_seed_;
    const std::size_t n = cells_.size();
    std::int64_t* cells = cells_.data();
    for (std::size_t cell = 0; cell < n; ++cell) {
        std::uint64_t base = splitmix64(seed + cell);
        std::uint64_t a = reduce61(base);
        std::uint64_t b = reduce61(mix64(base, 0xFF51AFD7ED558CCDULL));
        std::uint64_t c = reduce61(mix64(base, 0xC4CEB9FE1A85EC53ULL));
        std::uint64_t d = reduce61(mix64(base, 0x9E3779B97F4A7C15ULL));
        std::uint64_t h = polymod61(a, b, c, d, k, k2, k3);
        cells[cell] += (h & 1) ? weight : -weight;
    }
}

double AMSSketch::self_join() const {
    std::vector<double> rows(depth_);
    for (std::size_t j = 0; j < depth_; ++j) {
        long double acc = 0;
        const std::int64_t* row = cells_.data() + j * width_;
        for (std::size_t i = 0; i < width_; ++i) {
            acc += static_cast<long double>(row[i]) * static_cast<long double>(row[i]);
        }
        rows[j] = static_cast<double>(acc / static_cast<long double>(width_));
    }
    std::nth_element(rows.begin(), rows.begin() + rows.size() / 2, rows.end());
    return rows[rows.size() / 2];
}

double AMSSketch::inner_product(const AMSSketch& a, const AMSSketch& b) {
    if (!a.mergeable_with(b)) {
        throw SdeError(ErrorCode::MergeError, "ams inner product over incompatible sketches");
    }
    std::vector<double> rows(a.depth_);
    for (std::size_t j = 0; j < a.depth_; ++j) {
        long double acc = 0;
        const std::int64_t* ra = a.cells_.data() + j * a.width_;
        const std::int64_t* rb = b.cells_.data() + j * a.width_;
        for (std::size_t i = 0; i < a.width_; ++i) {
            acc += static_cast<long double>(ra[i]) * static_cast<long double>(rb[i]);
        }
        rows[j] = static_cast<double>(acc / static_cast<long double>(a.width_));
    }
    std::nth_element(rows.begin(), rows.begin() + rows.size() / 2, rows.end());
    return rows[rows.size() / 2];
}

void AMSSketch::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_key(update_key(record, fields));
}

EstimateValue AMSSketch::do_estimate(const Query& query) const {
    if (!std::holds_alternative<SelfJoinQuery>(query)) query_mismatch("selfJoin");
    return self_join();
}

void AMSSketch::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const AMSSketch&>(other);
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += o.cells_[i];
}

void AMSSketch::write_payload(FrameWriter& w) const {
    w.varint(depth_);
    w.varint(width_);
    for (std::int64_t c : cells_) w.zigzag(c);
}

void AMSSketch::read_payload(FrameReader& r) {
    if (r.varint() != depth_ || r.varint() != width_) {
        throw SdeError(ErrorCode::ParseError, "ams frame: dimension mismatch");
    }
    for (auto& c : cells_) c = r.zigzag();
}

}  // namespace sde
