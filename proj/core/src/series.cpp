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

#include "sde/series.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sde/error.hpp"
#include "sde/hash.hpp"

namespace sde {

namespace {
constexpr double kVarianceFloor = 1e-24;
constexpr double kCoeffBound = std::numbers::sqrt2 / 2.0;
}  // namespace

std::optional<std::vector<double>> normalize_series(std::span<const double> window) {
    const std::size_t n = window.size();
    if (n < 2) return std::nullopt;
    double mean = 0;
    for (double v : window) mean += v;
    mean /= static_cast<double>(n);
    double sq = 0;
    for (double v : window) sq += (v - mean) * (v - mean);
    if (sq <= kVarianceFloor) return std::nullopt;
    double inv = 1.0 / std::sqrt(sq);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = (window[k] - mean) * inv;
    return out;
}

namespace {

std::vector<std::complex<double>> unitary_dft(std::span<const double> series,
                                              std::size_t first, std::size_t count) {
    const std::size_t n = series.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<std::complex<double>> coeffs;
    coeffs.reserve(count);
    for (std::size_t fi = 0; fi < count; ++fi) {
        const std::size_t f = first + fi;
        double re = 0, im = 0;
        const double step = -2.0 * std::numbers::pi * static_cast<double>(f) /
                            static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            double angle = step * static_cast<double>(k);
            re += series[k] * std::cos(angle);
            im += series[k] * std::sin(angle);
        }
        coeffs.emplace_back(re * scale, im * scale);
    }
    return coeffs;
}

}  // namespace

std::optional<std::vector<std::complex<double>>> dft_coefficients(
    std::span<const double> window, std::size_t c) {
    auto normalized = normalize_series(window);
    if (!normalized) return std::nullopt;
    if (c > window.size() / 2 - (window.size() % 2 == 0 ? 1 : 0)) {
        throw SdeError(ErrorCode::ParamError, "dft: coefficient count exceeds window capacity");
    }
    return unitary_dft(*normalized, 1, c);
}

std::optional<std::vector<std::complex<double>>> full_normalized_dft(
    std::span<const double> window) {
    auto normalized = normalize_series(window);
    if (!normalized) return std::nullopt;
    return unitary_dft(*normalized, 0, window.size());
}

double coefficient_distance_sq(std::span<const std::complex<double>> a,
                               std::span<const std::complex<double>> b) {
    assert(a.size() == b.size());
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
    return d;
}

double reduced_distance_sq(std::span<const std::complex<double>> a,
                           std::span<const std::complex<double>> b) {
    std::size_t c = std::min(a.size(), b.size());
    double d = 0;
    for (std::size_t i = 0; i < c; ++i) d += std::norm(a[i] - b[i]);
    return 2.0 * d;
}

std::int64_t cells_per_half_range(double epsilon) {
    return static_cast<std::int64_t>(std::ceil(std::numbers::sqrt2 / (2.0 * epsilon)));
}

std::string dft_bucketize(std::span<const std::complex<double>> coeffs, double epsilon,
                          std::size_t grid_coeffs) {
    if (!(epsilon > 0.0 && epsilon < std::numbers::sqrt2)) {
        throw SdeError(ErrorCode::ParamError, "dft grid: epsilon must lie in (0, sqrt(2))");
    }
    if (grid_coeffs > coeffs.size()) {
        throw SdeError(ErrorCode::ParamError, "dft grid: more grid axes than coefficients");
    }
    const std::int64_t half = cells_per_half_range(epsilon);
    std::ostringstream os;
    for (std::size_t i = 0; i < grid_coeffs; ++i) {
        for (double v : {coeffs[i].real(), coeffs[i].imag()}) {
            assert(std::abs(v) <= kCoeffBound + 1e-9 && "coefficient outside bounded range");
            std::int64_t cell = static_cast<std::int64_t>(std::floor(v / epsilon));
            if (cell >= half) cell = half - 1;
            if (cell < -half) cell = -half;
            if (os.tellp() > 0) os << '|';
            os << cell;
        }
    }
    return os.str();
}

bool buckets_adjacent(const std::string& bucket_a, const std::string& bucket_b) {
    std::istringstream a(bucket_a), b(bucket_b);
    std::string ta, tb;
    while (true) {
        bool ga = static_cast<bool>(std::getline(a, ta, '|'));
        bool gb = static_cast<bool>(std::getline(b, tb, '|'));
        if (ga != gb) throw SdeError(ErrorCode::Internal, "bucket ids of different arity");
        if (!ga) return true;
        long ca = std::stol(ta), cb = std::stol(tb);
        if (std::labs(ca - cb) > 1) return false;
    }
}

double pearson(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size() && x.size() >= 2);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= kVarianceFloor || syy <= kVarianceFloor) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<std::vector<std::uint64_t>> rhp_signature(std::span<const double> window,
                                                        std::size_t bits, std::uint64_t seed) {
    double norm = 0;
    for (double v : window) norm += v * v;
    if (norm <= kVarianceFloor) return std::nullopt;
    std::vector<std::uint64_t> sig((bits + 63) / 64, 0);
    for (std::size_t i = 0; i < bits; ++i) {
        double dot = 0;
        const std::uint64_t plane_base = static_cast<std::uint64_t>(i) * window.size();
        for (std::size_t j = 0; j < window.size(); ++j) {
            dot += window[j] * gaussian_from_hash(seed, plane_base + j);
        }
        if (dot >= 0) sig[i / 64] |= (1ULL << (i % 64));
    }
    return sig;
}

std::size_t rhp_hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        std::size_t bits) {
    std::size_t h = 0;
    for (std::size_t w = 0; w < a.size(); ++w) {
        std::uint64_t diff = a[w] ^ b[w];
        if (w == a.size() - 1 && bits % 64) diff &= (1ULL << (bits % 64)) - 1;
        h += static_cast<std::size_t>(__builtin_popcountll(diff));
    }
    return h;
}

double rhp_similarity(std::size_t hamming, std::size_t bits) {
    double theta = std::numbers::pi * static_cast<double>(hamming) / static_cast<double>(bits);
    return std::cos(theta);
}

std::uint64_t rhp_bucket(std::span<const std::uint64_t> signature, std::size_t prefix_bits) {
    std::uint64_t bucket = 0;
    for (std::size_t i = 0; i < prefix_bits; ++i) {
        bucket = (bucket << 1) | ((signature[i / 64] >> (i % 64)) & 1ULL);
    }
    return bucket;
}

}  // namespace sde
