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

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sde {

// Time-series transforms behind the DFT and RHP synopses.
//
// A window x_0..x_{n-1} is normalized to zero mean and unit L2 norm,
// x'_k = (x_k - mean) / ||x - mean||, so that for two windows
// Corr(x, y) = 1 - d^2(X', Y') / 2 where d is the Euclidean distance of the
// unitary DFT coefficient vectors (the transform preserves distances).
// Coefficient F = 0 of a zero-mean series vanishes, so "the first c
// coefficients" are F = 1..c; conjugate symmetry bounds each norm by
// sqrt(2)/2 and makes the truncated distance
//   d_c^2 = 2 * sum_{F=1..c} |X'_F - Y'_F|^2
// a lower bound of d^2.

// Zero-mean unit-norm copy of the window; nullopt when the window has zero
// variance (degenerate series).
std::optional<std::vector<double>> normalize_series(std::span<const double> window);

// Normalized-series unitary DFT coefficients F = 1..c; nullopt on degenerate
// input. Direct O(n*c) evaluation.
std::optional<std::vector<std::complex<double>>> dft_coefficients(
    std::span<const double> window, std::size_t c);

// All n coefficients F = 0..n-1 of the normalized window (test oracle use).
std::optional<std::vector<std::complex<double>>> full_normalized_dft(
    std::span<const double> window);

// Squared Euclidean distance of two same-length coefficient vectors.
double coefficient_distance_sq(std::span<const std::complex<double>> a,
                               std::span<const std::complex<double>> b);

// Truncated distance lower bound 2 * sum |a_F - b_F|^2 over F = 1..c.
double reduced_distance_sq(std::span<const std::complex<double>> a,
                           std::span<const std::complex<double>> b);

// Grid cell half-range resolution: ceil(sqrt(2) / (2 * epsilon)) cells on
// each side of zero per axis.
std::int64_t cells_per_half_range(double epsilon);

// Distance bound matching a correlation threshold: T = 1 - epsilon^2.
inline double epsilon_for_threshold(double threshold) {
    return std::sqrt(1.0 - threshold);
}

// Bucket id of a coefficient vector on the epsilon-grid over
// [-sqrt(2)/2, sqrt(2)/2]: per used coefficient the real then imaginary cell
// index, joined with '|'. Pairs with Corr >= 1 - epsilon^2 land in the same
// or adjacent cells on every axis.
std::string dft_bucketize(std::span<const std::complex<double>> coeffs, double epsilon,
                          std::size_t grid_coeffs);

// True when every axis cell index differs by at most 1 (same or adjacent
// bucket); such pairs are the only candidates for Corr >= T.
bool buckets_adjacent(const std::string& bucket_a, const std::string& bucket_b);

// Pearson correlation of two equal-length series (oracle-grade, two-pass).
double pearson(std::span<const double> x, std::span<const double> y);

// b-bit random hyperplane signature: bit i = sign(window . h_i) with h_i
// drawn i.i.d. standard normal from the seed. nullopt for the zero vector.
std::optional<std::vector<std::uint64_t>> rhp_signature(std::span<const double> window,
                                                        std::size_t bits, std::uint64_t seed);

std::size_t rhp_hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        std::size_t bits);

// Angle-based cosine similarity estimate from a Hamming distance.
double rhp_similarity(std::size_t hamming, std::size_t bits);

// Bucket = leading prefix_bits of the signature.
std::uint64_t rhp_bucket(std::span<const std::uint64_t> signature, std::size_t prefix_bits);

}  // namespace sde
