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
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sde {

// All keys, sketch hash functions and seeded randomness in the engine are
// derived from xxHash64 and splitmix64 so that two processes given the same
// seeds build byte-identical, mergeable state on any platform.

// xxHash64 (Yann Collet's published algorithm), fixed default seed 0.
std::uint64_t xxhash64(const void* data, std::size_t len, std::uint64_t seed = 0) noexcept;

inline std::uint64_t xxhash64(std::string_view s, std::uint64_t seed = 0) noexcept {
    return xxhash64(s.data(), s.size(), seed);
}

// The stable string hash used for partition keys. Documented contract:
// stable_hash(s) == XXH64(bytes of s, seed 0), identical across runs,
// builds and platforms.
inline std::uint64_t stable_hash(std::string_view s) noexcept {
    return xxhash64(s, 0);
}

// splitmix64: cheap stateless mixer, used to derive sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x = x ^ (x >> 31);
    return x;
}

// Deterministic seed schedule: the i-th structure seed of a synopsis built
// with master seed s.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master ^ splitmix64(index + 0x5851F42D4C957F2DULL));
}

// Small deterministic PRNG over splitmix64, for sampling decisions that must
// be reproducible from synopsis seeds (never the global RNG).
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0, n)
    std::uint64_t next_below(std::uint64_t n) noexcept {
        // 128-bit multiply avoids modulo bias for the ranges we use.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    std::uint64_t state() const noexcept { return state_; }
    void set_state(std::uint64_t s) noexcept { state_ = s; }

private:
    std::uint64_t state_;
};

// Arithmetic over the Mersenne prime 2^61 - 1, used by the pairwise and
// four-wise independent hash families below.
inline constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

inline std::uint64_t mod_mersenne61(unsigned __int128 x) noexcept {
    std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t r = lo + hi;
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

inline std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) noexcept {
    return mod_mersenne61(static_cast<unsigned __int128>(a) * b);
}

// Pairwise independent family h(x) = (a*x + b) mod p, a != 0.
struct PairwiseHash {
    std::uint64_t a = 1, b = 0;

    static PairwiseHash from_seed(std::uint64_t seed) noexcept {
        PairwiseHash h;
        h.a = splitmix64(seed) % (kMersenne61 - 1) + 1;
        h.b = splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL) % kMersenne61;
        return h;
    }

    std::uint64_t operator()(std::uint64_t x) const noexcept {
        return mod_mersenne61(static_cast<unsigned __int128>(a) * (x % kMersenne61) + b);
    }
};

// Four-wise independent family via a degree-3 polynomial mod 2^61-1.
// sign(x) maps the hash parity to {-1,+1}.
struct FourwiseHash {
    std::uint64_t a = 0, b = 0, c = 0, d = 1;

    static FourwiseHash from_seed(std::uint64_t seed) noexcept {
        FourwiseHash h;
        h.a = splitmix64(seed) % kMersenne61;
        h.b = splitmix64(seed ^ 0x1111111111111111ULL) % kMersenne61;
        h.c = splitmix64(seed ^ 0x2222222222222222ULL) % kMersenne61;
        h.d = splitmix64(seed ^ 0x3333333333333333ULL) % kMersenne61;
        return h;
    }

    std::uint64_t operator()(std::uint64_t x) const noexcept {
        std::uint64_t v = x % kMersenne61;
        std::uint64_t r = mod_mersenne61(static_cast<unsigned __int128>(d) * v + c);
        r = mod_mersenne61(static_cast<unsigned __int128>(r) * v + b);
        r = mod_mersenne61(static_cast<unsigned __int128>(r) * v + a);
        return r;
    }

    int sign(std::uint64_t x) const noexcept { return (operator()(x) & 1) ? 1 : -1; }
};

// Deterministic standard normal from a seed/index pair (Box-Muller over two
// hash-derived uniforms). Used for random hyperplanes.
double gaussian_from_hash(std::uint64_t seed, std::uint64_t index) noexcept;

// base64 codec for embedding binary state frames in NDJSON envelopes.
std::string base64_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace sde
