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

#include "sde/synopsis_spec.hpp"

#include <array>
#include <cmath>

#include "sde/hash.hpp"

namespace sde {

namespace {

struct KindName {
    SynopsisKind kind;
    const char* name;
};

constexpr std::array<KindName, 12> kKindNames{{
    {SynopsisKind::CountMin, "CountMin"},
    {SynopsisKind::BloomFilter, "BloomFilter"},
    {SynopsisKind::FMSketch, "FMSketch"},
    {SynopsisKind::HyperLogLog, "HyperLogLog"},
    {SynopsisKind::AMSSketch, "AMSSketch"},
    {SynopsisKind::DFT, "DFT"},
    {SynopsisKind::RHP, "RHP"},
    {SynopsisKind::LossyCounting, "LossyCounting"},
    {SynopsisKind::StickySampling, "StickySampling"},
    {SynopsisKind::ChainSampler, "ChainSampler"},
    {SynopsisKind::GKQuantiles, "GKQuantiles"},
    {SynopsisKind::CoreSetTree, "CoreSetTree"},
}};

[[noreturn]] void param_fail(const std::string& kind, const std::string& message) {
    throw SdeError(ErrorCode::ParamError, kind + ": " + message);
}

bool is_integerish(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError: return "parse_error";
        case ErrorCode::SchemaError: return "schema_error";
        case ErrorCode::ParamError: return "param_error";
        case ErrorCode::ProtocolError: return "protocol_error";
        case ErrorCode::QueryMismatch: return "query_mismatch";
        case ErrorCode::TypeError: return "type_error";
        case ErrorCode::MergeError: return "merge_error";
        case ErrorCode::RegistrationError: return "registration_error";
        case ErrorCode::FederationError: return "federation_error";
        case ErrorCode::IoError: return "io_error";
        case ErrorCode::Internal: return "internal_error";
    }
    return "unknown_error";
}

const char* kind_name(SynopsisKind kind) noexcept {
    for (const auto& entry : kKindNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "Plugin";
}

SynopsisKind kind_from_name(const std::string& name, std::string* plugin_name) {
    for (const auto& entry : kKindNames) {
        if (name == entry.name) return entry.kind;
    }
    if (plugin_name) *plugin_name = name;
    return SynopsisKind::Plugin;
}

void WindowSpec::validate() const {
    if (mode == WindowMode::None) return;
    if (length <= 0) throw SdeError(ErrorCode::ParamError, "window: length must be positive");
    if (slide <= 0) throw SdeError(ErrorCode::ParamError, "window: slide must be positive");
    if (slide > length) throw SdeError(ErrorCode::ParamError, "window: slide exceeds length");
    if (allowed_lateness < 0) {
        throw SdeError(ErrorCode::ParamError, "window: negative allowed lateness");
    }
}

std::uint64_t SynopsisSpec::master_seed() const noexcept {
    auto it = params.find("seed");
    if (it == params.end()) return 0;
    return static_cast<std::uint64_t>(it->second);
}

std::string SynopsisSpec::kind_label() const {
    return kind == SynopsisKind::Plugin ? plugin_name : kind_name(kind);
}

double SynopsisSpec::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) param_fail(kind_label(), "missing parameter \"" + name + "\"");
    return it->second;
}

double SynopsisSpec::param_or(const std::string& name, double dflt) const {
    auto it = params.find(name);
    return it == params.end() ? dflt : it->second;
}

bool SynopsisSpec::has_param(const std::string& name) const {
    return params.find(name) != params.end();
}

void SynopsisSpec::validate() const {
    if (synopsis_id.empty()) throw SdeError(ErrorCode::SchemaError, "spec: empty synopsis id");
    if (dataset_id.empty()) throw SdeError(ErrorCode::SchemaError, "spec: empty dataset key");
    if (parallelism < 1) param_fail(kind_label(), "parallelism must be >= 1");
    if (scope.type == ScopeType::SingleStream) {
        if (scope.stream_id.empty()) {
            throw SdeError(ErrorCode::SchemaError, "spec: SingleStream scope without a stream id");
        }
        if (parallelism != 1) param_fail(kind_label(), "SingleStream scope forces parallelism = 1");
    }
    window.validate();
    if (federation && federation->responsible_site.empty()) {
        throw SdeError(ErrorCode::SchemaError, "spec: federated synopsis without a responsible site");
    }
    if (has_param("seed")) {
        double s = params.at("seed");
        if (!is_integerish(s) || s < 0 || s >= 9007199254740992.0) {
            param_fail(kind_label(), "seed must be an integer in [0, 2^53)");
        }
    }
    if (continuous && scope.type == ScopeType::WholeSource && !window.windowed()) {
        // Continuous WholeSource estimates are emitted post-merge on window
        // close; without a window there is no emission point.
        param_fail(kind_label(), "continuous WholeSource synopses require a window");
    }

    auto need_unit_interval = [&](const char* name) {
        double v = param(name);
        if (!(v > 0.0 && v < 1.0)) param_fail(kind_label(), std::string(name) + " must lie in (0,1)");
        return v;
    };
    auto need_positive_int = [&](const char* name) {
        double v = param(name);
        if (!is_integerish(v) || v < 1) param_fail(kind_label(), std::string(name) + " must be a positive integer");
        return static_cast<std::int64_t>(v);
    };
    auto need_count_window = [&]() {
        if (window.mode != WindowMode::CountSliding) {
            param_fail(kind_label(), "requires a count-sliding window");
        }
    };

    switch (kind) {
        case SynopsisKind::CountMin:
            need_unit_interval("epsilon");
            need_unit_interval("delta");
            break;
        case SynopsisKind::BloomFilter:
            need_positive_int("elements");
            need_unit_interval("fpr");
            break;
        case SynopsisKind::FMSketch: {
            std::int64_t bits = need_positive_int("bitmapSize");
            if (bits < 4 || bits > 64) param_fail(kind_label(), "bitmapSize must lie in [4,64]");
            if (has_param("epsilon") || has_param("delta")) {
                double eps = need_unit_interval("epsilon");
                double delta = need_unit_interval("delta");
                double maps = std::ceil(0.6084 / (eps * eps * delta));
                if (maps > (1 << 20)) {
                    param_fail(kind_label(), "epsilon/delta demand more than 2^20 bitmaps");
                }
            }
            break;
        }
        case SynopsisKind::HyperLogLog: {
            if (has_param("m")) {
                std::int64_t m = need_positive_int("m");
                if (m > 30) param_fail(kind_label(), "m must lie in [1,30]");
            } else if (has_param("rse")) {
                need_unit_interval("rse");
            } else {
                param_fail(kind_label(), "missing parameter \"m\" (or \"rse\")");
            }
            break;
        }
        case SynopsisKind::AMSSketch: {
            double eps = need_unit_interval("epsilon");
            need_unit_interval("delta");
            if (std::ceil(8.0 / (eps * eps)) > static_cast<double>(1ULL << 26)) {
                param_fail(kind_label(), "epsilon demands more than 2^26 columns");
            }
            break;
        }
        case SynopsisKind::DFT: {
            need_unit_interval("threshold");
            std::int64_t coeffs = need_positive_int("coefficients");
            need_count_window();
            if (window.length < 4) param_fail(kind_label(), "window length must be >= 4");
            if (coeffs > window.length / 2 - 1) {
                param_fail(kind_label(), "coefficients must be <= window length / 2 - 1");
            }
            std::int64_t grid = static_cast<std::int64_t>(param_or("gridCoefficients", 1));
            if (grid < 1 || grid > coeffs) {
                param_fail(kind_label(), "gridCoefficients must lie in [1, coefficients]");
            }
            if (partitioning != Partitioning::KeyHash) {
                param_fail(kind_label(), "per-stream series demand KeyHash partitioning");
            }
            break;
        }
        case SynopsisKind::RHP: {
            std::int64_t bits = need_positive_int("bits");
            if (bits > 65536) param_fail(kind_label(), "bits must be <= 65536");
            if (has_param("threshold")) need_unit_interval("threshold");
            std::int64_t buckets = need_positive_int("buckets");
            if ((buckets & (buckets - 1)) != 0 || buckets > (1 << 30)) {
                param_fail(kind_label(), "buckets must be a power of two <= 2^30");
            }
            std::int64_t prefix = 0;
            while ((1LL << prefix) < buckets) ++prefix;
            if (prefix > bits) param_fail(kind_label(), "buckets demand a prefix longer than bits");
            need_count_window();
            if (partitioning != Partitioning::KeyHash) {
                param_fail(kind_label(), "per-stream series demand KeyHash partitioning");
            }
            break;
        }
        case SynopsisKind::LossyCounting:
            need_unit_interval("epsilon");
            break;
        case SynopsisKind::StickySampling: {
            double support = need_unit_interval("support");
            double eps = need_unit_interval("epsilon");
            need_unit_interval("delta");
            if (eps >= support) param_fail(kind_label(), "epsilon must be < support");
            break;
        }
        case SynopsisKind::ChainSampler:
            need_positive_int("sampleSize");
            need_count_window();
            break;
        case SynopsisKind::GKQuantiles:
            need_unit_interval("epsilon");
            break;
        case SynopsisKind::CoreSetTree: {
            need_positive_int("bucketSize");
            need_positive_int("dimension");
            break;
        }
        case SynopsisKind::Plugin:
            if (plugin_name.empty()) {
                throw SdeError(ErrorCode::SchemaError, "spec: plugin kind without a name");
            }
            break;
    }
}

}  // namespace sde
