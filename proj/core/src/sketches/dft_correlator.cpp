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

#include "sde/sketches/dft_correlator.hpp"

#include <cmath>
#include <numbers>

#include "sde/series.hpp"

namespace sde {

namespace {
constexpr double kVarianceFloor = 1e-24;
constexpr std::uint32_t kRefreshInterval = 4096;  // bound incremental fp drift
}  // namespace

DftCorrelator::DftCorrelator(const std::map<std::string, double>& params,
                             const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::DFT, kind_name(SynopsisKind::DFT), params, seeds) {
    threshold_ = this->params().at("threshold");
    epsilon_ = epsilon_for_threshold(threshold_);
    coeff_count_ = static_cast<std::size_t>(this->params().at("coefficients"));
    window_ = static_cast<std::int64_t>(this->params().at("windowLength"));
    auto grid_it = this->params().find("gridCoefficients");
    grid_coeffs_ = grid_it != this->params().end()
                       ? static_cast<std::size_t>(grid_it->second)
                       : std::min<std::size_t>(2, coeff_count_);
    if (window_ < 4) throw SdeError(ErrorCode::ParamError, "DFT: windowLength must be >= 4");
    if (coeff_count_ > static_cast<std::size_t>(window_ / 2 - 1)) {
        throw SdeError(ErrorCode::ParamError, "DFT: coefficients exceed window capacity");
    }
}

std::unique_ptr<Synopsis> DftCorrelator::clone() const {
    return std::make_unique<DftCorrelator>(*this);
}

void DftCorrelator::recompute(StreamState& s) const {
    // direct evaluation over the logically ordered window (oldest first)
    const std::size_t n = static_cast<std::size_t>(window_);
    std::vector<double> ordered(n);
    for (std::size_t k = 0; k < n; ++k) ordered[k] = s.buffer[(s.next + k) % n];
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    s.raw.assign(coeff_count_, {});
    for (std::size_t fi = 0; fi < coeff_count_; ++fi) {
        const double step =
            -2.0 * std::numbers::pi * static_cast<double>(fi + 1) / static_cast<double>(n);
        double re = 0, im = 0;
        for (std::size_t k = 0; k < n; ++k) {
            re += ordered[k] * std::cos(step * static_cast<double>(k));
            im += ordered[k] * std::sin(step * static_cast<double>(k));
        }
        s.raw[fi] = {re * scale, im * scale};
    }
    s.refresh_in = kRefreshInterval;
}

void DftCorrelator::push(StreamState& s, double value) {
    if (s.summary_only) {
        throw SdeError(ErrorCode::ProtocolError, "DFT: cannot update an imported summary state");
    }
    const std::size_t n = static_cast<std::size_t>(window_);
    if (s.buffer.empty()) s.buffer.assign(n, 0.0);

    const double evicted = s.buffer[s.next];
    const bool was_full = s.pushes >= n;
    s.buffer[s.next] = value;
    s.next = (s.next + 1) % n;
    ++s.pushes;
    s.sum += value;
    s.sum_sq += value * value;
    if (was_full) {
        s.sum -= evicted;
        s.sum_sq -= evicted * evicted;
    }

    if (s.pushes == n) {
        recompute(s);
    } else if (was_full) {
        if (s.refresh_in == 0) {
            recompute(s);
        } else {
            // slide: X_F <- omega^F * (X_F + (new - old) / sqrt(n))
            --s.refresh_in;
            const double diff = (value - evicted) / std::sqrt(static_cast<double>(n));
            for (std::size_t fi = 0; fi < coeff_count_; ++fi) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(fi + 1) /
                                     static_cast<double>(n);
                const std::complex<double> omega{std::cos(angle), std::sin(angle)};
                s.raw[fi] = omega * (s.raw[fi] + diff);
            }
        }
    }
}

void DftCorrelator::add_value(const std::string& stream, double value) {
    push(streams_[stream], value);
}

std::optional<std::vector<std::complex<double>>> DftCorrelator::normalized(
    const StreamState& s) const {
    if (s.summary_only) return s.summary;
    if (!s.full(window_)) return std::nullopt;
    const double n = static_cast<double>(window_);
    double mean = s.sum / n;
    double centered_sq = s.sum_sq - n * mean * mean;
    if (centered_sq <= kVarianceFloor) return std::nullopt;  // degenerate series
    const double inv = 1.0 / std::sqrt(centered_sq);
    std::vector<std::complex<double>> out(coeff_count_);
    for (std::size_t i = 0; i < coeff_count_; ++i) out[i] = s.raw[i] * inv;
    return out;
}

std::optional<std::vector<std::complex<double>>> DftCorrelator::coefficients(
    const std::string& stream) const {
    auto it = streams_.find(stream);
    if (it == streams_.end()) return std::nullopt;
    return normalized(it->second);
}

std::optional<std::string> DftCorrelator::bucket_of(const std::string& stream) const {
    auto coeffs = coefficients(stream);
    if (!coeffs) return std::nullopt;
    return dft_bucketize(*coeffs, epsilon_, grid_coeffs_);
}

std::optional<double> DftCorrelator::correlation(const std::string& a,
                                                 const std::string& b) const {
    auto ca = coefficients(a);
    auto cb = coefficients(b);
    if (!ca || !cb) return std::nullopt;
    return 1.0 - reduced_distance_sq(*ca, *cb) / 2.0;
}

std::vector<std::string> DftCorrelator::stream_ids() const {
    std::vector<std::string> ids;
    ids.reserve(streams_.size());
    for (const auto& [id, state] : streams_) ids.push_back(id);
    return ids;
}

std::vector<std::string> DftCorrelator::candidate_streams(const std::string& stream) const {
    std::vector<std::string> out;
    auto bucket = bucket_of(stream);
    if (!bucket) return out;
    for (const auto& [id, state] : streams_) {
        if (id == stream) continue;
        auto other = bucket_of(id);
        if (other && buckets_adjacent(*bucket, *other)) out.push_back(id);
    }
    return out;
}

std::vector<PairScore> DftCorrelator::correlated_pairs(double threshold) const {
    if (threshold <= 0) threshold = threshold_;
    std::vector<std::pair<std::vector<std::complex<double>>, std::string>> summaries;
    std::vector<std::string> ids;
    for (const auto& [id, state] : streams_) {
        auto coeffs = normalized(state);
        if (!coeffs) continue;
        std::string bucket = dft_bucketize(*coeffs, epsilon_, grid_coeffs_);
        ids.push_back(id);
        summaries.emplace_back(std::move(*coeffs), std::move(bucket));
    }
    std::vector<PairScore> out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            if (!buckets_adjacent(summaries[i].second, summaries[j].second)) continue;
            double corr = 1.0 - reduced_distance_sq(summaries[i].first, summaries[j].first) / 2.0;
            if (corr >= threshold) out.push_back({ids[i], ids[j], corr});
        }
    }
    return out;
}

void DftCorrelator::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    add_value(record.stream_id, number_at(record, fields.empty() ? 0 : fields[0]));
}

EstimateValue DftCorrelator::do_estimate(const Query& query) const {
    if (const auto* q = std::get_if<SeriesQuery>(&query)) {
        auto it = streams_.find(q->stream_id);
        if (it == streams_.end()) return std::monostate{};
        auto coeffs = normalized(it->second);
        if (!coeffs) return std::monostate{};  // degenerate or unfilled window
        SeriesSummary summary;
        summary.coefficients = *coeffs;
        summary.bucket = dft_bucketize(*coeffs, epsilon_, grid_coeffs_);
        return summary;
    }
    if (const auto* q = std::get_if<SimilarityQuery>(&query)) {
        auto corr = correlation(q->stream_a, q->stream_b);
        if (!corr) return std::monostate{};
        return *corr;
    }
    if (const auto* q = std::get_if<CorrelatedPairsQuery>(&query)) {
        return correlated_pairs(q->threshold);
    }
    query_mismatch("series, similarity or correlatedPairs");
}

void DftCorrelator::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const DftCorrelator&>(other);
    for (const auto& [id, state] : o.streams_) {
        auto [it, inserted] = streams_.emplace(id, state);
        if (!inserted && state.pushes > it->second.pushes) it->second = state;
    }
}

void DftCorrelator::write_payload(FrameWriter& w) const {
    w.varint(streams_.size());
    for (const auto& [id, s] : streams_) {
        w.str(id);
        w.u8(s.summary_only ? 1 : 0);
        if (s.summary_only) {
            w.varint(s.summary.size());
            for (const auto& c : s.summary) {
                w.f64(c.real());
                w.f64(c.imag());
            }
            continue;
        }
        w.varint(s.pushes);
        w.varint(s.next);
        w.f64(s.sum);
        w.f64(s.sum_sq);
        w.varint(s.buffer.size());
        for (double v : s.buffer) w.f64(v);
        w.varint(s.raw.size());
        for (const auto& c : s.raw) {
            w.f64(c.real());
            w.f64(c.imag());
        }
        w.varint(s.refresh_in);
    }
}

void DftCorrelator::read_payload(FrameReader& r) {
    streams_.clear();
    std::size_t n = r.varint();
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = r.str();
        StreamState s;
        if (r.u8() == 1) {
            s.summary_only = true;
            s.summary.resize(r.varint());
            for (auto& c : s.summary) {
                double re = r.f64();
                double im = r.f64();
                c = {re, im};
            }
        } else {
            s.pushes = r.varint();
            s.next = r.varint();
            s.sum = r.f64();
            s.sum_sq = r.f64();
            s.buffer.resize(r.varint());
            for (double& v : s.buffer) v = r.f64();
            s.raw.resize(r.varint());
            for (auto& c : s.raw) {
                double re = r.f64();
                double im = r.f64();
                c = {re, im};
            }
            s.refresh_in = static_cast<std::uint32_t>(r.varint());
        }
        streams_.emplace(std::move(id), std::move(s));
    }
}

std::vector<std::uint8_t> DftCorrelator::serialize_summary() const {
    // Ship dimensionality-reduced series: coefficients only, no raw windows.
    DftCorrelator reduced(params(), seeds());
    for (const auto& [id, s] : streams_) {
        auto coeffs = normalized(s);
        if (!coeffs) continue;
        StreamState summary;
        summary.summary_only = true;
        summary.summary = std::move(*coeffs);
        reduced.streams_.emplace(id, std::move(summary));
    }
    return reduced.serialize();
}

}  // namespace sde
