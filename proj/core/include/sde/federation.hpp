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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sde/clock.hpp"
#include "sde/error.hpp"
#include "sde/query.hpp"

namespace sde {

class Engine;

// Site layout of a federation: unique ids plus reachable addresses.
// Peers file format: one `site_id address` pair per line.
struct SiteConfig {
    std::string site_id;
    std::map<std::string, std::string> peers;  // site_id -> host:port
    std::string union_listen;                  // this site's union listener

    static SiteConfig from_peers_file(const std::string& path, const std::string& self_id);
};

// One state/estimate transfer between sites (or between local workers and
// the merge lane). NDJSON envelope on the union channel.
struct UnionFrame {
    std::string origin;     // site id
    std::string merge_key;  // request_id (ad-hoc) or synopsis round key (continuous)
    std::string kind;
    std::string synopsis_id;
    std::vector<std::uint8_t> payload;  // serialized SketchState frame
    std::uint64_t bytes = 0;            // payload length before base64

    std::string to_line() const;
    static UnionFrame from_line(const std::string& line);
};

// Communication accounting per (synopsis, origin -> destination site):
// actual bytes written as union frames, frame counts, and the counterfactual
// cost of shipping the raw tuples that fed the synopsis since the previous
// round. Monotone non-decreasing.
class CommLedger {
public:
    struct Cell {
        std::uint64_t frames = 0;
        std::uint64_t actual_bytes = 0;
        std::uint64_t counterfactual_bytes = 0;
    };

    // Raw tuple arrived for a federated synopsis at `site` (encoded length).
    void record_raw(const std::string& synopsis_id, const std::string& site,
                    std::uint64_t encoded_bytes);

    // A frame was shipped from -> to; charges the accumulated raw bytes as
    // the counterfactual for this round.
    void record_frame(const std::string& synopsis_id, const std::string& from,
                      const std::string& to, std::uint64_t wire_bytes);

    Cell total(const std::string& synopsis_id) const;
    Cell total() const;
    std::map<std::string, Cell> by_synopsis() const;

private:
    mutable std::mutex mutex_;
    // (synopsis, from, to) -> cell
    std::map<std::string, std::map<std::pair<std::string, std::string>, Cell>> cells_;
    // (synopsis, site) -> raw bytes since last shipped round
    std::map<std::pair<std::string, std::string>, std::uint64_t> raw_since_round_;
};

// In-process federation of several engines with direct channel links; used
// by the simulated multi-site harness and by tests (no real network).
class FederationSim {
public:
    // Engines must outlive the sim. Wires every pair of engines and installs
    // a shared ledger.
    explicit FederationSim(std::vector<Engine*> engines);

    CommLedger& ledger() noexcept { return *ledger_; }
    std::shared_ptr<CommLedger> ledger_ptr() noexcept { return ledger_; }

private:
    std::shared_ptr<CommLedger> ledger_;
};

// Issues a federated ad-hoc query for `synopsis_id` every `period_ms` of the
// engine's clock; overlapping rounds coalesce (a round is skipped while the
// previous one is incomplete).
class PeriodicFederation {
public:
    PeriodicFederation(Engine& engine, std::string synopsis_id, Query query,
                       std::int64_t period_ms);

    // Fires pending rounds up to the engine clock's now; returns rounds issued.
    int poll();

    std::uint64_t rounds_issued() const noexcept { return rounds_; }

private:
    Engine& engine_;
    std::string synopsis_id_;
    Query query_;
    std::int64_t period_ms_;
    std::int64_t next_due_;
    std::uint64_t rounds_ = 0;
};

}  // namespace sde
