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

#include "sde/federation.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sde/engine.hpp"
#include "sde/hash.hpp"
#include "sde/protocol.hpp"

namespace sde {

using json = nlohmann::ordered_json;

SiteConfig SiteConfig::from_peers_file(const std::string& path, const std::string& self_id) {
    std::ifstream in(path);
    if (!in) throw SdeError(ErrorCode::IoError, "cannot open peers file: " + path);
    SiteConfig config;
    config.site_id = self_id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string site, address;
        if (!(is >> site >> address)) {
            throw SdeError(ErrorCode::ParseError, "peers file: bad line: " + line);
        }
        if (site == self_id) {
            config.union_listen = address;
        } else {
            config.peers[site] = address;
        }
    }
    return config;
}

std::string UnionFrame::to_line() const {
    json j;
    j["origin"] = origin;
    j["mergeKey"] = merge_key;
    j["kind"] = kind;
    j["synopsisID"] = synopsis_id;
    j["payload_b64"] = base64_encode(payload);
    j["bytes"] = bytes;
    return j.dump();
}

UnionFrame UnionFrame::from_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SdeError(ErrorCode::ParseError, std::string("union frame: ") + e.what())
            .at_byte(static_cast<std::int64_t>(e.byte));
    }
    UnionFrame frame;
    frame.origin = j.at("origin").get<std::string>();
    frame.merge_key = j.at("mergeKey").get<std::string>();
    frame.kind = j.value("kind", "");
    frame.synopsis_id = j.value("synopsisID", "");
    frame.payload = base64_decode(j.at("payload_b64").get<std::string>());
    frame.bytes = j.value("bytes", static_cast<std::uint64_t>(frame.payload.size()));
    return frame;
}

void CommLedger::record_raw(const std::string& synopsis_id, const std::string& site,
                            std::uint64_t encoded_bytes) {
    std::lock_guard lock(mutex_);
    raw_since_round_[{synopsis_id, site}] += encoded_bytes;
}

void CommLedger::record_frame(const std::string& synopsis_id, const std::string& from,
                              const std::string& to, std::uint64_t wire_bytes) {
    std::lock_guard lock(mutex_);
    Cell& cell = cells_[synopsis_id][{from, to}];
    ++cell.frames;
    cell.actual_bytes += wire_bytes;
    auto raw = raw_since_round_.find({synopsis_id, from});
    if (raw != raw_since_round_.end()) {
        cell.counterfactual_bytes += raw->second;
        raw->second = 0;
    }
}

CommLedger::Cell CommLedger::total(const std::string& synopsis_id) const {
    std::lock_guard lock(mutex_);
    Cell sum;
    auto it = cells_.find(synopsis_id);
    if (it == cells_.end()) return sum;
    for (const auto& [pair, cell] : it->second) {
        sum.frames += cell.frames;
        sum.actual_bytes += cell.actual_bytes;
        sum.counterfactual_bytes += cell.counterfactual_bytes;
    }
    return sum;
}

CommLedger::Cell CommLedger::total() const {
    std::lock_guard lock(mutex_);
    Cell sum;
    for (const auto& [id, pairs] : cells_) {
        for (const auto& [pair, cell] : pairs) {
            sum.frames += cell.frames;
            sum.actual_bytes += cell.actual_bytes;
            sum.counterfactual_bytes += cell.counterfactual_bytes;
        }
    }
    return sum;
}

std::map<std::string, CommLedger::Cell> CommLedger::by_synopsis() const {
    std::lock_guard lock(mutex_);
    std::map<std::string, Cell> out;
    for (const auto& [id, pairs] : cells_) {
        Cell& sum = out[id];
        for (const auto& [pair, cell] : pairs) {
            sum.frames += cell.frames;
            sum.actual_bytes += cell.actual_bytes;
            sum.counterfactual_bytes += cell.counterfactual_bytes;
        }
    }
    return out;
}

FederationSim::FederationSim(std::vector<Engine*> engines)
    : ledger_(std::make_shared<CommLedger>()) {
    for (Engine* engine : engines) {
        engine->set_ledger(ledger_);
        for (Engine* peer : engines) {
            if (peer == engine) continue;
            Engine::PeerLink link;
            link.union_line = [peer](const std::string& line) {
                peer->union_topic().publish(line);
            };
            link.request_line = [peer](const std::string& line) {
                peer->request_topic().publish(line);
            };
            engine->set_peer(peer->site_id(), std::move(link));
        }
    }
}

PeriodicFederation::PeriodicFederation(Engine& engine, std::string synopsis_id, Query query,
                                       std::int64_t period_ms)
    : engine_(engine),
      synopsis_id_(std::move(synopsis_id)),
      query_(std::move(query)),
      period_ms_(period_ms),
      next_due_(engine.clock().now_ms() + period_ms) {}

int PeriodicFederation::poll() {
    int issued = 0;
    const std::int64_t now = engine_.clock().now_ms();
    while (next_due_ <= now) {
        Request request;
        request.request_id =
            "fed:" + synopsis_id_ + ":" + std::to_string(rounds_);
        request.verb = Verb::AdHocQuery;
        request.target = synopsis_id_;
        request.query = query_;
        engine_.request_topic().publish(format_request(request));
        ++rounds_;
        ++issued;
        next_due_ += period_ms_;
        // overlapping rounds coalesce: at most one round per poll sweep
        if (next_due_ <= now) {
            next_due_ = now + period_ms_;
        }
    }
    return issued;
}

}  // namespace sde
