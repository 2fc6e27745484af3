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

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include "sde/channel.hpp"
#include "sde/clock.hpp"
#include "sde/partition.hpp"
#include "sde/protocol.hpp"
#include "sde/synopsis.hpp"

namespace sde {

class CommLedger;

struct EngineConfig {
    std::string site_id = "local";
    std::uint32_t workers = 2;
    std::size_t channel_capacity = 8192;   // Data/Request channel queues
    std::size_t mailbox_capacity = 1024;   // per-shard data credit
    std::size_t worker_batch = 8;          // messages per shard per turn
    std::int64_t federation_timeout_ms = 10000;
    std::shared_ptr<Clock> clock = std::make_shared<SystemClock>();
};

// The always-running service core: a registry of live synopses, the request
// (red) and data (blue) paths, partitioned worker tasks, per-synopsis
// windows, continuous emission, splitter routing and local/union merging.
//
// Concurrency model: one mailbox per shard; a shard's state is mutated only
// by its owning worker. The request path talks to shards by message passing
// only and is never blocked by data backpressure (queries enter a shard's
// FIFO without consuming data credit). Registry updates are serialized
// through the request pump.
class Engine {
public:
    explicit Engine(EngineConfig config = {});
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    void stop();

    // -- the four fixed channels ----------------------------------------
    Topic& data_topic() noexcept { return data_topic_; }
    Topic& request_topic() noexcept { return request_topic_; }
    Topic& output_topic() noexcept { return output_topic_; }
    Topic& union_topic() noexcept { return union_topic_; }

    // -- typed entry points (same code paths as the channels) -----------

    // Synchronous routing: on return the record sits in every matching
    // shard's FIFO, so a later query on the same synopsis observes it.
    void ingest(const StreamRecord& record);

    // Publishes on the request channel and awaits the response line.
    Response execute(const Request& request, std::int64_t timeout_ms = 30000);

    StatusReport status() const;
    EngineCounters counters() const;
    const std::string& site_id() const noexcept { return config_.site_id; }
    Clock& clock() noexcept { return *config_.clock; }

    // -- federation hooks ------------------------------------------------
    using PeerSender = std::function<void(const std::string& line)>;
    struct PeerLink {
        PeerSender union_line;    // delivers to the peer's Union channel
        PeerSender request_line;  // delivers to the peer's Request channel
    };
    void set_peer(const std::string& site_id, PeerLink link);
    void set_ledger(std::shared_ptr<CommLedger> ledger);
    std::vector<std::string> peer_sites() const;

    // -- introspection (tests, bench) ------------------------------------
    std::vector<std::uint64_t> shard_items_seen(const std::string& synopsis_id) const;
    bool is_live(const std::string& synopsis_id) const;
    std::uint64_t continuous_emissions(const std::string& synopsis_id) const;

    // Plugins must be loaded (activated) before Build may reference them.
    bool plugin_loaded(const std::string& name) const;

private:
    struct ShardTask;
    struct SynopsisEntry;
    struct PendingMerge;
    struct Envelope;
    struct StateCell;

    // request pump
    void request_loop();
    void handle_request_line(const std::string& line);
    void handle_request(Request request);
    void handle_build(const Request& request);
    void handle_stop(const Request& request);
    void handle_load(const Request& request);
    void handle_status(const Request& request);
    void handle_query(const Request& request);

    // data pump
    void data_loop();

    // merge lane
    void union_loop();
    void handle_union_line(const std::string& line);
    void complete_merge(PendingMerge& pending);
    void check_merge_timeouts();

    // workers
    void worker_loop(std::uint32_t index);
    void process_envelope(ShardTask& shard, Envelope& env);
    void apply_record(ShardTask& shard, const StreamRecord& record, const std::string& stream_key,
                      std::uint64_t raw_bytes);
    void emit_partial(ShardTask& shard, const Envelope& env);
    void emit_window_close(ShardTask& shard, StateCell& cell, const std::string& cell_key,
                           std::int64_t window_end);
    void publish_response(const Response& response);

    std::shared_ptr<SynopsisEntry> find_entry(const std::string& id) const;
    void splitter_send_to_site(const std::string& kind, const std::string& synopsis_id,
                               const std::string& merge_key, const std::string& responsible,
                               std::vector<std::uint8_t> payload, const std::string& request_id);

    std::string next_response_id();

    EngineConfig config_;
    Topic data_topic_;
    Topic request_topic_;
    Topic output_topic_;
    Topic union_topic_;

    mutable std::shared_mutex registry_mutex_;
    std::unordered_map<std::string, std::shared_ptr<SynopsisEntry>> live_;
    std::unordered_map<std::string, std::vector<std::shared_ptr<SynopsisEntry>>> by_dataset_;
    std::set<std::string> loaded_plugins_;

    mutable std::mutex peers_mutex_;
    std::map<std::string, PeerLink> peers_;
    std::shared_ptr<CommLedger> ledger_;

    std::mutex pending_mutex_;
    std::unordered_map<std::string, std::shared_ptr<PendingMerge>> pending_;

    struct Worker {
        std::mutex mutex;
        std::condition_variable cv;
        std::vector<std::shared_ptr<ShardTask>> shards;
        std::uint64_t revision = 0;
        std::atomic<std::uint64_t> signal{0};
        std::thread thread;
    };
    std::vector<std::unique_ptr<Worker>> workers_;
    std::thread request_thread_;
    std::thread data_thread_;
    std::thread union_thread_;
    std::shared_ptr<Topic::Sub> request_sub_;
    std::shared_ptr<Topic::Sub> data_sub_;
    std::shared_ptr<Topic::Sub> union_sub_;

    std::atomic<bool> running_{true};
    std::atomic<std::uint64_t> response_counter_{0};

    // counters (relaxed atomics; surfaced by Status)
    mutable std::atomic<std::uint64_t> ingested_{0};
    mutable std::atomic<std::uint64_t> dropped_no_route_{0};
    mutable std::atomic<std::uint64_t> dropped_late_{0};
    mutable std::atomic<std::uint64_t> rejected_{0};
    mutable std::atomic<std::uint64_t> request_warnings_{0};
};

}  // namespace sde
