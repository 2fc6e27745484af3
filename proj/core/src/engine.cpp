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

#include "sde/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <limits>

#include "sde/federation.hpp"
#include "sde/hash.hpp"

namespace sde {

namespace {

bool stream_keyed_kind(SynopsisKind kind) noexcept {
    return kind == SynopsisKind::DFT || kind == SynopsisKind::RHP;
}

// Kinds whose window handling lives inside the sketch itself.
bool native_window_kind(SynopsisKind kind) noexcept {
    return stream_keyed_kind(kind) || kind == SynopsisKind::ChainSampler;
}

bool query_supported(SynopsisKind kind, const Query& query) {
    switch (kind) {
        case SynopsisKind::CountMin:
            return std::holds_alternative<FrequencyQuery>(query);
        case SynopsisKind::BloomFilter:
            return std::holds_alternative<MembershipQuery>(query);
        case SynopsisKind::FMSketch:
        case SynopsisKind::HyperLogLog:
            return std::holds_alternative<DistinctQuery>(query);
        case SynopsisKind::AMSSketch:
            return std::holds_alternative<SelfJoinQuery>(query);
        case SynopsisKind::DFT:
            return std::holds_alternative<SeriesQuery>(query) ||
                   std::holds_alternative<SimilarityQuery>(query) ||
                   std::holds_alternative<CorrelatedPairsQuery>(query);
        case SynopsisKind::RHP:
            return std::holds_alternative<SeriesQuery>(query) ||
                   std::holds_alternative<SimilarityQuery>(query);
        case SynopsisKind::LossyCounting:
        case SynopsisKind::StickySampling:
            return std::holds_alternative<FrequencyQuery>(query) ||
                   std::holds_alternative<FrequentItemsQuery>(query);
        case SynopsisKind::ChainSampler:
            return std::holds_alternative<SampleQuery>(query);
        case SynopsisKind::GKQuantiles:
            return std::holds_alternative<QuantileQuery>(query);
        case SynopsisKind::CoreSetTree:
            return std::holds_alternative<CoresetQuery>(query);
        case SynopsisKind::Plugin:
            return true;  // the plugin's estimate() decides
    }
    return false;
}

// Record-free default query for post-merge window-close emissions; nullopt
// for kinds whose estimate needs an item (Build rejects those combinations).
std::optional<Query> window_close_query(const SynopsisSpec& spec) {
    switch (spec.kind) {
        case SynopsisKind::FMSketch:
        case SynopsisKind::HyperLogLog:
        case SynopsisKind::Plugin:
            return Query{DistinctQuery{}};
        case SynopsisKind::AMSSketch:
            return Query{SelfJoinQuery{}};
        case SynopsisKind::GKQuantiles:
            return Query{QuantileQuery{0.5}};
        case SynopsisKind::ChainSampler:
            return Query{SampleQuery{}};
        case SynopsisKind::CoreSetTree:
            return Query{CoresetQuery{}};
        case SynopsisKind::DFT:
            return Query{CorrelatedPairsQuery{}};
        case SynopsisKind::LossyCounting: {
            double support = spec.param_or("support", 2.0 * spec.param_or("epsilon", 0.01));
            return Query{FrequentItemsQuery{support}};
        }
        case SynopsisKind::StickySampling:
            return Query{FrequentItemsQuery{spec.param_or("support", 0.01)}};
        case SynopsisKind::CountMin:
        case SynopsisKind::BloomFilter:
        case SynopsisKind::RHP:
            return std::nullopt;
    }
    return std::nullopt;
}

Query default_continuous_query(const SynopsisSpec& spec, const StreamRecord& record,
                               const std::string& stream_key) {
    switch (spec.kind) {
        case SynopsisKind::CountMin:
        case SynopsisKind::LossyCounting:
        case SynopsisKind::StickySampling: {
            FrequencyQuery q;
            for (std::size_t f : spec.value_fields) {
                if (f < record.values.size()) q.item.push_back(record.values[f]);
            }
            return q;
        }
        case SynopsisKind::BloomFilter: {
            MembershipQuery q;
            for (std::size_t f : spec.value_fields) {
                if (f < record.values.size()) q.item.push_back(record.values[f]);
            }
            return q;
        }
        case SynopsisKind::FMSketch:
        case SynopsisKind::HyperLogLog:
        case SynopsisKind::Plugin:
            return DistinctQuery{};
        case SynopsisKind::AMSSketch:
            return SelfJoinQuery{};
        case SynopsisKind::GKQuantiles:
            return QuantileQuery{0.5};
        case SynopsisKind::ChainSampler:
            return SampleQuery{};
        case SynopsisKind::CoreSetTree:
            return CoresetQuery{};
        case SynopsisKind::DFT:
        case SynopsisKind::RHP:
            return SeriesQuery{stream_key};
    }
    return DistinctQuery{};
}

}  // namespace

// ---------------------------------------------------------------------
// internal structures

// One logical sketch state with engine-side window handling. Sliding
// windows over counting kinds are paned: one sub-sketch per slide pane,
// evicted whole; the estimate merges the live panes.
struct Engine::StateCell {
    const SynopsisSpec* spec = nullptr;
    std::unique_ptr<Synopsis> state;                       // unwindowed / native kinds
    std::map<std::int64_t, std::unique_ptr<Synopsis>> panes;  // paned kinds
    std::int64_t position = 0;                             // count-window tuple index
    std::uint64_t emitted_windows = 0;

    bool paned() const noexcept {
        return spec->window.windowed() && !native_window_kind(spec->kind);
    }

    Synopsis& pane_for(std::int64_t index) {
        auto it = panes.find(index);
        if (it == panes.end()) {
            it = panes.emplace(index, make_synopsis(*spec)).first;
        }
        return *it->second;
    }

    // Pane indices covering the window [end - length, end); pane p spans
    // [p * slide, (p + 1) * slide).
    std::pair<std::int64_t, std::int64_t> live_range(std::int64_t end) const {
        std::int64_t start = end - spec->window.length;
        std::int64_t first_pane = start / spec->window.slide;
        if (first_pane * spec->window.slide < start) ++first_pane;
        if (first_pane < 0) first_pane = 0;
        std::int64_t last_pane = (end - 1) / spec->window.slide;
        return {first_pane, last_pane};
    }

    void evict(std::int64_t horizon) {
        // drop panes that can no longer intersect any live window
        while (!panes.empty()) {
            auto it = panes.begin();
            std::int64_t pane_end = (it->first + 1) * spec->window.slide;
            if (pane_end <= horizon) {
                panes.erase(it);
            } else {
                break;
            }
        }
    }

    void add(const StreamRecord& record, std::int64_t count_pos, std::int64_t event_time) {
        if (!paned()) {
            if (!state) state = make_synopsis(*spec);
            state->add(record, spec->value_fields);
            return;
        }
        std::int64_t coord =
            spec->window.mode == WindowMode::CountSliding ? count_pos : event_time;
        pane_for(coord / spec->window.slide).add(record, spec->value_fields);
    }

    // Consistent view for estimates: the single state, or the merge of the
    // panes intersecting the window ending at `end`.
    std::unique_ptr<Synopsis> snapshot(std::int64_t end) const {
        if (!paned()) {
            if (!state) return make_synopsis(*spec);
            return state->clone();
        }
        auto merged = make_synopsis(*spec);
        if (panes.empty()) return merged;
        auto [first, last] = live_range(end);
        for (const auto& [index, pane] : panes) {
            if (index >= first && index <= last) merged->merge(*pane);
        }
        return merged;
    }

    std::uint64_t items() const noexcept {
        if (state) return state->items_seen();
        std::uint64_t n = 0;
        for (const auto& [index, pane] : panes) n += pane->items_seen();
        return n;
    }
};

struct Engine::Envelope {
    enum class Type { Data, Query, StopShard };
    Type type = Type::Data;

    // Data
    StreamRecord record;
    std::string stream_key;
    std::uint64_t raw_bytes = 0;

    // Query
    Request request;                       // query payload + ids
    std::shared_ptr<PendingMerge> pending; // null -> direct single-shard answer
};

struct Engine::ShardTask {
    std::shared_ptr<SynopsisEntry> entry;
    std::uint32_t shard_index = 0;
    std::uint32_t worker_index = 0;

    // mailbox: single FIFO; data messages consume bounded credit, queries
    // and control do not (red path never blocks on data backpressure)
    std::mutex mutex;
    std::condition_variable space_cv;
    std::deque<Envelope> queue;
    std::size_t data_in_queue = 0;

    // worker-owned state (single writer)
    std::map<std::string, StateCell> cells;  // "" for whole/single/stream-keyed
    std::int64_t watermark = std::numeric_limits<std::int64_t>::min();
    bool dropped = false;

    std::atomic<std::uint64_t> items{0};

    StateCell& cell_for(const std::string& key, const SynopsisSpec& spec) {
        auto it = cells.find(key);
        if (it == cells.end()) {
            it = cells.emplace(key, StateCell{}).first;
            it->second.spec = &spec;
        }
        return it->second;
    }
};

struct Engine::SynopsisEntry {
    SynopsisSpec spec;
    std::string build_request_id;
    std::vector<std::shared_ptr<ShardTask>> shards;
    std::atomic<std::uint64_t> round_robin{0};
    std::atomic<std::uint64_t> emission_seq{0};
    std::atomic<std::uint64_t> emissions{0};

    bool per_stream_cells() const noexcept {
        return spec.scope.type == ScopeType::PerStreamOfSource && !stream_keyed_kind(spec.kind);
    }
};

struct Engine::PendingMerge {
    Request request;
    std::string merge_key;
    std::string synopsis_id;
    std::map<std::string, double> params_echo;

    std::uint32_t expected_local = 0;
    std::uint32_t received_local = 0;
    std::unique_ptr<Synopsis> merged;

    bool federated = false;
    bool responsible = false;
    std::string responsible_site;
    std::set<std::string> expected_sites;  // remote origins still outstanding
    std::set<std::string> received_sites;
    std::int64_t deadline_ms = 0;

    bool continuous_round = false;
    std::uint64_t sequence = 0;

    bool local_done() const noexcept { return received_local >= expected_local; }
    bool remote_done() const noexcept { return received_sites.size() >= expected_sites.size(); }
};

// ---------------------------------------------------------------------

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      data_topic_("Data", config_.channel_capacity),
      request_topic_("Request", config_.channel_capacity),
      output_topic_("Output", 0),
      union_topic_("Union", 0) {
    if (config_.workers < 1) config_.workers = 1;
    request_sub_ = request_topic_.subscribe();
    data_sub_ = data_topic_.subscribe();
    union_sub_ = union_topic_.subscribe();
    workers_.reserve(config_.workers);
    for (std::uint32_t i = 0; i < config_.workers; ++i) {
        workers_.push_back(std::make_unique<Worker>());
    }
    for (std::uint32_t i = 0; i < config_.workers; ++i) {
        workers_[i]->thread = std::thread([this, i] { worker_loop(i); });
    }
    request_thread_ = std::thread([this] { request_loop(); });
    data_thread_ = std::thread([this] { data_loop(); });
    union_thread_ = std::thread([this] { union_loop(); });
}

Engine::~Engine() { stop(); }

void Engine::stop() {
    bool expected = true;
    if (!running_.compare_exchange_strong(expected, false)) return;
    data_topic_.close();
    request_topic_.close();
    union_topic_.close();
    for (auto& w : workers_) w->cv.notify_all();
    // wake any producer blocked on a full mailbox
    {
        std::shared_lock lock(registry_mutex_);
        for (auto& [id, entry] : live_) {
            for (auto& shard : entry->shards) shard->space_cv.notify_all();
        }
    }
    if (request_thread_.joinable()) request_thread_.join();
    if (data_thread_.joinable()) data_thread_.join();
    if (union_thread_.joinable()) union_thread_.join();
    for (auto& w : workers_) {
        if (w->thread.joinable()) w->thread.join();
    }
    output_topic_.close();
}

std::string Engine::next_response_id() {
    return config_.site_id + "-" + std::to_string(response_counter_.fetch_add(1));
}

void Engine::publish_response(const Response& response) {
    output_topic_.publish(format_response(response));
}

// ---------------------------------------------------------------------
// data path

void Engine::data_loop() {
    while (running_) {
        auto line = data_sub_->pop(50);
        if (!line) {
            if (data_sub_->closed_and_drained()) break;
            continue;
        }
        try {
            ingest(parse_record(*line));
        } catch (const SdeError&) {
            rejected_.fetch_add(1, std::memory_order_relaxed);
        }
    }
}

void Engine::ingest(const StreamRecord& record) {
    ingested_.fetch_add(1, std::memory_order_relaxed);
    std::shared_lock lock(registry_mutex_);
    auto it = by_dataset_.find(record.dataset_id);
    if (it == by_dataset_.end() || it->second.empty()) {
        dropped_no_route_.fetch_add(1, std::memory_order_relaxed);
        return;
    }
    std::uint64_t raw_bytes = 0;
    for (const auto& entry : it->second) {
        const SynopsisSpec& spec = entry->spec;
        std::string stream_key = record.stream_id;
        if (stream_key.empty()) {
            if (spec.key_field >= record.values.size()) {
                rejected_.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            stream_key = scalar_to_string(record.values[spec.key_field]);
        }
        if (spec.scope.type == ScopeType::SingleStream && stream_key != spec.scope.stream_id) {
            continue;
        }
        std::uint32_t shard_index = 0;
        if (spec.parallelism > 1) {
            if (spec.partitioning == Partitioning::RoundRobin &&
                spec.scope.type == ScopeType::WholeSource) {
                shard_index = static_cast<std::uint32_t>(
                    entry->round_robin.fetch_add(1, std::memory_order_relaxed) %
                    spec.parallelism);
            } else {
                shard_index = key_hash_shard(stream_key, spec.parallelism);
            }
        }
        if (spec.federation && ledger_ && raw_bytes == 0) {
            raw_bytes = format_record(record).size() + 1;
        }
        if (spec.federation && ledger_) {
            ledger_->record_raw(spec.synopsis_id, config_.site_id, raw_bytes);
        }

        ShardTask& shard = *entry->shards[shard_index];
        Envelope env;
        env.type = Envelope::Type::Data;
        env.record = record;
        env.record.stream_id = stream_key;
        env.stream_key = stream_key;
        env.raw_bytes = raw_bytes;
        {
            std::unique_lock mb(shard.mutex);
            shard.space_cv.wait(mb, [&] {
                return !running_ || shard.data_in_queue < config_.mailbox_capacity;
            });
            if (!running_) return;
            shard.queue.push_back(std::move(env));
            ++shard.data_in_queue;
        }
        Worker& w = *workers_[shard.worker_index];
        w.signal.fetch_add(1, std::memory_order_release);
        w.cv.notify_one();
    }
}

// ---------------------------------------------------------------------
// request path

void Engine::request_loop() {
    while (running_) {
        auto line = request_sub_->pop(50);
        if (!line) {
            if (request_sub_->closed_and_drained()) break;
            continue;
        }
        handle_request_line(*line);
    }
}

void Engine::handle_request_line(const std::string& line) {
    Request request;
    try {
        unsigned unknown = 0;
        request = parse_request(line, &unknown);
        if (unknown) request_warnings_.fetch_add(unknown, std::memory_order_relaxed);
    } catch (const SdeError& e) {
        // a syntactically invalid request never reaches any live synopsis
        Response r = error_response("", e, config_.site_id);
        r.response_id = next_response_id();
        publish_response(r);
        return;
    }
    handle_request(std::move(request));
}

void Engine::handle_request(Request request) {
    try {
        switch (request.verb) {
            case Verb::Build: handle_build(request); break;
            case Verb::Stop: handle_stop(request); break;
            case Verb::Load: handle_load(request); break;
            case Verb::Status: handle_status(request); break;
            case Verb::AdHocQuery: handle_query(request); break;
        }
    } catch (const SdeError& e) {
        Response r = error_response(request.request_id, e, config_.site_id);
        r.response_id = next_response_id();
        publish_response(r);
    } catch (const std::exception& e) {
        Response r = error_response(request.request_id,
                                    SdeError(ErrorCode::Internal, e.what()), config_.site_id);
        r.response_id = next_response_id();
        publish_response(r);
    }
}

std::shared_ptr<Engine::SynopsisEntry> Engine::find_entry(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = live_.find(id);
    return it == live_.end() ? nullptr : it->second;
}

bool Engine::plugin_loaded(const std::string& name) const {
    std::shared_lock lock(registry_mutex_);
    return loaded_plugins_.count(name) > 0;
}

void Engine::handle_build(const Request& request) {
    SynopsisSpec spec = *request.spec;
    spec.validate();
    if (spec.kind == SynopsisKind::Plugin) {
        if (!PluginRegistry::global().has(spec.plugin_name) || !plugin_loaded(spec.plugin_name)) {
            throw SdeError(ErrorCode::ProtocolError, "unknown synopsis kind: " + spec.plugin_name);
        }
    }
    // construct one probe state now: parameter errors surface before registration
    make_synopsis(spec);

    auto entry = std::make_shared<SynopsisEntry>();
    entry->spec = spec;
    entry->build_request_id = request.request_id;
    std::uint32_t shard_count = spec.scope.type == ScopeType::SingleStream ? 1 : spec.parallelism;
    std::uint64_t base = stable_hash(spec.synopsis_id);
    for (std::uint32_t s = 0; s < shard_count; ++s) {
        auto shard = std::make_shared<ShardTask>();
        shard->entry = entry;
        shard->shard_index = s;
        shard->worker_index = static_cast<std::uint32_t>((base + s) % config_.workers);
        entry->shards.push_back(shard);
    }

    {
        std::unique_lock lock(registry_mutex_);
        if (live_.count(spec.synopsis_id)) {
            throw SdeError(ErrorCode::RegistrationError,
                           "duplicate synopsis id: " + spec.synopsis_id);
        }
        live_.emplace(spec.synopsis_id, entry);
        by_dataset_[spec.dataset_id].push_back(entry);
    }
    for (const auto& shard : entry->shards) {
        Worker& w = *workers_[shard->worker_index];
        std::lock_guard lock(w.mutex);
        w.shards.push_back(shard);
        ++w.revision;
    }

    // routing is active; acknowledge
    Response r;
    r.response_id = next_response_id();
    r.request_id = request.request_id;
    r.synopsis_id = spec.synopsis_id;
    r.params_echo = spec.params;
    r.site_id = config_.site_id;
    publish_response(r);
}

void Engine::handle_stop(const Request& request) {
    std::shared_ptr<SynopsisEntry> entry;
    {
        std::unique_lock lock(registry_mutex_);
        auto it = live_.find(request.target);
        if (it == live_.end()) {
            throw SdeError(ErrorCode::ProtocolError, "unknown synopsis: " + request.target);
        }
        entry = it->second;
        live_.erase(it);
        auto& vec = by_dataset_[entry->spec.dataset_id];
        vec.erase(std::remove(vec.begin(), vec.end(), entry), vec.end());
        if (vec.empty()) by_dataset_.erase(entry->spec.dataset_id);
    }
    // routing removed first; shards drain and drop behind any in-flight work
    for (const auto& shard : entry->shards) {
        Envelope env;
        env.type = Envelope::Type::StopShard;
        {
            std::lock_guard mb(shard->mutex);
            shard->queue.push_back(std::move(env));
        }
        Worker& w = *workers_[shard->worker_index];
        w.signal.fetch_add(1, std::memory_order_release);
        w.cv.notify_one();
    }
    Response r;
    r.response_id = next_response_id();
    r.request_id = request.request_id;
    r.synopsis_id = request.target;
    r.site_id = config_.site_id;
    publish_response(r);
}

void Engine::handle_load(const Request& request) {
    if (!PluginRegistry::global().has(request.target)) {
        throw SdeError(ErrorCode::ProtocolError, "unknown synopsis kind: " + request.target);
    }
    {
        std::unique_lock lock(registry_mutex_);
        if (!loaded_plugins_.insert(request.target).second) {
            throw SdeError(ErrorCode::RegistrationError,
                           "plugin already loaded: " + request.target);
        }
    }
    Response r;
    r.response_id = next_response_id();
    r.request_id = request.request_id;
    r.synopsis_id = request.target;
    r.site_id = config_.site_id;
    publish_response(r);
}

StatusReport Engine::status() const {
    StatusReport report;
    report.site_id = config_.site_id;
    std::shared_lock lock(registry_mutex_);
    for (const auto& [id, entry] : live_) {
        StatusEntry e;
        e.synopsis_id = id;
        e.kind = entry->spec.kind_label();
        e.params = entry->spec.params;
        e.scope = entry->spec.scope;
        e.parallelism = entry->spec.parallelism;
        e.continuous = entry->spec.continuous;
        e.federated = entry->spec.federation.has_value();
        e.shard_count = static_cast<std::uint32_t>(entry->shards.size());
        for (const auto& shard : entry->shards) {
            e.items_seen += shard->items.load(std::memory_order_relaxed);
        }
        report.entries.push_back(std::move(e));
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const StatusEntry& a, const StatusEntry& b) {
                  return a.synopsis_id < b.synopsis_id;
              });
    report.counters = counters();
    return report;
}

EngineCounters Engine::counters() const {
    EngineCounters c;
    c.records_ingested = ingested_.load(std::memory_order_relaxed);
    c.records_dropped_no_route = dropped_no_route_.load(std::memory_order_relaxed);
    c.records_dropped_late = dropped_late_.load(std::memory_order_relaxed);
    c.records_rejected = rejected_.load(std::memory_order_relaxed);
    c.request_warnings = request_warnings_.load(std::memory_order_relaxed);
    return c;
}

void Engine::handle_status(const Request& request) {
    output_topic_.publish(
        format_status_report(status(), next_response_id(), request.request_id));
}

void Engine::handle_query(const Request& request) {
    auto entry = find_entry(request.target);
    if (!entry) {
        throw SdeError(ErrorCode::ProtocolError, "unknown synopsis: " + request.target);
    }
    const SynopsisSpec& spec = entry->spec;
    if (!query_supported(spec.kind, *request.query)) {
        throw SdeError(ErrorCode::QueryMismatch,
                       "query does not match synopsis kind " + spec.kind_label());
    }

    // shards addressed by this query
    std::vector<std::uint32_t> shards;
    std::string cell_key;  // per-stream cell, when addressed
    if (entry->per_stream_cells()) {
        std::string stream = request.stream;
        if (const auto* sq = std::get_if<SeriesQuery>(&*request.query)) stream = sq->stream_id;
        if (stream.empty()) {
            throw SdeError(ErrorCode::ProtocolError,
                           "per-stream synopsis requires a stream to address");
        }
        cell_key = stream;
        shards.push_back(key_hash_shard(stream, spec.parallelism));
    } else if (const auto* sq = std::get_if<SeriesQuery>(&*request.query);
               sq && spec.parallelism > 1) {
        shards.push_back(key_hash_shard(sq->stream_id, spec.parallelism));
    } else if (const auto* sim = std::get_if<SimilarityQuery>(&*request.query);
               sim && spec.parallelism > 1) {
        std::uint32_t a = key_hash_shard(sim->stream_a, spec.parallelism);
        std::uint32_t b = key_hash_shard(sim->stream_b, spec.parallelism);
        shards.push_back(a);
        if (b != a) shards.push_back(b);
    } else {
        for (std::uint32_t s = 0; s < entry->shards.size(); ++s) shards.push_back(s);
    }

    const bool federated = spec.federation.has_value();
    const bool responsible = federated && spec.federation->responsible_site == config_.site_id;

    if (shards.size() == 1 && !federated) {
        // Case 1: single local estimate, answered by the owning worker
        Envelope env;
        env.type = Envelope::Type::Query;
        env.request = request;
        env.stream_key = cell_key;
        ShardTask& shard = *entry->shards[shards[0]];
        {
            std::lock_guard mb(shard.mutex);
            shard.queue.push_back(std::move(env));
        }
        Worker& w = *workers_[shard.worker_index];
        w.signal.fetch_add(1, std::memory_order_release);
        w.cv.notify_one();
        return;
    }

    auto pending = std::make_shared<PendingMerge>();
    pending->request = request;
    pending->merge_key = request.request_id;
    pending->synopsis_id = spec.synopsis_id;
    pending->params_echo = spec.params;
    pending->expected_local = static_cast<std::uint32_t>(shards.size());
    pending->federated = federated;
    pending->responsible = responsible;
    if (federated) {
        pending->responsible_site = spec.federation->responsible_site;
        if (responsible) {
            std::lock_guard lock(peers_mutex_);
            for (const auto& [site, link] : peers_) pending->expected_sites.insert(site);
            pending->deadline_ms = config_.clock->now_ms() + config_.federation_timeout_ms;
        }
    }
    {
        std::lock_guard lock(pending_mutex_);
        pending_[pending->merge_key] = pending;
    }
    // rebroadcast a federated query to the peer sites once, after the merge
    // registration so that early remote frames find it
    if (federated && !request.forwarded) {
        Request copy = request;
        copy.forwarded = true;
        std::string line = format_request(copy);
        std::lock_guard lock(peers_mutex_);
        for (const auto& [site, link] : peers_) {
            if (link.request_line) link.request_line(line);
        }
    }
    for (std::uint32_t s : shards) {
        Envelope env;
        env.type = Envelope::Type::Query;
        env.request = request;
        env.stream_key = cell_key;
        env.pending = pending;
        ShardTask& shard = *entry->shards[s];
        {
            std::lock_guard mb(shard.mutex);
            shard.queue.push_back(std::move(env));
        }
        Worker& w = *workers_[shard.worker_index];
        w.signal.fetch_add(1, std::memory_order_release);
        w.cv.notify_one();
    }
}

// ---------------------------------------------------------------------
// workers

void Engine::worker_loop(std::uint32_t index) {
    Worker& self = *workers_[index];
    std::vector<std::shared_ptr<ShardTask>> shards;
    std::uint64_t seen_revision = ~0ULL;
    while (running_) {
        {
            std::lock_guard lock(self.mutex);
            if (self.revision != seen_revision) {
                shards = self.shards;
                seen_revision = self.revision;
            }
        }
        bool did_work = false;
        bool dropped_any = false;
        for (auto& shard : shards) {
            for (std::size_t n = 0; n < config_.worker_batch; ++n) {
                Envelope env;
                {
                    std::lock_guard mb(shard->mutex);
                    if (shard->queue.empty()) break;
                    env = std::move(shard->queue.front());
                    shard->queue.pop_front();
                    if (env.type == Envelope::Type::Data) {
                        --shard->data_in_queue;
                        shard->space_cv.notify_one();
                    }
                }
                process_envelope(*shard, env);
                did_work = true;
                if (shard->dropped) {
                    dropped_any = true;
                    break;
                }
            }
        }
        if (dropped_any) {
            std::lock_guard lock(self.mutex);
            self.shards.erase(std::remove_if(self.shards.begin(), self.shards.end(),
                                             [](const auto& s) { return s->dropped; }),
                              self.shards.end());
            ++self.revision;
        }
        if (!did_work) {
            std::unique_lock lock(self.mutex);
            self.cv.wait_for(lock, std::chrono::milliseconds(2), [&] {
                return !running_ || self.signal.load(std::memory_order_acquire) > 0;
            });
        }
        self.signal.store(0, std::memory_order_release);
    }
}

void Engine::process_envelope(ShardTask& shard, Envelope& env) {
    switch (env.type) {
        case Envelope::Type::Data:
            apply_record(shard, env.record, env.stream_key, env.raw_bytes);
            break;
        case Envelope::Type::Query:
            emit_partial(shard, env);
            break;
        case Envelope::Type::StopShard:
            shard.cells.clear();
            shard.dropped = true;
            break;
    }
}

void Engine::apply_record(ShardTask& shard, const StreamRecord& record,
                          const std::string& stream_key, std::uint64_t raw_bytes) {
    (void)raw_bytes;
    const auto entry = shard.entry;
    const SynopsisSpec& spec = entry->spec;

    // event-time lateness policy (windowed synopses only)
    const std::int64_t old_watermark = shard.watermark;
    if (spec.window.windowed() && spec.window.mode == WindowMode::TimeSliding) {
        if (record.event_time_ms + spec.window.allowed_lateness < old_watermark) {
            dropped_late_.fetch_add(1, std::memory_order_relaxed);
            return;
        }
    }
    shard.watermark = std::max(shard.watermark, record.event_time_ms);

    const std::string cell_key = entry->per_stream_cells() ? stream_key : std::string{};
    StateCell& cell = shard.cell_for(cell_key, spec);
    try {
        cell.add(record, cell.position, record.event_time_ms);
    } catch (const SdeError&) {
        rejected_.fetch_add(1, std::memory_order_relaxed);
        return;
    }
    ++cell.position;
    shard.items.fetch_add(1, std::memory_order_relaxed);

    // window bookkeeping: eviction horizon and close-driven emissions
    if (cell.paned()) {
        const std::int64_t slide = spec.window.slide;
        std::int64_t coord = spec.window.mode == WindowMode::CountSliding
                                 ? cell.position
                                 : shard.watermark - spec.window.allowed_lateness;
        cell.evict(coord - spec.window.length);

        if (spec.continuous) {
            if (spec.window.mode == WindowMode::CountSliding) {
                if (cell.position % slide == 0) {
                    emit_window_close(shard, cell, cell_key, cell.position);
                }
            } else if (old_watermark >= 0) {
                for (std::int64_t end = (old_watermark / slide + 1) * slide;
                     end <= shard.watermark; end += slide) {
                    emit_window_close(shard, cell, cell_key, end);
                }
            }
        }
        return;
    }

    // on-update continuous emission (single-stream and per-stream scopes)
    if (spec.continuous && spec.scope.type != ScopeType::WholeSource) {
        Query q = default_continuous_query(spec, record, stream_key);
        EstimateValue value;
        std::string status = "ok";
        try {
            value = cell.state->estimate(q);
        } catch (const SdeError&) {
            return;  // plugins without a default continuous estimate
        }
        if (std::holds_alternative<std::monostate>(value)) status = "degenerate";
        Response r;
        r.response_id = next_response_id();
        r.request_id = entry->build_request_id;
        r.synopsis_id = spec.synopsis_id;
        r.value = std::move(value);
        r.site_id = config_.site_id;
        r.status = status;
        r.sequence = entry->emission_seq.fetch_add(1, std::memory_order_relaxed);
        r.stream_id = stream_key;
        entry->emissions.fetch_add(1, std::memory_order_relaxed);
        publish_response(r);
    }
}

void Engine::emit_window_close(ShardTask& shard, StateCell& cell, const std::string& cell_key,
                               std::int64_t window_end) {
    const auto entry = shard.entry;
    const SynopsisSpec& spec = entry->spec;
    auto query = window_close_query(spec);
    if (!query) return;
    ++cell.emitted_windows;

    if (spec.scope.type != ScopeType::WholeSource) {
        auto snapshot = cell.snapshot(window_end);
        Response r;
        r.response_id = next_response_id();
        r.request_id = entry->build_request_id;
        r.synopsis_id = spec.synopsis_id;
        r.site_id = config_.site_id;
        try {
            r.value = snapshot->estimate(*query);
            if (std::holds_alternative<std::monostate>(r.value)) r.status = "degenerate";
        } catch (const SdeError&) {
            return;
        }
        r.sequence = entry->emission_seq.fetch_add(1, std::memory_order_relaxed);
        r.stream_id = cell_key;
        entry->emissions.fetch_add(1, std::memory_order_relaxed);
        publish_response(r);
        return;
    }

    // WholeSource: post-merge emission, partials keyed by synopsis and window
    UnionFrame frame;
    frame.origin = config_.site_id;
    frame.merge_key = "cq:" + spec.synopsis_id + ":" + std::to_string(window_end);
    frame.kind = spec.kind_label();
    frame.synopsis_id = spec.synopsis_id;
    frame.payload = cell.snapshot(window_end)->serialize();
    frame.bytes = frame.payload.size();
    union_topic_.publish(frame.to_line());
}

void Engine::emit_partial(ShardTask& shard, const Envelope& env) {
    const auto entry = shard.entry;
    const SynopsisSpec& spec = entry->spec;
    const Request& request = env.request;

    StateCell& cell = shard.cell_for(env.stream_key, spec);
    std::int64_t window_end =
        spec.window.mode == WindowMode::CountSliding ? cell.position : shard.watermark;
    std::unique_ptr<Synopsis> snapshot = cell.snapshot(window_end);

    if (!env.pending) {
        // Case 1: answer directly from this worker
        Response r;
        r.response_id = next_response_id();
        r.request_id = request.request_id;
        r.synopsis_id = spec.synopsis_id;
        r.params_echo = spec.params;
        r.site_id = config_.site_id;
        try {
            r.value = snapshot->estimate(*request.query);
            if (std::holds_alternative<std::monostate>(r.value)) r.status = "degenerate";
        } catch (const SdeError& e) {
            r = error_response(request.request_id, e, config_.site_id);
            r.response_id = next_response_id();
        }
        publish_response(r);
        return;
    }

    // Case 3: route the partial to the local merge lane via the union channel
    UnionFrame frame;
    frame.origin = config_.site_id;
    frame.merge_key = env.pending->merge_key;
    frame.kind = spec.kind_label();
    frame.synopsis_id = spec.synopsis_id;
    frame.payload = snapshot->serialize();
    frame.bytes = frame.payload.size();
    union_topic_.publish(frame.to_line());
}

// ---------------------------------------------------------------------
// merge lane (union channel consumer)

void Engine::union_loop() {
    while (running_) {
        auto line = union_sub_->pop(50);
        if (line) handle_union_line(*line);
        check_merge_timeouts();
        if (!line && union_sub_->closed_and_drained()) break;
    }
}

void Engine::handle_union_line(const std::string& line) {
    UnionFrame frame;
    try {
        frame = UnionFrame::from_line(line);
    } catch (const SdeError&) {
        request_warnings_.fetch_add(1, std::memory_order_relaxed);
        return;
    }

    std::shared_ptr<PendingMerge> pending;
    {
        std::lock_guard lock(pending_mutex_);
        auto it = pending_.find(frame.merge_key);
        if (it != pending_.end()) pending = it->second;
    }
    if (!pending && frame.merge_key.rfind("cq:", 0) == 0) {
        // continuous WholeSource round: register lazily on the first partial
        auto entry = find_entry(frame.synopsis_id);
        if (entry && entry->spec.continuous) {
            auto query = window_close_query(entry->spec);
            if (query) {
                pending = std::make_shared<PendingMerge>();
                pending->request.request_id = entry->build_request_id;
                pending->request.query = *query;
                pending->merge_key = frame.merge_key;
                pending->synopsis_id = frame.synopsis_id;
                pending->params_echo = entry->spec.params;
                pending->expected_local = static_cast<std::uint32_t>(entry->shards.size());
                pending->federated = entry->spec.federation.has_value();
                pending->responsible =
                    pending->federated &&
                    entry->spec.federation->responsible_site == config_.site_id;
                pending->continuous_round = true;
                pending->sequence = entry->emission_seq.fetch_add(1, std::memory_order_relaxed);
                if (pending->responsible) {
                    pending->responsible_site = entry->spec.federation->responsible_site;
                    std::lock_guard lock(peers_mutex_);
                    for (const auto& [site, link] : peers_) pending->expected_sites.insert(site);
                    pending->deadline_ms =
                        config_.clock->now_ms() + config_.federation_timeout_ms;
                } else if (pending->federated) {
                    pending->responsible_site = entry->spec.federation->responsible_site;
                }
                entry->emissions.fetch_add(1, std::memory_order_relaxed);
                std::lock_guard lock(pending_mutex_);
                pending_[frame.merge_key] = pending;
            }
        }
    }
    if (!pending) {
        // late frame after timeout, or for a stopped synopsis: dropped
        request_warnings_.fetch_add(1, std::memory_order_relaxed);
        return;
    }

    try {
        auto state = deserialize_synopsis(frame.payload);
        if (pending->merged) {
            pending->merged->merge(*state);
        } else {
            pending->merged = std::move(state);
        }
    } catch (const SdeError& e) {
        Response r = error_response(pending->request.request_id, e, config_.site_id);
        r.response_id = next_response_id();
        r.synopsis_id = pending->synopsis_id;
        publish_response(r);
        std::lock_guard lock(pending_mutex_);
        pending_.erase(frame.merge_key);
        return;
    }

    if (frame.origin == config_.site_id) {
        ++pending->received_local;
    } else {
        pending->received_sites.insert(frame.origin);
    }

    if (pending->local_done()) {
        if (pending->federated && !pending->responsible) {
            // Case 2: this site's shards are merged; ship one summary frame
            // to the responsible site and finish here.
            splitter_send_to_site(frame.kind, pending->synopsis_id, pending->merge_key,
                                  pending->responsible_site,
                                  pending->merged->serialize_summary(),
                                  pending->request.request_id);
            std::lock_guard lock(pending_mutex_);
            pending_.erase(frame.merge_key);
        } else if (!pending->responsible || pending->remote_done()) {
            complete_merge(*pending);
            std::lock_guard lock(pending_mutex_);
            pending_.erase(frame.merge_key);
        }
    }
}

void Engine::splitter_send_to_site(const std::string& kind, const std::string& synopsis_id,
                                   const std::string& merge_key, const std::string& responsible,
                                   std::vector<std::uint8_t> payload,
                                   const std::string& request_id) {
    UnionFrame frame;
    frame.origin = config_.site_id;
    frame.merge_key = merge_key;
    frame.kind = kind;
    frame.synopsis_id = synopsis_id;
    frame.payload = std::move(payload);
    frame.bytes = frame.payload.size();
    std::string line = frame.to_line();

    PeerSender sender;
    {
        std::lock_guard lock(peers_mutex_);
        auto it = peers_.find(responsible);
        if (it != peers_.end()) sender = it->second.union_line;
    }
    if (!sender) {
        Response r = error_response(request_id,
                                    SdeError(ErrorCode::FederationError,
                                             "unreachable responsible site: " + responsible),
                                    config_.site_id);
        r.response_id = next_response_id();
        r.synopsis_id = synopsis_id;
        publish_response(r);
        return;
    }
    if (ledger_) {
        ledger_->record_frame(synopsis_id, config_.site_id, responsible, line.size() + 1);
    }
    sender(line);
}

void Engine::complete_merge(PendingMerge& pending) {
    Response r;
    r.response_id = next_response_id();
    r.request_id = pending.request.request_id;
    r.synopsis_id = pending.synopsis_id;
    r.params_echo = pending.params_echo;
    r.site_id = config_.site_id;
    try {
        r.value = pending.merged->estimate(*pending.request.query);
        if (std::holds_alternative<std::monostate>(r.value)) r.status = "degenerate";
    } catch (const SdeError& e) {
        r = error_response(pending.request.request_id, e, config_.site_id);
        r.response_id = next_response_id();
        r.synopsis_id = pending.synopsis_id;
    }
    if (pending.continuous_round) r.sequence = pending.sequence;
    publish_response(r);
}

void Engine::check_merge_timeouts() {
    std::vector<std::shared_ptr<PendingMerge>> expired;
    {
        std::lock_guard lock(pending_mutex_);
        const std::int64_t now = config_.clock->now_ms();
        for (auto it = pending_.begin(); it != pending_.end();) {
            auto& p = it->second;
            if (p->deadline_ms > 0 && now >= p->deadline_ms &&
                !(p->local_done() && p->remote_done())) {
                expired.push_back(p);
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (const auto& p : expired) {
        std::string missing;
        for (const auto& site : p->expected_sites) {
            if (!p->received_sites.count(site)) {
                if (!missing.empty()) missing += ", ";
                missing += site;
            }
        }
        if (!p->local_done()) {
            if (!missing.empty()) missing += ", ";
            missing += "local shards";
        }
        Response r = error_response(
            p->request.request_id,
            SdeError(ErrorCode::FederationError, "partial federation: missing " + missing),
            config_.site_id);
        r.response_id = next_response_id();
        r.synopsis_id = p->synopsis_id;
        publish_response(r);
    }
}

// ---------------------------------------------------------------------
// public conveniences

Response Engine::execute(const Request& request, std::int64_t timeout_ms) {
    auto sub = output_topic_.subscribe();
    request_topic_.publish(format_request(request));
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (std::chrono::steady_clock::now() < deadline) {
        auto line = sub->pop(50);
        if (!line) continue;
        try {
            Response r = parse_response(*line);
            if (r.request_id == request.request_id && !r.sequence) {
                output_topic_.unsubscribe(sub);
                return r;
            }
        } catch (const SdeError&) {
            // a status report or other line shape; skip
        }
    }
    output_topic_.unsubscribe(sub);
    throw SdeError(ErrorCode::IoError, "timed out waiting for response to " + request.request_id);
}

void Engine::set_peer(const std::string& site_id, PeerLink link) {
    std::lock_guard lock(peers_mutex_);
    peers_[site_id] = std::move(link);
}

void Engine::set_ledger(std::shared_ptr<CommLedger> ledger) { ledger_ = std::move(ledger); }

std::vector<std::string> Engine::peer_sites() const {
    std::lock_guard lock(peers_mutex_);
    std::vector<std::string> out;
    for (const auto& [site, link] : peers_) out.push_back(site);
    return out;
}

std::vector<std::uint64_t> Engine::shard_items_seen(const std::string& synopsis_id) const {
    auto entry = find_entry(synopsis_id);
    if (!entry) throw SdeError(ErrorCode::ProtocolError, "unknown synopsis: " + synopsis_id);
    std::vector<std::uint64_t> out;
    for (const auto& shard : entry->shards) {
        out.push_back(shard->items.load(std::memory_order_relaxed));
    }
    return out;
}

bool Engine::is_live(const std::string& synopsis_id) const {
    return find_entry(synopsis_id) != nullptr;
}

std::uint64_t Engine::continuous_emissions(const std::string& synopsis_id) const {
    auto entry = find_entry(synopsis_id);
    if (!entry) return 0;
    return entry->emissions.load(std::memory_order_relaxed);
}

}  // namespace sde
