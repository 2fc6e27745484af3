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

#include "sde/bench/capacity.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "sde/bench/generator.hpp"
#include "sde/channel.hpp"
#include "sde/engine.hpp"
#include "sde/protocol.hpp"
#include "sde/synopsis.hpp"

namespace sde::bench {

namespace {
using WallClock = std::chrono::steady_clock;

SynopsisSpec capacity_spec(std::size_t index, std::size_t n_streams, std::uint64_t seed) {
    SynopsisSpec spec;
    spec.synopsis_id = "cm-" + std::to_string(index);
    spec.kind = SynopsisKind::CountMin;
    spec.dataset_id = "stocks";
    spec.scope = Scope::single_stream(stream_name(index % n_streams));
    spec.key_field = 0;
    spec.value_fields = {1, 2};  // price, volume pairs
    spec.params = {{"epsilon", 0.01}, {"delta", 0.05}, {"seed", static_cast<double>(seed)}};
    spec.parallelism = 1;
    return spec;
}
}  // namespace

struct JobPool::Job {
    SynopsisSpec spec;
    Topic queue{"job", 4096};
    std::shared_ptr<Topic::Sub> sub;
    std::unique_ptr<Synopsis> state;
    std::atomic<std::uint64_t> consumed{0};
    std::atomic<std::uint64_t> updated{0};
    std::thread thread;
    std::atomic<bool> running{true};

    explicit Job(const SynopsisSpec& s) : spec(s), state(make_synopsis(s)) {
        sub = queue.subscribe();
        thread = std::thread([this] { run(); });
    }

    void run() {
        while (running) {
            auto line = sub->pop(20);
            if (!line) {
                if (sub->closed_and_drained()) break;
                continue;
            }
            try {
                StreamRecord record = parse_record(*line);
                // every job re-parses and filters its duplicated copy alone
                if (record.stream_id == spec.scope.stream_id) {
                    state->add(record, spec.value_fields);
                    updated.fetch_add(1, std::memory_order_relaxed);
                }
            } catch (const SdeError&) {
            }
            consumed.fetch_add(1, std::memory_order_relaxed);
        }
    }

    void stop() {
        running = false;
        queue.close();
        if (thread.joinable()) thread.join();
    }
};

JobPool::JobPool(std::size_t slot_budget) : slot_budget_(slot_budget) {}

JobPool::~JobPool() { stop(); }

bool JobPool::submit(const SynopsisSpec& spec) {
    if (jobs_.size() >= slot_budget_) return false;  // task slots depleted
    jobs_.push_back(std::make_unique<Job>(spec));
    return true;
}

void JobPool::feed(const std::vector<StreamRecord>& records) {
    std::vector<std::uint64_t> target(jobs_.size());
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
        target[j] = jobs_[j]->consumed.load(std::memory_order_relaxed) + records.size();
    }
    for (const StreamRecord& record : records) {
        std::string line = format_record(record);
        for (auto& job : jobs_) job->queue.publish(line);
    }
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
        while (jobs_[j]->consumed.load(std::memory_order_relaxed) < target[j]) {
            std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
    }
}

std::size_t JobPool::jobs() const noexcept { return jobs_.size(); }

std::uint64_t JobPool::processed() const noexcept {
    std::uint64_t total = 0;
    for (const auto& job : jobs_) total += job->updated.load(std::memory_order_relaxed);
    return total;
}

void JobPool::stop() {
    for (auto& job : jobs_) job->stop();
    jobs_.clear();
}

std::vector<CapacityRow> run_sdeaas_vs_jobs(const CapacityConfig& config) {
    GeneratorConfig gen;
    gen.n_streams = config.n_streams;
    gen.seed = config.seed;
    gen.level1_rate_hz = 2.0;
    gen.bids_per_trade = 2.0;
    gen.duration_ms = 60'000;
    auto records = generate(gen);
    if (records.size() > config.records) records.resize(config.records);

    std::vector<CapacityRow> rows;
    for (std::size_t checkpoint : config.checkpoints) {
        CapacityRow row;
        row.n = checkpoint;
        rows.push_back(row);
    }

    // --- SDEaaS: one engine, synopses added on the fly ---
    {
        EngineConfig ec;
        ec.workers = config.engine_workers;
        ec.site_id = "capacity";
        Engine engine(ec);
        std::size_t built = 0;
        for (CapacityRow& row : rows) {
            while (built < row.n) {
                Request request;
                request.request_id = "cap-build-" + std::to_string(built);
                request.verb = Verb::Build;
                request.spec = capacity_spec(built, config.n_streams, config.seed);
                Response ack = engine.execute(request);
                if (ack.status != "ok") {
                    throw SdeError(ErrorCode::Internal,
                                   "capacity build failed: " + ack.error->message);
                }
                ++built;
            }
            auto t0 = WallClock::now();
            for (const StreamRecord& record : records) engine.ingest(record);
            // barrier: queries drain behind the data in shard FIFOs
            Request sync;
            sync.request_id = "cap-sync-" + std::to_string(row.n);
            sync.verb = Verb::AdHocQuery;
            sync.target = "cm-0";
            sync.query = FrequencyQuery{{std::string("x")}};
            engine.execute(sync);
            double secs = std::chrono::duration<double>(WallClock::now() - t0).count();
            row.sdeaas_throughput = static_cast<double>(records.size()) / secs;
        }
        engine.stop();
    }

    // --- non-SDEaaS: one job (task slot) per synopsis, streams duplicated ---
    {
        JobPool pool(config.slot_budget);
        std::size_t submitted = 0;
        for (CapacityRow& row : rows) {
            while (submitted < row.n) {
                if (!pool.submit(capacity_spec(submitted, config.n_streams, config.seed))) {
                    row.jobs_refused = true;
                    break;
                }
                ++submitted;
            }
            if (row.jobs_refused) continue;
            auto t0 = WallClock::now();
            pool.feed(records);
            double secs = std::chrono::duration<double>(WallClock::now() - t0).count();
            row.jobs_throughput = static_cast<double>(records.size()) / secs;
        }

        CapacityRow probe;
        probe.n = config.refusal_probe;
        probe.jobs_refused =
            !pool.submit(capacity_spec(config.refusal_probe - 1, config.n_streams, config.seed));
        rows.push_back(probe);
        pool.stop();
    }

    return rows;
}

}  // namespace sde::bench
