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

#include "sde/bench/workflow.hpp"

#include <chrono>
#include <mutex>
#include <thread>

#include "sde/engine.hpp"
#include "sde/series.hpp"

namespace sde::bench {

namespace {

using Clock = std::chrono::steady_clock;

bool uses_synopsis(Strategy s) {
    return s == Strategy::SynopsisOnly || s == Strategy::SynopsisPlusParallel;
}

bool uses_parallelism(Strategy s) {
    return s == Strategy::ParallelOnly || s == Strategy::SynopsisPlusParallel;
}

// Ring buffers of the last W joined bid counts per stream.
struct StreamWindows {
    std::size_t window;
    std::vector<std::vector<double>> buffers;
    std::vector<std::size_t> next;
    std::vector<std::uint64_t> pushes;

    StreamWindows(std::size_t streams, std::size_t w)
        : window(w), buffers(streams, std::vector<double>(w, 0.0)), next(streams, 0),
          pushes(streams, 0) {}

    void push(std::size_t stream, double value) {
        buffers[stream][next[stream]] = value;
        next[stream] = (next[stream] + 1) % window;
        ++pushes[stream];
    }

    bool full(std::size_t stream) const { return pushes[stream] >= window; }

    std::vector<double> ordered(std::size_t stream) const {
        std::vector<double> out(window);
        for (std::size_t k = 0; k < window; ++k) {
            out[k] = buffers[stream][(next[stream] + k) % window];
        }
        return out;
    }
};

// Split -> Filter -> Count -> Join frontend shared by every strategy.
// Calls `on_joined(stream_index, trade_time, bid_count)` per Level 1 trade.
template <typename OnJoined>
std::uint64_t run_frontend(const std::vector<StreamRecord>& records, double min_bid_volume,
                           std::size_t n_streams, OnJoined&& on_joined) {
    std::vector<double> bid_count(n_streams, 0);
    std::uint64_t tuples = 0;
    for (const StreamRecord& rec : records) {
        ++tuples;
        std::size_t stream = 0;
        // stream ids are generator-shaped: "S%04zu"
        stream = static_cast<std::size_t>(std::stoul(rec.stream_id.substr(1)));
        const std::string& level = std::get<std::string>(rec.values[0]);
        if (level == "2") {
            double bid_volume = std::get<double>(rec.values[4]);
            if (bid_volume >= min_bid_volume) bid_count[stream] += 1;  // Filter + Count
        } else {
            on_joined(stream, rec.event_time_ms, bid_count[stream]);  // Project + Join
            bid_count[stream] = 0;
        }
    }
    return tuples;
}

GeneratorConfig workflow_generator(std::size_t n_streams, std::size_t ticks,
                                   std::uint64_t seed) {
    GeneratorConfig gen;
    gen.n_streams = n_streams;
    gen.seed = seed;
    gen.level1_rate_hz = 1.0;
    gen.duration_ms = static_cast<std::int64_t>(ticks) * 1000;
    return gen;
}

// All-pairs Pearson over full windows, split across `threads`.
void exact_sweep(const StreamWindows& windows,
                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double threshold,
                 std::size_t threads, std::uint64_t* compared,
                 std::set<std::pair<std::string, std::string>>* emitted, std::mutex* emit_mutex) {
    auto worker = [&](std::size_t from, std::size_t to) {
        std::set<std::pair<std::string, std::string>> local;
        for (std::size_t i = from; i < to; ++i) {
            auto [a, b] = pairs[i];
            auto wa = windows.ordered(a);
            auto wb = windows.ordered(b);
            if (pearson(wa, wb) >= threshold) {
                local.emplace(stream_name(a), stream_name(b));
            }
        }
        if (!local.empty()) {
            std::lock_guard lock(*emit_mutex);
            emitted->insert(local.begin(), local.end());
        }
    };
    *compared += pairs.size();
    if (threads <= 1 || pairs.size() < 64) {
        worker(0, pairs.size());
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (pairs.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t from = t * chunk;
        std::size_t to = std::min(pairs.size(), from + chunk);
        if (from < to) pool.emplace_back(worker, from, to);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

const char* strategy_name(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::Naive: return "Naive";
        case Strategy::ParallelOnly: return "ParallelOnly";
        case Strategy::SynopsisOnly: return "SynopsisOnly";
        case Strategy::SynopsisPlusParallel: return "SynopsisPlusParallel";
    }
    return "Naive";
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::Naive, Strategy::ParallelOnly, Strategy::SynopsisOnly,
                       Strategy::SynopsisPlusParallel}) {
        if (name == strategy_name(s)) return s;
    }
    throw SdeError(ErrorCode::ParamError, "unknown strategy: " + name);
}

StrategyResult run_workflow(Strategy strategy, const WorkflowConfig& config) {
    if (strategy == Strategy::Naive && config.workers > 1) {
        throw SdeError(ErrorCode::ParamError, "Naive is sequential; workers must be 1");
    }
    const std::size_t ticks =
        config.ticks ? config.ticks : config.window + 4 * config.sweeps;
    auto records = generate(workflow_generator(config.n_streams, ticks, config.seed));

    StrategyResult result;
    result.strategy = strategy;

    const std::size_t threads = uses_parallelism(strategy) ? config.workers : 1;
    const std::size_t sweep_every =
        std::max<std::size_t>(1, config.n_streams * ((ticks > config.window)
                                                         ? (ticks - config.window) / config.sweeps
                                                         : 1));

    StreamWindows windows(config.n_streams, config.window);
    std::mutex emit_mutex;

    std::unique_ptr<Engine> engine;
    std::string request_counter_base = "wf";
    std::uint64_t request_counter = 0;
    if (uses_synopsis(strategy)) {
        EngineConfig ec;
        ec.workers = uses_parallelism(strategy) ? config.workers : 1;
        ec.site_id = "bench";
        engine = std::make_unique<Engine>(ec);

        SynopsisSpec spec;
        spec.synopsis_id = "wf-dft";
        spec.kind = SynopsisKind::DFT;
        spec.dataset_id = "bidcounts";
        spec.scope = Scope::per_stream();
        spec.key_field = 0;
        spec.value_fields = {0};
        spec.params = {{"threshold", config.threshold},
                       {"coefficients", static_cast<double>(config.coefficients)},
                       {"gridCoefficients", static_cast<double>(config.grid_coefficients)},
                       {"seed", static_cast<double>(config.seed)}};
        spec.parallelism = ec.workers;
        spec.window = {WindowMode::CountSliding, static_cast<std::int64_t>(config.window), 1, 0};

        Request build;
        build.request_id = "wf-build";
        build.verb = Verb::Build;
        build.spec = spec;
        Response ack = engine->execute(build);
        if (ack.status != "ok") {
            throw SdeError(ErrorCode::Internal, "workflow DFT build failed");
        }
    }

    auto started = Clock::now();
    std::uint64_t joined = 0;

    auto sweep = [&]() {
        ++result.sweeps;
        if (!uses_synopsis(strategy)) {
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            for (std::size_t a = 0; a < config.n_streams; ++a) {
                if (!windows.full(a)) continue;
                for (std::size_t b = a + 1; b < config.n_streams; ++b) {
                    if (windows.full(b)) pairs.emplace_back(a, b);
                }
            }
            exact_sweep(windows, pairs, config.threshold, threads, &result.pairs_compared,
                        &result.emitted, &emit_mutex);
            return;
        }

        // DFT grid: candidates from the engine, exact checks inside buckets
        Request query;
        query.request_id = request_counter_base + "-" + std::to_string(request_counter++);
        query.verb = Verb::AdHocQuery;
        query.target = "wf-dft";
        query.query = CorrelatedPairsQuery{config.threshold};
        Response response = engine->execute(query, 60000);
        if (response.status == "error") {
            throw SdeError(ErrorCode::Internal,
                           "workflow DFT query failed: " + response.error->message);
        }
        const auto* pairs = std::get_if<std::vector<PairScore>>(&response.value);
        if (!pairs) return;  // degenerate: nothing comparable yet
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        candidates.reserve(pairs->size());
        for (const PairScore& p : *pairs) {
            candidates.emplace_back(std::stoul(p.a.substr(1)), std::stoul(p.b.substr(1)));
        }
        exact_sweep(windows, candidates, config.threshold, threads, &result.pairs_compared,
                    &result.emitted, &emit_mutex);
    };

    result.tuples = run_frontend(
        records, config.min_bid_volume, config.n_streams,
        [&](std::size_t stream, std::int64_t at_ms, double count) {
            windows.push(stream, count);
            if (engine) {
                StreamRecord joined_rec;
                joined_rec.dataset_id = "bidcounts";
                joined_rec.stream_id = stream_name(stream);
                joined_rec.event_time_ms = at_ms;
                joined_rec.values = {count};
                engine->data_topic().publish(format_record(joined_rec));
            }
            ++joined;
            if (joined % sweep_every == 0 && joined >= config.n_streams * config.window) {
                sweep();
            }
        });

    result.wall_seconds =
        std::chrono::duration<double>(Clock::now() - started).count();
    result.throughput = result.wall_seconds > 0
                            ? static_cast<double>(result.tuples) / result.wall_seconds
                            : 0;
    if (engine) engine->stop();
    return result;
}

ClusteringResult run_clustering_workflow(Strategy strategy, const ClusteringConfig& config) {
    if (config.k > config.n_streams) {
        throw SdeError(ErrorCode::ParamError, "k exceeds the stream count");
    }
    if (strategy == Strategy::Naive && config.workers > 1) {
        throw SdeError(ErrorCode::ParamError, "Naive is sequential; workers must be 1");
    }
    const std::size_t ticks =
        config.ticks ? config.ticks : config.dimension + 4 * config.sweeps;
    auto records = generate(workflow_generator(config.n_streams, ticks, config.seed));

    ClusteringResult result;
    result.strategy = strategy;
    const std::size_t threads = uses_parallelism(strategy) ? config.workers : 1;
    const std::size_t sweep_every = std::max<std::size_t>(
        1, config.n_streams * ((ticks > config.dimension)
                                   ? (ticks - config.dimension) / config.sweeps
                                   : 1));

    StreamWindows windows(config.n_streams, config.dimension);
    std::vector<WeightedPoint> full_points;

    std::unique_ptr<Engine> engine;
    std::uint64_t request_counter = 0;
    if (uses_synopsis(strategy)) {
        EngineConfig ec;
        ec.workers = uses_parallelism(strategy) ? config.workers : 1;
        ec.site_id = "bench";
        engine = std::make_unique<Engine>(ec);

        SynopsisSpec spec;
        spec.synopsis_id = "wf-coreset";
        spec.kind = SynopsisKind::CoreSetTree;
        spec.dataset_id = "points";
        spec.scope = Scope::whole_source();
        spec.key_field = 0;
        spec.value_fields.resize(config.dimension);
        for (std::size_t d = 0; d < config.dimension; ++d) spec.value_fields[d] = d;
        spec.params = {{"bucketSize", static_cast<double>(config.bucket_size)},
                       {"dimension", static_cast<double>(config.dimension)},
                       {"seed", static_cast<double>(config.seed)}};
        spec.parallelism = ec.workers;

        Request build;
        build.request_id = "cl-build";
        build.verb = Verb::Build;
        build.spec = spec;
        Response ack = engine->execute(build);
        if (ack.status != "ok") {
            throw SdeError(ErrorCode::Internal, "workflow coreset build failed");
        }
    }

    auto started = Clock::now();
    std::uint64_t joined = 0;

    auto cluster_now = [&]() {
        if (!uses_synopsis(strategy)) {
            auto solution = weighted_kmeans(full_points, config.k, config.seed, 25, 2, threads);
            result.centers = std::move(solution.centers);
            return;
        }
        Request query;
        query.request_id = "cl-q-" + std::to_string(request_counter++);
        query.verb = Verb::AdHocQuery;
        query.target = "wf-coreset";
        query.query = CoresetQuery{};
        Response response = engine->execute(query, 60000);
        const auto* coreset = std::get_if<std::vector<WeightedPoint>>(&response.value);
        if (!coreset || coreset->empty()) return;
        result.coreset_size = coreset->size();
        auto solution = weighted_kmeans(*coreset, config.k, config.seed, 25, 2, 1);
        result.centers = std::move(solution.centers);
    };

    result.tuples = run_frontend(
        records, 0.0, config.n_streams,
        [&](std::size_t stream, std::int64_t at_ms, double count) {
            windows.push(stream, count);
            ++joined;
            if (windows.full(stream) && windows.pushes[stream] % config.dimension == 0) {
                WeightedPoint p{windows.ordered(stream), 1.0};
                full_points.push_back(p);
                if (engine) {
                    StreamRecord rec;
                    rec.dataset_id = "points";
                    rec.stream_id = stream_name(stream);
                    rec.event_time_ms = at_ms;
                    rec.values.assign(p.coords.begin(), p.coords.end());
                    engine->data_topic().publish(format_record(rec));
                }
            }
            if (joined % sweep_every == 0 && !full_points.empty()) {
                cluster_now();
            }
        });
    if (result.centers.empty()) cluster_now();

    result.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    result.throughput = result.wall_seconds > 0
                            ? static_cast<double>(result.tuples) / result.wall_seconds
                            : 0;
    result.full_points = full_points.size();
    if (!result.centers.empty()) {
        result.solution_cost = clustering_cost(full_points, result.centers);
    }
    if (engine) engine->stop();
    return result;
}

}  // namespace sde::bench
