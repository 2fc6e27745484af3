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

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sde/bench/capacity.hpp"
#include "sde/bench/workflow.hpp"
#include "sde/engine.hpp"
#include "sde/federation.hpp"
#include "sde/net.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

int cmd_serve(const std::string& data_addr, const std::string& request_addr,
              const std::string& output_addr, const std::string& union_addr,
              unsigned workers, const std::string& site_id, const std::string& peers_file,
              const std::string& data_file, const std::string& request_file) {
    sde::EngineConfig config;
    config.workers = workers;
    config.site_id = site_id;
    sde::Engine engine(config);

    std::vector<std::unique_ptr<sde::TcpLineServer>> servers;
    servers.push_back(
        sde::TcpLineServer::ingress(engine.data_topic(), sde::Address::parse(data_addr)));
    servers.push_back(
        sde::TcpLineServer::ingress(engine.request_topic(), sde::Address::parse(request_addr)));
    servers.push_back(
        sde::TcpLineServer::egress(engine.output_topic(), sde::Address::parse(output_addr)));
    servers.push_back(
        sde::TcpLineServer::ingress(engine.union_topic(), sde::Address::parse(union_addr)));

    std::vector<std::shared_ptr<sde::TcpLineClient>> peer_clients;
    if (!peers_file.empty()) {
        auto sites = sde::SiteConfig::from_peers_file(peers_file, site_id);
        for (const auto& [peer, address] : sites.peers) {
            // peers expose a union listener; requests ride the same link on
            // the peer's request port convention: union port from the file,
            // request port = union port - 2 (matching the default layout)
            auto union_address = sde::Address::parse(address);
            sde::Address request_address = union_address;
            request_address.port = static_cast<std::uint16_t>(union_address.port - 2);
            sde::Engine::PeerLink link;
            link.union_line = [union_address](const std::string& line) {
                thread_local std::map<std::uint16_t, std::shared_ptr<sde::TcpLineClient>> conns;
                auto& conn = conns[union_address.port];
                if (!conn) conn = std::make_shared<sde::TcpLineClient>(union_address);
                conn->send_line(line);
            };
            link.request_line = [request_address](const std::string& line) {
                thread_local std::map<std::uint16_t, std::shared_ptr<sde::TcpLineClient>> conns;
                auto& conn = conns[request_address.port];
                if (!conn) conn = std::make_shared<sde::TcpLineClient>(request_address);
                conn->send_line(line);
            };
            engine.set_peer(peer, std::move(link));
        }
    }

    // optional file replay before serving live traffic
    auto replay = [&](const std::string& path, sde::Topic& topic) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) {
            std::cerr << "cannot open replay file: " << path << "\n";
            return;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) topic.publish(line);
        }
    };
    replay(request_file, engine.request_topic());
    replay(data_file, engine.data_topic());

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "sde serving: data=" << servers[0]->port() << " request=" << servers[1]->port()
              << " output=" << servers[2]->port() << " union=" << servers[3]->port()
              << " site=" << site_id << " workers=" << workers << std::endl;
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    for (auto& server : servers) server->stop();
    engine.stop();
    return 0;
}

int cmd_request(const std::string& file, const std::string& request_addr,
                const std::string& output_addr, std::int64_t timeout_ms) {
    std::istream* in = &std::cin;
    std::ifstream file_in;
    if (file != "-") {
        file_in.open(file);
        if (!file_in) {
            std::cerr << "cannot open " << file << "\n";
            return 1;
        }
        in = &file_in;
    }

    sde::TcpLineClient output(sde::Address::parse(output_addr));
    sde::TcpLineClient request(sde::Address::parse(request_addr));

    std::vector<std::string> ids;
    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty()) continue;
        try {
            sde::Request parsed = sde::parse_request(line);
            ids.push_back(parsed.request_id);
        } catch (const sde::SdeError&) {
            ids.push_back("");  // still submitted; the engine answers with an error
        }
        request.send_line(line);
    }

    std::size_t answered = 0;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (answered < ids.size() && std::chrono::steady_clock::now() < deadline) {
        auto response = output.read_line(200);
        if (!response) continue;
        std::cout << *response << std::endl;
        ++answered;
    }
    return answered == ids.size() ? 0 : 2;
}

int cmd_status(const std::string& request_addr, const std::string& output_addr) {
    sde::TcpLineClient output(sde::Address::parse(output_addr));
    sde::TcpLineClient request(sde::Address::parse(request_addr));
    sde::Request status;
    status.request_id = "cli-status";
    status.verb = sde::Verb::Status;
    request.send_line(sde::format_request(status));
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    while (std::chrono::steady_clock::now() < deadline) {
        auto line = output.read_line(200);
        if (!line) continue;
        if (line->find("\"cli-status\"") != std::string::npos) {
            std::cout << *line << std::endl;
            return 0;
        }
    }
    std::cerr << "no status response\n";
    return 2;
}

void write_correlation_csv(std::ostream& out,
                           const std::vector<sde::bench::StrategyResult>& results) {
    out << "strategy,tuples,wall_seconds,throughput,pairs_compared,sweeps,pairs_emitted\n";
    for (const auto& r : results) {
        out << sde::bench::strategy_name(r.strategy) << ',' << r.tuples << ',' << r.wall_seconds
            << ',' << r.throughput << ',' << r.pairs_compared << ',' << r.sweeps << ','
            << r.emitted.size() << "\n";
    }
}

void write_clustering_csv(std::ostream& out,
                          const std::vector<sde::bench::ClusteringResult>& results) {
    out << "strategy,tuples,wall_seconds,throughput,solution_cost,coreset_size,full_points\n";
    for (const auto& r : results) {
        out << sde::bench::strategy_name(r.strategy) << ',' << r.tuples << ',' << r.wall_seconds
            << ',' << r.throughput << ',' << r.solution_cost << ',' << r.coreset_size << ','
            << r.full_points << "\n";
    }
}

void write_capacity_csv(std::ostream& out, const std::vector<sde::bench::CapacityRow>& rows) {
    out << "n,sdeaas_throughput,jobs_throughput,jobs_refused\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.sdeaas_throughput << ',' << r.jobs_throughput << ','
            << (r.jobs_refused ? "yes" : "no") << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sde: a synopses data engine service"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "run the engine with TCP channel listeners");
    std::string data_addr = ":9001", request_addr = ":9002", output_addr = ":9003",
                union_addr = ":9004", site_id = "local", peers_file, data_file, request_file;
    unsigned workers = 2;
    serve->add_option("--data", data_addr, "Data channel listener")->envname("SDE_DATA");
    serve->add_option("--request", request_addr, "Request channel listener")
        ->envname("SDE_REQUEST");
    serve->add_option("--output", output_addr, "Output channel listener")->envname("SDE_OUTPUT");
    serve->add_option("--union", union_addr, "Union channel listener")->envname("SDE_UNION");
    serve->add_option("--workers", workers, "worker task count")->envname("SDE_WORKERS");
    serve->add_option("--site-id", site_id, "federation site id")->envname("SDE_SITE_ID");
    serve->add_option("--peers", peers_file, "peers file: `site_id address` lines")
        ->envname("SDE_PEERS");
    serve->add_option("--data-file", data_file, "replay a data NDJSON file at startup")
        ->envname("SDE_DATA_FILE");
    serve->add_option("--request-file", request_file, "replay a request NDJSON file at startup")
        ->envname("SDE_REQUEST_FILE");

    // request
    auto* request_cmd = app.add_subcommand("request", "submit request snippets from a file");
    std::string request_path = "-";
    std::string req_addr = "127.0.0.1:9002", out_addr = "127.0.0.1:9003";
    std::int64_t timeout_ms = 30000;
    request_cmd->add_option("file", request_path, "NDJSON request file, or - for stdin");
    request_cmd->add_option("--request-addr", req_addr, "engine request address")
        ->envname("SDE_REQUEST_ADDR");
    request_cmd->add_option("--output-addr", out_addr, "engine output address")
        ->envname("SDE_OUTPUT_ADDR");
    request_cmd->add_option("--timeout-ms", timeout_ms, "response wait budget");

    // status
    auto* status_cmd = app.add_subcommand("status", "print the engine status report");
    status_cmd->add_option("--request-addr", req_addr, "engine request address")
        ->envname("SDE_REQUEST_ADDR");
    status_cmd->add_option("--output-addr", out_addr, "engine output address")
        ->envname("SDE_OUTPUT_ADDR");

    // bench
    auto* bench = app.add_subcommand("bench", "workflow benchmarks");
    bench->require_subcommand(1);
    std::size_t streams = 50;
    unsigned bench_workers = 4;
    std::string strategy_opt = "all";
    std::uint64_t seed = 1;
    std::string out_path;
    std::size_t k = 4, bucket = 10, slot_budget = 40;
    double threshold = 0.9;

    auto* corr = bench->add_subcommand("correlation", "DFT-grid correlation workflow");
    corr->add_option("--streams", streams, "monitored streams");
    corr->add_option("--workers", bench_workers, "parallel workers");
    corr->add_option("--strategy", strategy_opt, "Naive|ParallelOnly|SynopsisOnly|SynopsisPlusParallel|all");
    corr->add_option("--seed", seed, "generator seed");
    corr->add_option("--threshold", threshold, "correlation threshold");
    corr->add_option("--out", out_path, "CSV output path");

    auto* clus = bench->add_subcommand("clustering", "coreset k-means workflow");
    clus->add_option("--streams", streams, "monitored streams");
    clus->add_option("--workers", bench_workers, "parallel workers");
    clus->add_option("--strategy", strategy_opt, "strategy or all");
    clus->add_option("--seed", seed, "generator seed");
    clus->add_option("--k", k, "cluster count");
    clus->add_option("--bucket", bucket, "coreset bucket size");
    clus->add_option("--out", out_path, "CSV output path");

    auto* cap = bench->add_subcommand("capacity", "SDEaaS vs job-per-synopsis");
    cap->add_option("--streams", streams, "distinct streams");
    cap->add_option("--workers", bench_workers, "engine workers");
    cap->add_option("--slot-budget", slot_budget, "non-SDEaaS task slots");
    cap->add_option("--seed", seed, "generator seed");
    cap->add_option("--out", out_path, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            return cmd_serve(data_addr, request_addr, output_addr, union_addr, workers, site_id,
                             peers_file, data_file, request_file);
        }
        if (*request_cmd) return cmd_request(request_path, req_addr, out_addr, timeout_ms);
        if (*status_cmd) return cmd_status(req_addr, out_addr);

        std::ofstream csv;
        std::ostream* out = &std::cout;
        if (!out_path.empty()) {
            csv.open(out_path);
            out = &csv;
        }
        if (*corr) {
            std::vector<sde::bench::StrategyResult> results;
            std::vector<sde::bench::Strategy> strategies;
            if (strategy_opt == "all") {
                strategies = {sde::bench::Strategy::Naive, sde::bench::Strategy::ParallelOnly,
                              sde::bench::Strategy::SynopsisOnly,
                              sde::bench::Strategy::SynopsisPlusParallel};
            } else {
                strategies = {sde::bench::strategy_from_name(strategy_opt)};
            }
            for (auto strategy : strategies) {
                sde::bench::WorkflowConfig config;
                config.n_streams = streams;
                config.workers =
                    strategy == sde::bench::Strategy::Naive ? 1 : bench_workers;
                config.threshold = threshold;
                config.seed = seed;
                results.push_back(sde::bench::run_workflow(strategy, config));
            }
            write_correlation_csv(*out, results);
        } else if (*clus) {
            std::vector<sde::bench::ClusteringResult> results;
            std::vector<sde::bench::Strategy> strategies;
            if (strategy_opt == "all") {
                strategies = {sde::bench::Strategy::Naive, sde::bench::Strategy::ParallelOnly,
                              sde::bench::Strategy::SynopsisOnly,
                              sde::bench::Strategy::SynopsisPlusParallel};
            } else {
                strategies = {sde::bench::strategy_from_name(strategy_opt)};
            }
            for (auto strategy : strategies) {
                sde::bench::ClusteringConfig config;
                config.n_streams = streams;
                config.workers =
                    strategy == sde::bench::Strategy::Naive ? 1 : bench_workers;
                config.k = k;
                config.bucket_size = bucket;
                config.seed = seed;
                results.push_back(sde::bench::run_clustering_workflow(strategy, config));
            }
            write_clustering_csv(*out, results);
        } else if (*cap) {
            sde::bench::CapacityConfig config;
            config.n_streams = streams;
            config.engine_workers = bench_workers;
            config.slot_budget = slot_budget;
            config.refusal_probe = slot_budget + 1;
            config.seed = seed;
            write_capacity_csv(*out, sde::bench::run_sdeaas_vs_jobs(config));
        }
    } catch (const sde::SdeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
