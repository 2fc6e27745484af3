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
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "sde/channel.hpp"

namespace sde {

// "host:port" or ":port" (all interfaces). Port 0 asks the OS for one.
struct Address {
    std::string host = "0.0.0.0";
    std::uint16_t port = 0;

    static Address parse(const std::string& text);
};

// Bridges one engine channel to TCP. Ingress servers publish every client
// line to the topic; egress servers stream the topic to every client.
class TcpLineServer {
public:
    static std::unique_ptr<TcpLineServer> ingress(Topic& topic, const Address& address);
    static std::unique_ptr<TcpLineServer> egress(Topic& topic, const Address& address);

    ~TcpLineServer();
    std::uint16_t port() const noexcept { return port_; }
    void stop();

private:
    TcpLineServer(Topic& topic, const Address& address, bool is_ingress);
    void accept_loop();
    void serve_ingress(int fd);
    void serve_egress(int fd);

    Topic& topic_;
    bool ingress_ = true;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{true};
    std::thread accept_thread_;
    std::mutex clients_mutex_;
    std::vector<int> client_fds_;
    std::vector<std::thread> client_threads_;
};

// Blocking line-oriented client with a bounded reconnect retry on send.
class TcpLineClient {
public:
    explicit TcpLineClient(const Address& address);
    ~TcpLineClient();

    // One reconnect attempt after `backoff_ms` before giving up (IoError).
    void send_line(const std::string& line, int backoff_ms = 200);
    std::optional<std::string> read_line(std::int64_t timeout_ms);
    void close();

private:
    void connect_once();

    Address address_;
    int fd_ = -1;
    std::string buffer_;
    std::mutex mutex_;
};

}  // namespace sde
