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

#include "sde/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

#include "sde/error.hpp"

namespace sde {

Address Address::parse(const std::string& text) {
    Address address;
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw SdeError(ErrorCode::ParamError, "address must look like host:port or :port");
    }
    if (colon > 0) address.host = text.substr(0, colon);
    if (address.host.empty()) address.host = "0.0.0.0";
    address.port = static_cast<std::uint16_t>(std::stoi(text.substr(colon + 1)));
    return address;
}

namespace {

int open_listener(const Address& address) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw SdeError(ErrorCode::IoError, "socket() failed");
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(address.port);
    if (::inet_pton(AF_INET, address.host.c_str(), &addr.sin_addr) != 1) {
        addr.sin_addr.s_addr = INADDR_ANY;
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd);
        throw SdeError(ErrorCode::IoError,
                       "bind failed on " + address.host + ":" + std::to_string(address.port));
    }
    if (::listen(fd, 64) < 0) {
        ::close(fd);
        throw SdeError(ErrorCode::IoError, "listen failed");
    }
    return fd;
}

int connect_to(const Address& address) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw SdeError(ErrorCode::IoError, "socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(address.port);
    std::string host = address.host == "0.0.0.0" ? "127.0.0.1" : address.host;
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        hostent* ent = ::gethostbyname(host.c_str());
        if (!ent) {
            ::close(fd);
            throw SdeError(ErrorCode::IoError, "cannot resolve " + host);
        }
        std::memcpy(&addr.sin_addr, ent->h_addr_list[0], sizeof(addr.sin_addr));
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd);
        throw SdeError(ErrorCode::IoError,
                       "connect failed to " + host + ":" + std::to_string(address.port));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return fd;
}

bool write_all(int fd, const char* data, std::size_t len) {
    while (len > 0) {
        ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n <= 0) return false;
        data += n;
        len -= static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

TcpLineServer::TcpLineServer(Topic& topic, const Address& address, bool is_ingress)
    : topic_(topic), ingress_(is_ingress) {
    listen_fd_ = open_listener(address);
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

std::unique_ptr<TcpLineServer> TcpLineServer::ingress(Topic& topic, const Address& address) {
    return std::unique_ptr<TcpLineServer>(new TcpLineServer(topic, address, true));
}

std::unique_ptr<TcpLineServer> TcpLineServer::egress(Topic& topic, const Address& address) {
    return std::unique_ptr<TcpLineServer>(new TcpLineServer(topic, address, false));
}

TcpLineServer::~TcpLineServer() { stop(); }

void TcpLineServer::stop() {
    bool expected = true;
    if (!running_.compare_exchange_strong(expected, false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
        std::lock_guard lock(clients_mutex_);
        for (int fd : client_fds_) {
            ::shutdown(fd, SHUT_RDWR);
            ::close(fd);
        }
        client_fds_.clear();
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(clients_mutex_);
        threads.swap(client_threads_);
    }
    for (auto& t : threads) {
        if (t.joinable()) t.join();
    }
}

void TcpLineServer::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (!running_) break;
            continue;
        }
        std::lock_guard lock(clients_mutex_);
        client_fds_.push_back(fd);
        client_threads_.emplace_back([this, fd] {
            if (ingress_) {
                serve_ingress(fd);
            } else {
                serve_egress(fd);
            }
        });
    }
}

void TcpLineServer::serve_ingress(int fd) {
    std::string buffer;
    char chunk[4096];
    while (running_) {
        ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) topic_.publish(std::move(line));
        }
    }
}

void TcpLineServer::serve_egress(int fd) {
    auto sub = topic_.subscribe();
    while (running_) {
        auto line = sub->pop(100);
        if (!line) {
            if (sub->closed_and_drained()) break;
            continue;
        }
        std::string out = *line + "\n";
        if (!write_all(fd, out.data(), out.size())) break;
    }
    topic_.unsubscribe(sub);
}

TcpLineClient::TcpLineClient(const Address& address) : address_(address) { connect_once(); }

TcpLineClient::~TcpLineClient() { close(); }

void TcpLineClient::connect_once() { fd_ = connect_to(address_); }

void TcpLineClient::close() {
    std::lock_guard lock(mutex_);
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpLineClient::send_line(const std::string& line, int backoff_ms) {
    std::lock_guard lock(mutex_);
    std::string out = line + "\n";
    if (fd_ >= 0 && write_all(fd_, out.data(), out.size())) return;
    // one reconnect after backoff
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
    connect_once();
    if (!write_all(fd_, out.data(), out.size())) {
        throw SdeError(ErrorCode::IoError, "send failed after retry");
    }
}

std::optional<std::string> TcpLineClient::read_line(std::int64_t timeout_ms) {
    std::lock_guard lock(mutex_);
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
        std::size_t pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0 || fd_ < 0) return std::nullopt;
        pollfd p{fd_, POLLIN, 0};
        int ready = ::poll(&p, 1, static_cast<int>(remaining));
        if (ready <= 0) return std::nullopt;
        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n <= 0) return std::nullopt;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace sde
