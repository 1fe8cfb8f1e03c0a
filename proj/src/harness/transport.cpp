// Copyright 2026 The tinysec Authors
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

#include "tinysec/harness/transport.hpp"
#include "tinysec/error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <stdexcept>

namespace tinysec::harness {

const char* transport_name(TransportKind kind)
{
    return kind == TransportKind::InMemory ? "mem" : "udp";
}

std::optional<TransportKind> parse_transport(std::string_view name)
{
    if (name == "mem" || name == "memory") return TransportKind::InMemory;
    if (name == "udp") return TransportKind::Udp;
    return std::nullopt;
}

namespace {

struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Bytes> queue;
};

class MemoryChannel final : public Channel {
public:
    MemoryChannel(std::shared_ptr<Mailbox> in, std::shared_ptr<Mailbox> out, std::chrono::milliseconds timeout)
        : in_(std::move(in)), out_(std::move(out)), timeout_(timeout)
    {
    }

    void send(ByteView message) override
    {
        {
            std::lock_guard lock(out_->mu);
            out_->queue.emplace_back(message.begin(), message.end());
        }
        out_->cv.notify_one();
    }

    std::optional<Bytes> receive() override
    {
        std::unique_lock lock(in_->mu);
        if (!in_->cv.wait_for(lock, timeout_, [&] { return !in_->queue.empty(); })) return std::nullopt;
        Bytes msg = std::move(in_->queue.front());
        in_->queue.pop_front();
        return msg;
    }

private:
    std::shared_ptr<Mailbox> in_;
    std::shared_ptr<Mailbox> out_;
    std::chrono::milliseconds timeout_;
};

sockaddr_in resolve(const HostPort& hp)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    const std::string host = hp.host.empty() ? "0.0.0.0" : hp.host;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
        throw Error(Errc::TransportError, "cannot resolve " + host);
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    freeaddrinfo(res);
    addr.sin_port = htons(hp.port);
    return addr;
}

class UdpChannel final : public Channel {
public:
    UdpChannel(const HostPort& local, std::optional<HostPort> peer, std::chrono::milliseconds timeout)
        : timeout_(timeout)
    {
        fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd_ < 0) throw Error(Errc::TransportError, std::strerror(errno));
        const sockaddr_in addr = resolve(local);
        if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
            const std::string why = std::strerror(errno);
            ::close(fd_);
            throw Error(Errc::TransportError, "bind " + local.to_string() + ": " + why);
        }
        if (peer) peer_ = resolve(*peer);
    }

    ~UdpChannel() override { ::close(fd_); }

    UdpChannel(const UdpChannel&) = delete;
    UdpChannel& operator=(const UdpChannel&) = delete;

    uint16_t local_port() const
    {
        sockaddr_in addr{};
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        return ntohs(addr.sin_port);
    }

    void set_peer(const HostPort& peer) { peer_ = resolve(peer); }

    void send(ByteView message) override
    {
        if (!peer_) throw Error(Errc::TransportError, "no peer address yet");
        const ssize_t n = ::sendto(fd_, message.data(), message.size(), 0, reinterpret_cast<const sockaddr*>(&*peer_),
                                   sizeof *peer_);
        if (n < 0 || static_cast<size_t>(n) != message.size()) {
            throw Error(Errc::TransportError, std::string("sendto: ") + std::strerror(errno));
        }
    }

    std::optional<Bytes> receive() override
    {
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
        if (ready < 0) throw Error(Errc::TransportError, std::string("poll: ") + std::strerror(errno));
        if (ready == 0) return std::nullopt;
        Bytes buf(65535);
        sockaddr_in from{};
        socklen_t len = sizeof from;
        const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
        if (n < 0) throw Error(Errc::TransportError, std::string("recvfrom: ") + std::strerror(errno));
        buf.resize(static_cast<size_t>(n));
        peer_ = from;
        return buf;
    }

private:
    int fd_ = -1;
    std::optional<sockaddr_in> peer_;
    std::chrono::milliseconds timeout_;
};

class TappedChannel final : public Channel {
public:
    TappedChannel(std::unique_ptr<Channel> inner, Tap tap) : inner_(std::move(inner)), tap_(std::move(tap)) {}

    void send(ByteView message) override
    {
        Bytes copy(message.begin(), message.end());
        if (!tap_(count_++, copy)) return;
        inner_->send(copy);
    }

    std::optional<Bytes> receive() override { return inner_->receive(); }

private:
    std::unique_ptr<Channel> inner_;
    Tap tap_;
    size_t count_ = 0;
};

}  // namespace

HostPort HostPort::parse(std::string_view text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon + 1 == text.size()) {
        throw std::invalid_argument("expected host:port, got '" + std::string(text) + "'");
    }
    HostPort hp;
    hp.host = std::string(text.substr(0, colon));
    const std::string port(text.substr(colon + 1));
    size_t used = 0;
    const unsigned long p = std::stoul(port, &used);
    if (used != port.size() || p > 65535) throw std::invalid_argument("bad port '" + port + "'");
    hp.port = static_cast<uint16_t>(p);
    return hp;
}

std::string HostPort::to_string() const
{
    return host + ":" + std::to_string(port);
}

ChannelPair make_memory_pair(std::chrono::milliseconds timeout)
{
    auto a = std::make_shared<Mailbox>();
    auto b = std::make_shared<Mailbox>();
    return {std::make_unique<MemoryChannel>(a, b, timeout), std::make_unique<MemoryChannel>(b, a, timeout)};
}

std::unique_ptr<Channel> make_udp_channel(const HostPort& local, std::optional<HostPort> peer,
                                          std::chrono::milliseconds timeout)
{
    return std::make_unique<UdpChannel>(local, std::move(peer), timeout);
}

ChannelPair make_udp_loopback_pair(std::chrono::milliseconds timeout)
{
    auto a = std::make_unique<UdpChannel>(HostPort{"127.0.0.1", 0}, std::nullopt, timeout);
    auto b = std::make_unique<UdpChannel>(HostPort{"127.0.0.1", 0}, std::nullopt, timeout);
    a->set_peer({"127.0.0.1", b->local_port()});
    b->set_peer({"127.0.0.1", a->local_port()});
    return {std::move(a), std::move(b)};
}

ChannelPair make_pair(TransportKind kind, std::chrono::milliseconds timeout)
{
    return kind == TransportKind::InMemory ? make_memory_pair(timeout) : make_udp_loopback_pair(timeout);
}

std::unique_ptr<Channel> tapped(std::unique_ptr<Channel> inner, Tap tap)
{
    return std::make_unique<TappedChannel>(std::move(inner), std::move(tap));
}

}  // namespace tinysec::harness
