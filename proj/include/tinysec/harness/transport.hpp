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

#pragma once

// Byte transports for the demos. A Channel is one endpoint of a
// bidirectional link; messages arrive whole and in order.

#include "tinysec/bytes.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace tinysec::harness {

enum class TransportKind : uint8_t { InMemory, Udp };

const char* transport_name(TransportKind kind);
std::optional<TransportKind> parse_transport(std::string_view name);

class Channel {
public:
    virtual ~Channel() = default;

    // Throws Error(TransportError) if the message cannot be handed off.
    virtual void send(ByteView message) = 0;
    // Waits up to the channel timeout; std::nullopt on timeout.
    virtual std::optional<Bytes> receive() = 0;
};

struct ChannelPair {
    std::unique_ptr<Channel> first;
    std::unique_ptr<Channel> second;
};

ChannelPair make_memory_pair(std::chrono::milliseconds timeout);

struct HostPort {
    std::string host;
    uint16_t port = 0;

    // "host:port"; throws std::invalid_argument.
    static HostPort parse(std::string_view text);
    std::string to_string() const;
};

// Binds `local`. Without a peer, replies go to whoever sent the most recent
// datagram, which is how a listening responder learns its initiator.
std::unique_ptr<Channel> make_udp_channel(const HostPort& local, std::optional<HostPort> peer,
                                          std::chrono::milliseconds timeout);
// Two sockets on 127.0.0.1 with kernel-chosen ports, pointed at each other.
ChannelPair make_udp_loopback_pair(std::chrono::milliseconds timeout);

ChannelPair make_pair(TransportKind kind, std::chrono::milliseconds timeout);

// Called for each outgoing message with its 0-based index on that channel.
// Return false to drop the message.
using Tap = std::function<bool(size_t index, Bytes& message)>;

std::unique_ptr<Channel> tapped(std::unique_ptr<Channel> inner, Tap tap);

}  // namespace tinysec::harness
