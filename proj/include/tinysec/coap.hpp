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

// CoAP message framing (RFC 7252): 4-byte header, token, delta-encoded
// options, optional payload behind a 0xFF marker.

#include "tinysec/bytes.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tinysec::coap {

enum class Type : uint8_t { Confirmable = 0, NonConfirmable = 1, Ack = 2, Reset = 3 };

constexpr uint8_t make_code(uint8_t cls, uint8_t detail)
{
    return static_cast<uint8_t>((cls << 5) | detail);
}
constexpr uint8_t code_class(uint8_t code) { return code >> 5; }
constexpr bool is_request(uint8_t code) { return code_class(code) == 0 && code != 0; }

namespace code {
inline constexpr uint8_t kEmpty = make_code(0, 0);
inline constexpr uint8_t kGet = make_code(0, 1);
inline constexpr uint8_t kPost = make_code(0, 2);
inline constexpr uint8_t kPut = make_code(0, 3);
inline constexpr uint8_t kChanged = make_code(2, 4);
inline constexpr uint8_t kContent = make_code(2, 5);
inline constexpr uint8_t kUnauthorized = make_code(4, 1);
inline constexpr uint8_t kBadRequest = make_code(4, 0);
}  // namespace code

namespace option {
inline constexpr uint32_t kIfMatch = 1;
inline constexpr uint32_t kUriHost = 3;
inline constexpr uint32_t kETag = 4;
inline constexpr uint32_t kObserve = 6;
inline constexpr uint32_t kUriPort = 7;
inline constexpr uint32_t kOscore = 9;
inline constexpr uint32_t kUriPath = 11;
inline constexpr uint32_t kContentFormat = 12;
inline constexpr uint32_t kMaxAge = 14;
inline constexpr uint32_t kUriQuery = 15;
inline constexpr uint32_t kHopLimit = 16;
inline constexpr uint32_t kAccept = 17;
inline constexpr uint32_t kProxyUri = 35;
inline constexpr uint32_t kProxyScheme = 39;
}  // namespace option

inline constexpr size_t kMaxTokenLength = 8;
inline constexpr size_t kMaxOptionLength = 65535 + 269;
inline constexpr uint8_t kPayloadMarker = 0xff;

struct Option {
    uint32_t number = 0;
    Bytes value;

    bool operator==(const Option&) const = default;
};

struct Message {
    Type type = Type::Confirmable;
    uint8_t code = code::kEmpty;
    uint16_t message_id = 0;
    Bytes token;
    std::vector<Option> options;
    Bytes payload;

    const Option* find(uint32_t number) const;
    bool operator==(const Message&) const = default;
};

Message parse(ByteView bytes);
Bytes serialize(const Message& msg);

// Option list plus optional payload, without the fixed header. Used both by
// the message codec and by OSCORE for the inner (encrypted) plaintext.
void encode_options_and_payload(Bytes& out, std::span<const Option> options, ByteView payload);
void decode_options_and_payload(ByteView bytes, std::vector<Option>& options, Bytes& payload);

}  // namespace tinysec::coap
