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

// Wire codecs for the EDHOC messages. Each message is a CBOR sequence:
//
//   message_1 = METHOD:uint, SUITES_I:uint/[+uint], G_X:bstr, C_I:bstr_id
//   message_2 = G_Y:bstr, C_R:bstr_id, CIPHERTEXT_2:bstr
//   message_3 = C_R:bstr_id, CIPHERTEXT_3:bstr
//   error     = [ERR_CODE:uint, DIAG_MSG:tstr]
//
// A bstr_id is a byte string where one-byte values are sent as the CBOR
// integer (byte - 24), so identifiers 0x00..0x2f cost a single byte.

#include "tinysec/bytes.hpp"
#include "tinysec/cbor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tinysec::edhoc {

struct Message1 {
    uint8_t method = 0;
    std::vector<uint64_t> suites{0};
    Bytes g_x;
    Bytes c_i;

    bool operator==(const Message1&) const = default;
};

struct Message2 {
    Bytes g_y;
    Bytes c_r;
    Bytes ciphertext;

    bool operator==(const Message2&) const = default;
};

struct Message3 {
    Bytes c_r;
    Bytes ciphertext;

    bool operator==(const Message3&) const = default;
};

struct ErrorMessage {
    uint64_t code = 1;
    std::string diagnostic;

    bool operator==(const ErrorMessage&) const = default;
};

enum class MessageType : uint8_t { Message1, Message2, Message3, Error };

void encode_bstr_id(cbor::Encoder& enc, ByteView id);
Bytes read_bstr_id(cbor::Reader& r);

Bytes encode_message1(const Message1& m);
Message1 decode_message1(ByteView bytes);
Bytes encode_message2(const Message2& m);
// The C_R and G_Y part of message_2, hashed into TH_2.
Bytes encode_data2(ByteView g_y, ByteView c_r);
Message2 decode_message2(ByteView bytes);
Bytes encode_message3(const Message3& m);
Message3 decode_message3(ByteView bytes);
Bytes encode_error(const ErrorMessage& e);
ErrorMessage decode_error(ByteView bytes);

// True if the bytes start like an error message (a CBOR array).
bool looks_like_error(ByteView bytes);

}  // namespace tinysec::edhoc
