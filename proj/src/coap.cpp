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

#include "tinysec/coap.hpp"
#include "tinysec/error.hpp"

namespace tinysec::coap {

namespace {

constexpr uint8_t kVersion = 1;

// Splits a delta or length into its 4-bit nibble and extended bytes.
uint8_t nibble_for(uint32_t v, Bytes& ext)
{
    if (v < 13) return static_cast<uint8_t>(v);
    if (v < 269) {
        ext.push_back(static_cast<uint8_t>(v - 13));
        return 13;
    }
    const uint32_t e = v - 269;
    ext.push_back(static_cast<uint8_t>(e >> 8));
    ext.push_back(static_cast<uint8_t>(e));
    return 14;
}

uint32_t read_extended(uint8_t nib, ByteView in, size_t& pos)
{
    if (nib < 13) return nib;
    if (nib == 13) {
        if (pos + 1 > in.size()) throw Error(Errc::TruncatedOption);
        return 13u + in[pos++];
    }
    if (nib == 14) {
        if (pos + 2 > in.size()) throw Error(Errc::TruncatedOption);
        uint32_t v = (uint32_t{in[pos]} << 8) | in[pos + 1];
        pos += 2;
        return 269u + v;
    }
    throw Error(Errc::BadOptionDelta, "reserved nibble 15");
}

}  // namespace

const Option* Message::find(uint32_t number) const
{
    for (const auto& opt : options) {
        if (opt.number == number) return &opt;
    }
    return nullptr;
}

void encode_options_and_payload(Bytes& out, std::span<const Option> options, ByteView payload)
{
    uint32_t last = 0;
    for (const auto& opt : options) {
        if (opt.number < last) throw Error(Errc::OptionOrder);
        if (opt.value.size() > kMaxOptionLength) throw Error(Errc::BadLength, "option value");
        Bytes ext;
        const uint8_t d = nibble_for(opt.number - last, ext);
        const uint8_t l = nibble_for(static_cast<uint32_t>(opt.value.size()), ext);
        out.push_back(static_cast<uint8_t>((d << 4) | l));
        append(out, ext);
        append(out, opt.value);
        last = opt.number;
    }
    if (!payload.empty()) {
        out.push_back(kPayloadMarker);
        append(out, payload);
    }
}

void decode_options_and_payload(ByteView in, std::vector<Option>& options, Bytes& payload)
{
    size_t pos = 0;
    uint32_t number = 0;
    while (pos < in.size()) {
        const uint8_t first = in[pos++];
        if (first == kPayloadMarker) {
            if (pos == in.size()) throw Error(Errc::BadOptionDelta, "payload marker without payload");
            payload.assign(in.begin() + static_cast<std::ptrdiff_t>(pos), in.end());
            return;
        }
        const uint32_t delta = read_extended(first >> 4, in, pos);
        const uint32_t length = read_extended(first & 0x0f, in, pos);
        if (length > in.size() - pos) throw Error(Errc::TruncatedOption);
        number += delta;
        auto begin = in.begin() + static_cast<std::ptrdiff_t>(pos);
        options.push_back({number, Bytes(begin, begin + length)});
        pos += length;
    }
}

Message parse(ByteView in)
{
    if (in.size() < 4) throw Error(Errc::HeaderTooShort);
    if ((in[0] >> 6) != kVersion) throw Error(Errc::BadVersion);
    const size_t tkl = in[0] & 0x0f;
    if (tkl > kMaxTokenLength) throw Error(Errc::BadTokenLength);
    if (in.size() < 4 + tkl) throw Error(Errc::HeaderTooShort, "token");

    Message msg;
    msg.type = static_cast<Type>((in[0] >> 4) & 0x03);
    msg.code = in[1];
    msg.message_id = static_cast<uint16_t>((in[2] << 8) | in[3]);
    msg.token.assign(in.begin() + 4, in.begin() + 4 + static_cast<std::ptrdiff_t>(tkl));
    decode_options_and_payload(in.subspan(4 + tkl), msg.options, msg.payload);
    return msg;
}

Bytes serialize(const Message& msg)
{
    if (msg.token.size() > kMaxTokenLength) throw Error(Errc::BadTokenLength);
    Bytes out;
    out.reserve(4 + msg.token.size() + msg.payload.size() + 8 * msg.options.size());
    out.push_back(static_cast<uint8_t>((kVersion << 6) | (static_cast<uint8_t>(msg.type) << 4) |
                                       msg.token.size()));
    out.push_back(msg.code);
    out.push_back(static_cast<uint8_t>(msg.message_id >> 8));
    out.push_back(static_cast<uint8_t>(msg.message_id));
    append(out, msg.token);
    encode_options_and_payload(out, msg.options, msg.payload);
    return out;
}

}  // namespace tinysec::coap
