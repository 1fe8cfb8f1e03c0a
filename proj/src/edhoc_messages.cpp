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

#include "tinysec/edhoc_messages.hpp"
#include "tinysec/error.hpp"

namespace tinysec::edhoc {

namespace {

// Runs a decoder and maps every CBOR-level failure onto DecodeError.
template <typename F>
auto decoding(F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == Errc::DecodeError) throw;
        throw Error(Errc::DecodeError, e.what());
    }
}

void expect_end(const cbor::Reader& r)
{
    if (!r.at_end()) throw Error(Errc::DecodeError, "trailing bytes");
}

}  // namespace

void encode_bstr_id(cbor::Encoder& enc, ByteView id)
{
    if (id.size() == 1) {
        enc.integer(int64_t{id[0]} - 24);
    } else {
        enc.bstr(id);
    }
}

Bytes read_bstr_id(cbor::Reader& r)
{
    const cbor::Kind k = r.peek_kind();
    if (k == cbor::Kind::Bstr) {
        ByteView b = r.read_bstr();
        if (b.size() == 1) throw Error(Errc::DecodeError, "one-byte identifier must use int form");
        return Bytes(b.begin(), b.end());
    }
    if (k != cbor::Kind::Uint && k != cbor::Kind::Nint) throw Error(Errc::DecodeError, "identifier type");
    const int64_t v = r.read_int() + 24;
    if (v < 0 || v > 255) throw Error(Errc::DecodeError, "identifier out of range");
    return Bytes{static_cast<uint8_t>(v)};
}

Bytes encode_message1(const Message1& m)
{
    Bytes out;
    cbor::Encoder enc(out);
    enc.uint(m.method);
    if (m.suites.size() == 1) {
        enc.uint(m.suites[0]);
    } else {
        enc.array(m.suites.size());
        for (uint64_t s : m.suites) enc.uint(s);
    }
    enc.bstr(m.g_x);
    encode_bstr_id(enc, m.c_i);
    return out;
}

Message1 decode_message1(ByteView bytes)
{
    return decoding([&] {
        cbor::Reader r(bytes);
        Message1 m;
        const uint64_t method = r.read_uint();
        if (method > 0xff) throw Error(Errc::DecodeError, "method");
        m.method = static_cast<uint8_t>(method);
        m.suites.clear();
        if (r.peek_kind() == cbor::Kind::Array) {
            const size_t n = r.read_array();
            if (n < 2) throw Error(Errc::DecodeError, "suite list must use the short form");
            for (size_t i = 0; i < n; ++i) m.suites.push_back(r.read_uint());
        } else {
            m.suites.push_back(r.read_uint());
        }
        ByteView gx = r.read_bstr();
        m.g_x.assign(gx.begin(), gx.end());
        m.c_i = read_bstr_id(r);
        expect_end(r);
        return m;
    });
}

Bytes encode_data2(ByteView g_y, ByteView c_r)
{
    Bytes out;
    cbor::Encoder enc(out);
    enc.bstr(g_y);
    encode_bstr_id(enc, c_r);
    return out;
}

Bytes encode_message2(const Message2& m)
{
    Bytes out = encode_data2(m.g_y, m.c_r);
    cbor::Encoder(out).bstr(m.ciphertext);
    return out;
}

Message2 decode_message2(ByteView bytes)
{
    return decoding([&] {
        cbor::Reader r(bytes);
        Message2 m;
        ByteView gy = r.read_bstr();
        m.g_y.assign(gy.begin(), gy.end());
        m.c_r = read_bstr_id(r);
        ByteView ct = r.read_bstr();
        m.ciphertext.assign(ct.begin(), ct.end());
        expect_end(r);
        return m;
    });
}

Bytes encode_message3(const Message3& m)
{
    Bytes out;
    cbor::Encoder enc(out);
    encode_bstr_id(enc, m.c_r);
    enc.bstr(m.ciphertext);
    return out;
}

Message3 decode_message3(ByteView bytes)
{
    return decoding([&] {
        cbor::Reader r(bytes);
        Message3 m;
        m.c_r = read_bstr_id(r);
        ByteView ct = r.read_bstr();
        m.ciphertext.assign(ct.begin(), ct.end());
        expect_end(r);
        return m;
    });
}

Bytes encode_error(const ErrorMessage& e)
{
    Bytes out;
    cbor::Encoder(out).array(2).uint(e.code).tstr(e.diagnostic);
    return out;
}

ErrorMessage decode_error(ByteView bytes)
{
    return decoding([&] {
        cbor::Reader r(bytes);
        if (r.read_array() != 2) throw Error(Errc::DecodeError, "error message arity");
        ErrorMessage e;
        e.code = r.read_uint();
        e.diagnostic = std::string(r.read_tstr());
        expect_end(r);
        return e;
    });
}

bool looks_like_error(ByteView bytes)
{
    return !bytes.empty() && (bytes[0] >> 5) == 4;
}

}  // namespace tinysec::edhoc
