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

#include "tinysec/bytes.hpp"
#include "tinysec/error.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace tinysec {

namespace {

int nibble(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex)
{
    Bytes out;
    out.reserve(hex.size() / 2);
    int hi = -1;
    for (char c : hex) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        int v = nibble(c);
        if (v < 0) throw std::invalid_argument("bad hex digit");
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<uint8_t>((hi << 4) | v));
            hi = -1;
        }
    }
    if (hi >= 0) throw std::invalid_argument("odd number of hex digits");
    return out;
}

std::string to_hex(ByteView bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0f]);
    }
    return s;
}

bool contains_subsequence(ByteView haystack, ByteView needle)
{
    if (needle.empty()) return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

void secure_zero(std::span<uint8_t> buf)
{
    volatile uint8_t* p = buf.data();
    for (size_t i = 0; i < buf.size(); ++i) p[i] = 0;
}

const char* errc_name(Errc code)
{
    switch (code) {
    case Errc::Truncated: return "Truncated";
    case Errc::UnsupportedMajorType: return "UnsupportedMajorType";
    case Errc::NonCanonical: return "NonCanonical";
    case Errc::IntegerOverflow: return "IntegerOverflow";
    case Errc::NestingTooDeep: return "NestingTooDeep";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::HeaderTooShort: return "HeaderTooShort";
    case Errc::BadVersion: return "BadVersion";
    case Errc::BadTokenLength: return "BadTokenLength";
    case Errc::BadOptionDelta: return "BadOptionDelta";
    case Errc::TruncatedOption: return "TruncatedOption";
    case Errc::OptionOrder: return "OptionOrder";
    case Errc::BadLength: return "BadLength";
    case Errc::AuthFailed: return "AuthFailed";
    case Errc::OutLenTooLarge: return "OutLenTooLarge";
    case Errc::LowOrderPoint: return "LowOrderPoint";
    case Errc::MalformedSignature: return "MalformedSignature";
    case Errc::DuplicateContextId: return "DuplicateContextId";
    case Errc::UnknownContext: return "UnknownContext";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::WipedState: return "WipedState";
    case Errc::WrongKeyKind: return "WrongKeyKind";
    case Errc::IdTooLong: return "IdTooLong";
    case Errc::SeqNumExhausted: return "SeqNumExhausted";
    case Errc::ReplayDetected: return "ReplayDetected";
    case Errc::UnknownKid: return "UnknownKid";
    case Errc::MalformedOscoreOption: return "MalformedOscoreOption";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::DecodeError: return "DecodeError";
    case Errc::WrongState: return "WrongState";
    case Errc::CredentialUnknown: return "CredentialUnknown";
    case Errc::CertExpired: return "CertExpired";
    case Errc::CertSignatureInvalid: return "CertSignatureInvalid";
    case Errc::TransportError: return "TransportError";
    case Errc::AuthFailedWiped: return "AuthFailedWiped";
    }
    return "Unknown";
}

}  // namespace tinysec
