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

// Native CBOR certificates: a flat CBOR array
//
//   [serial:bstr, issuer:bstr, [not_before:uint, not_after:uint],
//    subject:bstr, subject_public_key:bstr(32), signature:bstr(64)]
//
// The signature is Ed25519 by the issuing CA over the CBOR encoding of the
// first five elements as an array.

#include "tinysec/bytes.hpp"
#include "tinysec/crypto.hpp"

#include <cstdint>

namespace tinysec::edhoc {

struct Certificate {
    Bytes serial;
    Bytes issuer;
    uint64_t not_before = 0;
    uint64_t not_after = 0;
    Bytes subject;
    Bytes subject_public_key;
    Bytes signature;

    bool operator==(const Certificate&) const = default;
};

Bytes encode_certificate(const Certificate& cert);
// Throws Error(DecodeError) on malformed input.
Certificate decode_certificate(ByteView bytes);
Bytes certificate_tbs(const Certificate& cert);

// Fills in `cert.signature` using the CA's Ed25519 secret. Used to mint
// fixtures; devices never hold a CA secret.
void sign_certificate(const crypto::CryptoProvider& crypto, ByteView ca_secret, Certificate& cert);

}  // namespace tinysec::edhoc
