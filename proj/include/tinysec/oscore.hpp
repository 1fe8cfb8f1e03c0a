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

// OSCORE (RFC 8613): security context derivation, CoAP -> OSCORE
// protection and OSCORE -> CoAP verification. Keys live in the vault; the
// contexts here carry only public state and key references.

#include "tinysec/bytes.hpp"
#include "tinysec/coap.hpp"
#include "tinysec/crypto.hpp"
#include "tinysec/replay_window.hpp"
#include "tinysec/vault.hpp"

#include <cstdint>
#include <optional>

namespace tinysec::oscore {

inline constexpr uint64_t kMaxSequenceNumber = (uint64_t{1} << 40) - 1;
inline constexpr size_t kMaxPartialIvLen = 5;

// Key slots inside an OSCORE vault context. The master secret must be
// provisioned under kMasterSecretKey.
inline constexpr vault::KeyId kMasterSecretKey{0};
inline constexpr vault::KeyId kSenderKey{1};
inline constexpr vault::KeyId kRecipientKey{2};

enum class Role : uint8_t { Client, Server };

struct CommonContext {
    crypto::AeadAlg aead_alg = crypto::AeadAlg::AesCcm_16_64_128;
    crypto::HkdfAlg hkdf_alg = crypto::HkdfAlg::HmacSha256;
    vault::KeyRef master_secret;
    Bytes master_salt;
    Bytes id_context;
    Bytes common_iv;
};

struct SenderContext {
    Bytes sender_id;
    vault::KeyRef sender_key;
    uint64_t sequence_number = 0;
};

struct RecipientContext {
    Bytes recipient_id;
    vault::KeyRef recipient_key;
    ReplayWindow replay_window;
};

// kid and Partial IV of the request a response belongs to.
struct RequestBinding {
    Bytes request_kid;
    Bytes request_piv;

    bool operator==(const RequestBinding&) const = default;
};

struct SecurityContext {
    CommonContext common;
    SenderContext sender;
    RecipientContext recipient;
    std::optional<RequestBinding> binding;
};

struct InitParams {
    vault::KeyRef master_secret;
    Bytes master_salt;
    Bytes id_context;
    Bytes sender_id;
    Bytes recipient_id;
    crypto::AeadAlg aead_alg = crypto::AeadAlg::AesCcm_16_64_128;
    crypto::HkdfAlg hkdf_alg = crypto::HkdfAlg::HmacSha256;
};

// Derives Sender Key and Recipient Key into the vault and the Common IV into
// the returned context.
SecurityContext oscore_init(vault::KeyVault& vault, const InitParams& params);

// HKDF `info` for one derived parameter.
Bytes derivation_info(ByteView id, ByteView id_context, crypto::AeadAlg alg, std::string_view type, size_t len);

Bytes compute_nonce(ByteView id, ByteView partial_iv, ByteView common_iv);

// Minimal big-endian encoding of a sequence number; 0 encodes as 0x00.
Bytes encode_partial_iv(uint64_t seq);
uint64_t decode_partial_iv(ByteView piv);

struct OscoreOptionValue {
    Bytes partial_iv;
    std::optional<Bytes> kid_context;
    std::optional<Bytes> kid;

    bool operator==(const OscoreOptionValue&) const = default;
};

Bytes encode_oscore_option(const OscoreOptionValue& v);
OscoreOptionValue decode_oscore_option(ByteView bytes);

// Class U options stay outside the ciphertext; everything else (including
// unknown options) is class E.
bool is_class_u(uint32_t option_number);

Bytes external_aad(crypto::AeadAlg alg, ByteView request_kid, ByteView request_piv);
Bytes aead_aad(crypto::AeadAlg alg, ByteView request_kid, ByteView request_piv);

// Client protects requests, server protects responses.
Bytes coap2oscore(vault::KeyVault& vault, SecurityContext& ctx, Role role, ByteView coap_bytes);

enum class UnprotectStatus : uint8_t { CoapPassThrough, Unprotected };

struct UnprotectResult {
    UnprotectStatus status;
    Bytes coap;
};

// Server verifies requests, client verifies responses. Messages without an
// OSCORE option are handed back untouched.
UnprotectResult oscore2coap(vault::KeyVault& vault, SecurityContext& ctx, Role role, ByteView bytes);

}  // namespace tinysec::oscore
