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

// Deterministic demo fixtures: two devices and a CA, all derived from a
// 64-bit seed so that separate processes agree on every key.

#include "tinysec/bytes.hpp"
#include "tinysec/edhoc.hpp"
#include "tinysec/vault.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace tinysec::harness {

inline constexpr size_t kCertificateSize = 135;
inline constexpr std::string_view kCaName = "tinysecCA";

struct DeviceFixture {
    Bytes signature_secret;
    Bytes signature_public;
    Bytes dh_secret;
    Bytes dh_public;
    // One byte each, in 0..47 so they encode as a single CBOR integer.
    Bytes kid_signature;
    Bytes kid_dh;
    Bytes cert_signature;
    Bytes cert_dh;
    Bytes connection_id;
    uint64_t vault_seed = 0;
};

struct Fixtures {
    uint64_t seed = 0;
    uint64_t now = 0;
    Bytes ca_secret;
    Bytes ca_public;
    DeviceFixture initiator;
    DeviceFixture responder;
    // Pre-shared OSCORE material for the standalone OSCORE demo.
    Bytes oscore_master_secret;
    Bytes oscore_master_salt;

    const DeviceFixture& device(edhoc::Role role) const
    {
        return role == edhoc::Role::Initiator ? initiator : responder;
    }
};

Fixtures make_fixtures(uint64_t seed);

// Secret bytes the demos provision; none may ever leave a vault.
std::vector<Bytes> provisioned_secrets(const Fixtures& f);

// Vault key IDs used by provision_endpoint.
inline constexpr vault::KeyId kOwnDhKey{1};
inline constexpr vault::KeyId kOwnSignatureKey{2};
inline constexpr vault::KeyId kPeerSignatureKey{1};
inline constexpr vault::KeyId kPeerDhKey{2};
inline constexpr vault::KeyId kCaRootKey{3};

struct Endpoint {
    std::shared_ptr<vault::KeyVault> vault;
    edhoc::EndpointParams params;
    edhoc::CredentialSet creds;
};

// A vault whose randomness is the device's seeded stream.
std::shared_ptr<vault::KeyVault> make_device_vault(const Fixtures& f, edhoc::Role role);

// Provisions the device's own keys and its trust anchors (the peer's raw
// public keys and the CA root) and fills in handshake parameters.
Endpoint provision_endpoint(const Fixtures& f, edhoc::Role role, const edhoc::AuthMethod& method);

}  // namespace tinysec::harness
