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

// EDHOC key exchange: three messages between initiator and responder,
// SIGMA-I structure, signature or static-DH authentication on each side,
// raw public keys or CBOR certificates as credentials. All key material is
// handled through the vault's EDHOC gateway; this layer only ever sees
// public values and key references.

#include "tinysec/bytes.hpp"
#include "tinysec/cbor_cert.hpp"
#include "tinysec/edhoc_messages.hpp"
#include "tinysec/vault.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tinysec::edhoc {

enum class Role : uint8_t { Initiator, Responder };
enum class AuthKind : uint8_t { Signature, StaticDh };
enum class CredKind : uint8_t { Rpk, CborCert };

struct SideMethod {
    AuthKind auth = AuthKind::Signature;
    CredKind cred = CredKind::Rpk;

    bool operator==(const SideMethod&) const = default;
};

struct AuthMethod {
    SideMethod initiator;
    SideMethod responder;

    // METHOD value carried in message_1: 0 sig/sig, 1 sig/sdh, 2 sdh/sig, 3 sdh/sdh.
    uint8_t method_id() const;
    // e.g. "sdh-rpk/sig-cert"; diagonal modes collapse to "sdh-rpk".
    std::string name() const;

    static AuthMethod diagonal(AuthKind auth, CredKind cred) { return {{auth, cred}, {auth, cred}}; }
    // All 16 initiator x responder combinations.
    static std::vector<AuthMethod> all();
    static std::optional<AuthMethod> parse(std::string_view name);

    bool operator==(const AuthMethod&) const = default;
};

// Identifier for a credential as carried in messages 2 and 3: a key ID for
// raw public keys, the certificate itself otherwise.
struct IdCred {
    CredKind kind = CredKind::Rpk;
    Bytes value;

    bool operator==(const IdCred&) const = default;
};

inline constexpr uint64_t kIdCredCertLabel = 33;

Bytes encode_id_cred(const IdCred& id);
IdCred read_id_cred(cbor::Reader& r);

struct EndpointParams {
    AuthMethod method;
    vault::ContextId own_context;
    // SignatureSecret or StaticDhSecret, matching this side of `method`.
    vault::KeyRef auth_key;
    // Key ID for RPK mode, ignored for certificates.
    Bytes own_kid;
    // RPK: the 32-byte public key. Certificate: its CBOR encoding.
    Bytes own_credential;
    Bytes connection_id;
    // Seconds since the epoch, for certificate validity checks.
    uint64_t now = 0;
};

// One entry per trusted peer key (RPK) or per trusted CA root.
struct PeerCredential {
    CredKind kind = CredKind::Rpk;
    // RPK: the key ID the peer presents. CA root: the issuer name.
    Bytes id;
    // RPK: the peer's public key bytes (used as CRED in MACs).
    Bytes credential;
    vault::KeyRef key;
};

struct CredentialSet {
    std::vector<PeerCredential> entries;
};

struct ValidatedCredential {
    vault::KeyRef key;
    Bytes cred;
};

// Checks a presented credential against the trusted set. For certificates
// the vault verifies the CA signature and stores the subject key in the
// session under `out`.
ValidatedCredential validate_credential(vault::KeyVault& vault, vault::ContextId session, const IdCred& presented,
                                        const CredentialSet& creds, uint64_t now, vault::KeyId out);

struct HandshakeResult {
    vault::ContextId session;
    vault::KeyRef prk_out;
    Bytes th;
};

// Application key derivation from a completed handshake.
Bytes exporter(vault::KeyVault& vault, const HandshakeResult& result, std::string_view label, ByteView context,
               size_t length);

enum class State : uint8_t { Start, WaitMsg2, WaitMsg3, Complete, Failed };
enum class Step : uint8_t { Prk2e, Prk3e2m, Prk4x3m, PrkOut };

// One handshake. Not thread-safe; independent sessions may run in parallel.
class Session {
public:
    Session(vault::KeyVault& vault, Role role, EndpointParams params, CredentialSet creds);

    Role role() const { return role_; }
    State state() const { return state_; }
    vault::ContextId vault_session() const { return sid_; }
    const AuthMethod& method() const { return params_.method; }

    // Initiator: Start -> WaitMsg2.
    Bytes make_message1();
    // Initiator: WaitMsg2 -> Complete, returns message_3.
    Bytes handle_message2(ByteView msg2);

    // Responder: Start -> WaitMsg3, returns message_2.
    Bytes handle_message1(ByteView msg1);
    // Responder: WaitMsg3 -> Complete.
    void handle_message3(ByteView msg3);

    void key_schedule_step(Step step);

    HandshakeResult result() const;

    // Moves to Failed and erases the session's vault keys.
    void fail();

private:
    struct Prks {
        std::optional<vault::KeyRef> prk_2e;
        std::optional<vault::KeyRef> prk_3e2m;
        std::optional<vault::KeyRef> prk_4x3m;
        std::optional<vault::KeyRef> prk_out;
    };

    vault::KeyRef slot(uint16_t id) const { return {sid_, vault::KeyId{id}}; }
    template <typename F>
    auto guarded(F&& f, bool authenticating = false);

    Bytes transcript(std::initializer_list<ByteView> parts);
    void derive(vault::KeyRef prk, std::string_view label, ByteView th, size_t len, uint16_t out);
    Bytes mac_aad(ByteView id_cred, ByteView th, ByteView cred) const;
    Bytes sig_structure(ByteView id_cred, ByteView th, ByteView cred, ByteView mac) const;
    // Produces Signature_or_MAC for this side.
    Bytes authenticate(vault::KeyRef prk, std::string_view mac_label, ByteView th, ByteView id_cred,
                       ByteView cred, uint16_t key_slot, uint16_t iv_slot);
    // Checks the peer's Signature_or_MAC; wipes the session on failure.
    void verify_peer(AuthKind peer_auth, vault::KeyRef prk, std::string_view mac_label, ByteView th,
                     ByteView id_cred, ByteView cred, ByteView sig_or_mac, uint16_t key_slot, uint16_t iv_slot);
    Bytes own_id_cred_encoded(CredKind kind) const;
    SideMethod own_side() const;
    SideMethod peer_side() const;

    vault::KeyVault& vault_;
    Role role_;
    EndpointParams params_;
    CredentialSet creds_;
    vault::ContextId sid_;
    State state_ = State::Start;

    Bytes g_x_;
    Bytes g_y_;
    Bytes c_i_;
    Bytes c_r_;
    Bytes th_1_;
    Bytes th_2_;
    Bytes th_3_;
    Bytes th_4_;
    Bytes ciphertext_2_;
    bool have_g_xy_ = false;
    bool have_msg2_ = false;
    std::optional<ValidatedCredential> peer_;
    Prks prks_;
};

using TxFn = std::function<void(ByteView)>;
// Blocks until a message arrives; std::nullopt means the transport timed out.
using RxFn = std::function<std::optional<Bytes>()>;

// Either the handshake completed, or the peer sent an error message.
using RunResult = std::variant<HandshakeResult, ErrorMessage>;

// Runs a whole handshake over the given callbacks. A local failure sends an
// error message to the peer and then throws. `session_out`, if given, receives
// the vault session ID as soon as it exists.
RunResult initiator_run(vault::KeyVault& vault, const EndpointParams& params, const CredentialSet& creds,
                        const TxFn& tx, const RxFn& rx, vault::ContextId* session_out = nullptr);
RunResult responder_run(vault::KeyVault& vault, const EndpointParams& params, const CredentialSet& creds,
                        const TxFn& tx, const RxFn& rx, vault::ContextId* session_out = nullptr);

}  // namespace tinysec::edhoc
