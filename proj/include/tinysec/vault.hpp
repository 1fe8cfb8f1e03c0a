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

// Software model of a trusted-execution key store. Key bytes enter through
// provision() and never leave again; everything else refers to them by
// (context ID, key ID). Two gateway calls serve OSCORE (tee_hkdf, tee_aead),
// eight serve EDHOC (aead, asymm_sign, asymm_verify, hkdf_extract,
// hkdf_expand, dh_secret_derive, hash, xor_bytes). All parameters are plain
// bytes, integers, enums and key references.
//
// EDHOC runs inside a session context whose parent is the device's own
// context. A failed authentication check (aead Open, asymm_verify) erases
// every per-session key and marks the session wiped; later calls on it fail
// with WipedState. Long-term keys are untouched.

#include "tinysec/bytes.hpp"
#include "tinysec/crypto.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace tinysec::vault {

struct ContextId {
    uint16_t value = 0;
    auto operator<=>(const ContextId&) const = default;
};

struct KeyId {
    uint16_t value = 0;
    auto operator<=>(const KeyId&) const = default;
};

struct KeyRef {
    ContextId context;
    KeyId key;
    auto operator<=>(const KeyRef&) const = default;
};

enum class ContextKind : uint8_t { OwnContext, PeerContext, OscoreContext, Session };

enum class KeyKind : uint8_t {
    MasterSecret,
    SenderKey,
    RecipientKey,
    StaticDhSecret,
    SignatureSecret,
    PeerPublic,
    CaRootPublic,
    IntermediateSecret,
    EphemeralSecret,
    SessionResult,
};

const char* key_kind_name(KeyKind kind);

struct KeyRecord {
    KeyId id;
    KeyKind kind;
    Bytes material;
};

enum class Direction : uint8_t { Seal, Open };

// What tee_hkdf produces. Sender and recipient keys stay in the vault; the
// Common IV is public and is returned.
enum class DerivedKind : uint8_t { SenderKey, RecipientKey, CommonIv };

// Either a key held in the vault or caller-supplied public bytes.
using Operand = std::variant<KeyRef, ByteView>;

// hkdf_expand destination: a vault slot, or the caller (only allowed when
// expanding a SessionResult, i.e. the exporter).
struct StoreAs {
    KeyId id;
    KeyKind kind = KeyKind::IntermediateSecret;
};
struct PublicOutput {};
using ExpandTarget = std::variant<StoreAs, PublicOutput>;

// Public key vouched for by a successful asymm_verify under a CA root;
// stored in the session as PeerPublic.
struct CertifiedKey {
    ByteView public_key;
    KeyId out;
};

enum class GatewayOp : uint8_t {
    Aead,
    AsymmSign,
    AsymmVerify,
    HkdfExtract,
    HkdfExpand,
    DhSecretDerive,
    Hash,
    Xor,
};
inline constexpr size_t kGatewayOpCount = 8;

class KeyVault {
public:
    explicit KeyVault(std::shared_ptr<const crypto::CryptoProvider> provider);
    ~KeyVault();

    KeyVault(const KeyVault&) = delete;
    KeyVault& operator=(const KeyVault&) = delete;

    // Setup phase. Context IDs are assigned densely unless one is requested.
    ContextId provision(ContextKind kind, std::vector<KeyRecord> keys,
                        std::optional<ContextId> requested = std::nullopt);

    // Public counterpart of a StaticDhSecret, SignatureSecret or
    // EphemeralSecret.
    Bytes public_key(KeyRef secret) const;

    // --- OSCORE gateway ---
    Bytes tee_hkdf(KeyRef master_secret, ByteView salt, ByteView info, KeyId out, size_t out_len,
                   DerivedKind kind);
    Bytes tee_aead(KeyRef key, Direction direction, ByteView nonce, ByteView aad, ByteView data);

    // --- EDHOC session lifecycle ---
    ContextId begin_session(ContextId own_context);
    // Draws a fresh X25519 key pair; the secret stays here, the public key is returned.
    Bytes generate_ephemeral(ContextId session, KeyId out);
    // Drops everything but SessionResult records.
    void finish_session(ContextId session);
    void close_session(ContextId session);

    // --- EDHOC gateway ---
    Bytes aead(ContextId session, KeyRef key, Operand nonce, Direction direction, ByteView aad,
               ByteView data);
    Bytes asymm_sign(ContextId session, KeyRef secret, ByteView message);
    bool asymm_verify(ContextId session, KeyRef public_key, ByteView message, ByteView signature,
                      std::optional<CertifiedKey> certified = std::nullopt);
    void hkdf_extract(ContextId session, Operand salt, KeyRef ikm, KeyId out);
    Bytes hkdf_expand(ContextId session, KeyRef prk, ByteView info, size_t out_len, ExpandTarget target);
    void dh_secret_derive(ContextId session, KeyRef own_secret, Operand peer_public, KeyId out);
    Bytes hash(ContextId session, ByteView data);
    Bytes xor_bytes(ContextId session, Operand a, ByteView b);

    // Erases all per-session keys and marks the session unusable.
    void wipe_session(ContextId session);

    // Sees every byte string the vault hands back to callers. The flag marks
    // exporter output, the one return that is derived key material by design.
    // Called with the vault lock held; must not call back into the vault.
    using OutputObserver = std::function<void(std::string_view op, ByteView out, bool exporter)>;
    void set_output_observer(OutputObserver observer);

    // Metadata only; never key bytes.
    std::optional<KeyKind> key_kind(KeyRef ref) const;
    std::optional<ContextKind> context_kind(ContextId id) const;
    bool is_wiped(ContextId id) const;
    size_t call_count(ContextId session, GatewayOp op) const;

private:
    struct Record {
        KeyKind kind;
        Bytes material;
    };
    struct Context {
        ContextKind kind;
        std::optional<ContextId> parent;
        bool wiped = false;
        std::map<KeyId, Record> keys;
        std::array<size_t, kGatewayOpCount> calls{};
    };

    Context& context(ContextId id);
    const Context& context(ContextId id) const;
    Context& session(ContextId id, GatewayOp op);
    const Record& resolve(ContextId session, KeyRef ref) const;
    const Record& resolve_kind(ContextId session, KeyRef ref, std::initializer_list<KeyKind> allowed) const;
    Bytes operand_bytes(ContextId session, const Operand& op, std::initializer_list<KeyKind> allowed) const;
    void store(Context& ctx, KeyId id, KeyKind kind, Bytes material);
    void erase_session_keys(Context& ctx);
    Bytes emit(std::string_view op, Bytes out, bool exporter = false) const;

    std::shared_ptr<const crypto::CryptoProvider> crypto_;
    mutable std::mutex mu_;
    std::map<ContextId, Context> contexts_;
    uint16_t next_id_ = 1;
    OutputObserver observer_;
};

}  // namespace tinysec::vault
