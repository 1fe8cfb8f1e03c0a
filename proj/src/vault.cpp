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

#include "tinysec/vault.hpp"
#include "tinysec/error.hpp"

#include <algorithm>

namespace tinysec::vault {

namespace {

bool one_of(KeyKind k, std::initializer_list<KeyKind> allowed)
{
    return std::find(allowed.begin(), allowed.end(), k) != allowed.end();
}

}  // namespace

const char* key_kind_name(KeyKind kind)
{
    switch (kind) {
    case KeyKind::MasterSecret: return "MasterSecret";
    case KeyKind::SenderKey: return "SenderKey";
    case KeyKind::RecipientKey: return "RecipientKey";
    case KeyKind::StaticDhSecret: return "StaticDhSecret";
    case KeyKind::SignatureSecret: return "SignatureSecret";
    case KeyKind::PeerPublic: return "PeerPublic";
    case KeyKind::CaRootPublic: return "CaRootPublic";
    case KeyKind::IntermediateSecret: return "IntermediateSecret";
    case KeyKind::EphemeralSecret: return "EphemeralSecret";
    case KeyKind::SessionResult: return "SessionResult";
    }
    return "?";
}

KeyVault::KeyVault(std::shared_ptr<const crypto::CryptoProvider> provider) : crypto_(std::move(provider))
{
}

KeyVault::~KeyVault()
{
    for (auto& [id, ctx] : contexts_) {
        for (auto& [kid, rec] : ctx.keys) secure_zero(rec.material);
    }
}

KeyVault::Context& KeyVault::context(ContextId id)
{
    auto it = contexts_.find(id);
    if (it == contexts_.end()) throw Error(Errc::UnknownContext);
    return it->second;
}

const KeyVault::Context& KeyVault::context(ContextId id) const
{
    auto it = contexts_.find(id);
    if (it == contexts_.end()) throw Error(Errc::UnknownContext);
    return it->second;
}

KeyVault::Context& KeyVault::session(ContextId id, GatewayOp op)
{
    Context& ctx = context(id);
    if (ctx.kind != ContextKind::Session) throw Error(Errc::UnknownContext, "not a session");
    ++ctx.calls[static_cast<size_t>(op)];
    if (ctx.wiped) throw Error(Errc::WipedState);
    return ctx;
}

// A session may use its own keys, its parent's long-term keys, and any peer
// context. Nothing else is reachable from it.
const KeyVault::Record& KeyVault::resolve(ContextId session_id, KeyRef ref) const
{
    const Context& owner = context(ref.context);
    const Context& sess = context(session_id);
    const bool reachable = ref.context == session_id || owner.kind == ContextKind::PeerContext ||
                           (sess.parent && *sess.parent == ref.context);
    if (!reachable) throw Error(Errc::UnknownContext, "key not reachable from session");
    if (owner.wiped) throw Error(Errc::WipedState);
    auto it = owner.keys.find(ref.key);
    if (it == owner.keys.end()) throw Error(Errc::UnknownKey);
    return it->second;
}

const KeyVault::Record& KeyVault::resolve_kind(ContextId session_id, KeyRef ref,
                                               std::initializer_list<KeyKind> allowed) const
{
    const Record& rec = resolve(session_id, ref);
    if (!one_of(rec.kind, allowed)) throw Error(Errc::WrongKeyKind, key_kind_name(rec.kind));
    return rec;
}

Bytes KeyVault::operand_bytes(ContextId session_id, const Operand& op,
                              std::initializer_list<KeyKind> allowed) const
{
    if (const auto* ref = std::get_if<KeyRef>(&op)) return resolve_kind(session_id, *ref, allowed).material;
    const ByteView v = std::get<ByteView>(op);
    return Bytes(v.begin(), v.end());
}

void KeyVault::store(Context& ctx, KeyId id, KeyKind kind, Bytes material)
{
    auto it = ctx.keys.find(id);
    if (it != ctx.keys.end()) secure_zero(it->second.material);
    ctx.keys[id] = Record{kind, std::move(material)};
}

void KeyVault::erase_session_keys(Context& ctx)
{
    for (auto& [id, rec] : ctx.keys) secure_zero(rec.material);
    ctx.keys.clear();
}

ContextId KeyVault::provision(ContextKind kind, std::vector<KeyRecord> keys, std::optional<ContextId> requested)
{
    std::lock_guard lock(mu_);
    ContextId id;
    if (requested) {
        if (contexts_.count(*requested)) throw Error(Errc::DuplicateContextId);
        id = *requested;
        next_id_ = std::max<uint16_t>(next_id_, static_cast<uint16_t>(id.value + 1));
    } else {
        while (contexts_.count(ContextId{next_id_})) ++next_id_;
        id = ContextId{next_id_++};
    }
    Context ctx{kind, std::nullopt, false, {}, {}};
    for (auto& k : keys) store(ctx, k.id, k.kind, std::move(k.material));
    contexts_.emplace(id, std::move(ctx));
    return id;
}

void KeyVault::set_output_observer(OutputObserver observer)
{
    std::lock_guard lock(mu_);
    observer_ = std::move(observer);
}

Bytes KeyVault::emit(std::string_view op, Bytes out, bool exporter) const
{
    if (observer_) observer_(op, out, exporter);
    return out;
}

Bytes KeyVault::public_key(KeyRef secret) const
{
    std::lock_guard lock(mu_);
    const Context& ctx = context(secret.context);
    if (ctx.wiped) throw Error(Errc::WipedState);
    auto it = ctx.keys.find(secret.key);
    if (it == ctx.keys.end()) throw Error(Errc::UnknownKey);
    switch (it->second.kind) {
    case KeyKind::StaticDhSecret:
    case KeyKind::EphemeralSecret: return emit("public_key", crypto_->dh_public(it->second.material));
    case KeyKind::SignatureSecret: return emit("public_key", crypto_->sign_public(it->second.material));
    default: throw Error(Errc::WrongKeyKind, key_kind_name(it->second.kind));
    }
}

Bytes KeyVault::tee_hkdf(KeyRef master, ByteView salt, ByteView info, KeyId out, size_t out_len, DerivedKind kind)
{
    std::lock_guard lock(mu_);
    Context& ctx = context(master.context);
    if (ctx.wiped) throw Error(Errc::WipedState);
    if (ctx.kind != ContextKind::OscoreContext) throw Error(Errc::WrongKeyKind, "not an OSCORE context");
    auto it = ctx.keys.find(master.key);
    if (it == ctx.keys.end()) throw Error(Errc::UnknownKey);
    if (it->second.kind != KeyKind::MasterSecret) throw Error(Errc::WrongKeyKind, key_kind_name(it->second.kind));

    Bytes prk = crypto_->hkdf_extract(salt, it->second.material);
    Bytes okm = crypto_->hkdf_expand(prk, info, out_len);
    secure_zero(prk);
    switch (kind) {
    case DerivedKind::CommonIv: return emit("tee_hkdf", std::move(okm));
    case DerivedKind::SenderKey: store(ctx, out, KeyKind::SenderKey, std::move(okm)); break;
    case DerivedKind::RecipientKey: store(ctx, out, KeyKind::RecipientKey, std::move(okm)); break;
    }
    return {};
}

Bytes KeyVault::tee_aead(KeyRef key, Direction direction, ByteView nonce, ByteView aad, ByteView data)
{
    std::lock_guard lock(mu_);
    const Context& ctx = context(key.context);
    if (ctx.wiped) throw Error(Errc::WipedState);
    auto it = ctx.keys.find(key.key);
    if (it == ctx.keys.end()) throw Error(Errc::UnknownKey);
    const KeyKind want = direction == Direction::Seal ? KeyKind::SenderKey : KeyKind::RecipientKey;
    if (it->second.kind != want) throw Error(Errc::WrongKeyKind, key_kind_name(it->second.kind));
    if (direction == Direction::Seal) return emit("tee_aead", crypto_->aead_seal(it->second.material, nonce, aad, data));
    // A failed open is reported but leaves the OSCORE context intact.
    return emit("tee_aead", crypto_->aead_open(it->second.material, nonce, aad, data));
}

ContextId KeyVault::begin_session(ContextId own)
{
    std::lock_guard lock(mu_);
    if (context(own).kind != ContextKind::OwnContext) throw Error(Errc::WrongKeyKind, "not an own context");
    while (contexts_.count(ContextId{next_id_})) ++next_id_;
    const ContextId id{next_id_++};
    contexts_.emplace(id, Context{ContextKind::Session, own, false, {}, {}});
    return id;
}

Bytes KeyVault::generate_ephemeral(ContextId session_id, KeyId out)
{
    std::lock_guard lock(mu_);
    Context& ctx = context(session_id);
    if (ctx.kind != ContextKind::Session) throw Error(Errc::UnknownContext, "not a session");
    if (ctx.wiped) throw Error(Errc::WipedState);
    Bytes secret = crypto_->random(crypto::kDhKeyLen);
    Bytes pub = crypto_->dh_public(secret);
    store(ctx, out, KeyKind::EphemeralSecret, std::move(secret));
    return emit("generate_ephemeral", std::move(pub));
}

void KeyVault::finish_session(ContextId session_id)
{
    std::lock_guard lock(mu_);
    Context& ctx = context(session_id);
    for (auto it = ctx.keys.begin(); it != ctx.keys.end();) {
        if (it->second.kind == KeyKind::SessionResult) {
            ++it;
        } else {
            secure_zero(it->second.material);
            it = ctx.keys.erase(it);
        }
    }
}

void KeyVault::close_session(ContextId session_id)
{
    std::lock_guard lock(mu_);
    Context& ctx = context(session_id);
    if (ctx.kind != ContextKind::Session) throw Error(Errc::UnknownContext, "not a session");
    erase_session_keys(ctx);
    contexts_.erase(session_id);
}

void KeyVault::wipe_session(ContextId session_id)
{
    std::lock_guard lock(mu_);
    Context& ctx = context(session_id);
    if (ctx.kind != ContextKind::Session) throw Error(Errc::UnknownContext, "not a session");
    erase_session_keys(ctx);
    ctx.wiped = true;
}

Bytes KeyVault::aead(ContextId session_id, KeyRef key, Operand nonce, Direction direction, ByteView aad,
                     ByteView data)
{
    std::lock_guard lock(mu_);
    Context& ctx = session(session_id, GatewayOp::Aead);
    const Bytes& k = resolve_kind(session_id, key, {KeyKind::IntermediateSecret}).material;
    const Bytes n = operand_bytes(session_id, nonce, {KeyKind::IntermediateSecret});
    if (direction == Direction::Seal) return emit("aead", crypto_->aead_seal(k, n, aad, data));
    try {
        return emit("aead", crypto_->aead_open(k, n, aad, data));
    } catch (const Error& e) {
        if (e.code() == Errc::AuthFailed) {
            erase_session_keys(ctx);
            ctx.wiped = true;
        }
        throw;
    }
}

Bytes KeyVault::asymm_sign(ContextId session_id, KeyRef secret, ByteView message)
{
    std::lock_guard lock(mu_);
    session(session_id, GatewayOp::AsymmSign);
    const Record& rec = resolve_kind(session_id, secret, {KeyKind::SignatureSecret});
    return emit("asymm_sign", crypto_->sign(rec.material, message));
}

bool KeyVault::asymm_verify(ContextId session_id, KeyRef public_key, ByteView message, ByteView signature,
                            std::optional<CertifiedKey> certified)
{
    std::lock_guard lock(mu_);
    Context& ctx = session(session_id, GatewayOp::AsymmVerify);
    const Record& rec = resolve_kind(session_id, public_key, {KeyKind::PeerPublic, KeyKind::CaRootPublic});
    if (certified && rec.kind != KeyKind::CaRootPublic) throw Error(Errc::WrongKeyKind, "certify needs a CA root");
    bool ok = false;
    try {
        ok = crypto_->verify(rec.material, message, signature);
    } catch (const Error&) {
        ok = false;
    }
    if (!ok) {
        erase_session_keys(ctx);
        ctx.wiped = true;
        return false;
    }
    if (certified) {
        const ByteView pk = certified->public_key;
        store(ctx, certified->out, KeyKind::PeerPublic, Bytes(pk.begin(), pk.end()));
    }
    return true;
}

void KeyVault::hkdf_extract(ContextId session_id, Operand salt, KeyRef ikm, KeyId out)
{
    std::lock_guard lock(mu_);
    Context& ctx = session(session_id, GatewayOp::HkdfExtract);
    Bytes s = operand_bytes(session_id, salt, {KeyKind::IntermediateSecret});
    const Record& in = resolve_kind(session_id, ikm, {KeyKind::IntermediateSecret});
    Bytes prk = crypto_->hkdf_extract(s, in.material);
    secure_zero(s);
    store(ctx, out, KeyKind::IntermediateSecret, std::move(prk));
}

Bytes KeyVault::hkdf_expand(ContextId session_id, KeyRef prk, ByteView info, size_t out_len, ExpandTarget target)
{
    std::lock_guard lock(mu_);
    Context& ctx = session(session_id, GatewayOp::HkdfExpand);
    const Record& rec = resolve_kind(session_id, prk, {KeyKind::IntermediateSecret, KeyKind::SessionResult});
    if (std::holds_alternative<PublicOutput>(target)) {
        if (rec.kind != KeyKind::SessionResult) throw Error(Errc::WrongKeyKind, "public output needs SessionResult");
        return emit("exporter", crypto_->hkdf_expand(rec.material, info, out_len), true);
    }
    const StoreAs dst = std::get<StoreAs>(target);
    if (dst.kind != KeyKind::IntermediateSecret && dst.kind != KeyKind::SessionResult) {
        throw Error(Errc::WrongKeyKind, key_kind_name(dst.kind));
    }
    Bytes okm = crypto_->hkdf_expand(rec.material, info, out_len);
    store(ctx, dst.id, dst.kind, std::move(okm));
    return {};
}

void KeyVault::dh_secret_derive(ContextId session_id, KeyRef own_secret, Operand peer_public, KeyId out)
{
    std::lock_guard lock(mu_);
    Context& ctx = session(session_id, GatewayOp::DhSecretDerive);
    const Record& own = resolve_kind(session_id, own_secret, {KeyKind::EphemeralSecret, KeyKind::StaticDhSecret});
    const Bytes peer = operand_bytes(session_id, peer_public, {KeyKind::PeerPublic});
    Bytes shared = crypto_->dh_derive(own.material, peer);
    store(ctx, out, KeyKind::IntermediateSecret, std::move(shared));
}

Bytes KeyVault::hash(ContextId session_id, ByteView data)
{
    std::lock_guard lock(mu_);
    session(session_id, GatewayOp::Hash);
    return emit("hash", crypto_->hash(data));
}

Bytes KeyVault::xor_bytes(ContextId session_id, Operand a, ByteView b)
{
    std::lock_guard lock(mu_);
    session(session_id, GatewayOp::Xor);
    Bytes out = operand_bytes(session_id, a, {KeyKind::IntermediateSecret});
    if (out.size() != b.size()) {
        secure_zero(out);
        throw Error(Errc::BadLength, "xor operands differ in length");
    }
    for (size_t i = 0; i < out.size(); ++i) out[i] ^= b[i];
    return emit("xor_bytes", std::move(out));
}

std::optional<KeyKind> KeyVault::key_kind(KeyRef ref) const
{
    std::lock_guard lock(mu_);
    auto c = contexts_.find(ref.context);
    if (c == contexts_.end()) return std::nullopt;
    auto k = c->second.keys.find(ref.key);
    if (k == c->second.keys.end()) return std::nullopt;
    return k->second.kind;
}

std::optional<ContextKind> KeyVault::context_kind(ContextId id) const
{
    std::lock_guard lock(mu_);
    auto c = contexts_.find(id);
    if (c == contexts_.end()) return std::nullopt;
    return c->second.kind;
}

bool KeyVault::is_wiped(ContextId id) const
{
    std::lock_guard lock(mu_);
    return context(id).wiped;
}

size_t KeyVault::call_count(ContextId session_id, GatewayOp op) const
{
    std::lock_guard lock(mu_);
    return context(session_id).calls[static_cast<size_t>(op)];
}

}  // namespace tinysec::vault
