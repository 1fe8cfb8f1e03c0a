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

#include "tinysec/edhoc.hpp"
#include "tinysec/cbor.hpp"
#include "tinysec/crypto.hpp"
#include "tinysec/error.hpp"

#include <algorithm>

namespace tinysec::edhoc {

namespace {

// Per-session vault slots.
enum Slot : uint16_t {
    kEphemeral = 1,
    kGxy,
    kPrk2e,
    kGrx,
    kPrk3e2m,
    kGiy,
    kPrk4x3m,
    kK2m,
    kIv2m,
    kKeystream2,
    kK3ae,
    kIv3ae,
    kK3m,
    kIv3m,
    kPrkOut,
    kPeerKey,
};

constexpr size_t kKeyLen = crypto::kAeadKeyLen;
constexpr size_t kIvLen = crypto::kAeadNonceLen;
constexpr uint64_t kSuite = 0;
constexpr uint64_t kErrUnspecified = 1;

const char* side_name(SideMethod s)
{
    if (s.auth == AuthKind::Signature) return s.cred == CredKind::Rpk ? "sig-rpk" : "sig-cert";
    return s.cred == CredKind::Rpk ? "static-dh-rpk" : "static-dh-cert";
}

std::optional<SideMethod> parse_side(std::string_view s)
{
    if (s == "sig-rpk") return SideMethod{AuthKind::Signature, CredKind::Rpk};
    if (s == "sig-cert") return SideMethod{AuthKind::Signature, CredKind::CborCert};
    if (s == "static-dh-rpk" || s == "sdh-rpk") return SideMethod{AuthKind::StaticDh, CredKind::Rpk};
    if (s == "static-dh-cert" || s == "sdh-cert") return SideMethod{AuthKind::StaticDh, CredKind::CborCert};
    return std::nullopt;
}

bool is_decode_class(Errc c)
{
    switch (c) {
    case Errc::Truncated:
    case Errc::UnsupportedMajorType:
    case Errc::NonCanonical:
    case Errc::IntegerOverflow:
    case Errc::NestingTooDeep:
    case Errc::TypeMismatch: return true;
    default: return false;
    }
}

Bytes bstr(ByteView v)
{
    Bytes out;
    cbor::Encoder(out).bstr(v);
    return out;
}

Bytes bstr_id(ByteView v)
{
    Bytes out;
    cbor::Encoder enc(out);
    encode_bstr_id(enc, v);
    return out;
}

Bytes raw(ByteView v)
{
    return Bytes(v.begin(), v.end());
}

struct Inner {
    Bytes id_cred_raw;
    IdCred id_cred;
    Bytes sig_or_mac;
};

// PLAINTEXT_2 / PLAINTEXT_3 = ID_CRED_x, Signature_or_MAC_x
Inner parse_inner(ByteView plaintext)
{
    try {
        cbor::Reader r(plaintext);
        Inner in;
        {
            cbor::Reader probe(r.remaining());
            in.id_cred_raw = raw(probe.skip_item());
        }
        in.id_cred = read_id_cred(r);
        in.sig_or_mac = raw(r.read_bstr());
        if (!r.at_end()) throw Error(Errc::DecodeError, "trailing bytes in plaintext");
        return in;
    } catch (const Error& e) {
        if (e.code() == Errc::DecodeError) throw;
        throw Error(Errc::DecodeError, e.what());
    }
}

Bytes kdf_info(std::string_view label, ByteView th, size_t len)
{
    Bytes out;
    cbor::Encoder(out).array(3).tstr(label).bstr(th).uint(len);
    return out;
}

Bytes encrypt0_aad(ByteView th)
{
    Bytes out;
    cbor::Encoder(out).array(3).tstr("Encrypt0").bstr({}).bstr(th);
    return out;
}

}  // namespace

uint8_t AuthMethod::method_id() const
{
    return static_cast<uint8_t>((initiator.auth == AuthKind::StaticDh ? 2 : 0) +
                                (responder.auth == AuthKind::StaticDh ? 1 : 0));
}

std::string AuthMethod::name() const
{
    if (initiator == responder) return side_name(initiator);
    return std::string(side_name(initiator)) + "/" + side_name(responder);
}

std::vector<AuthMethod> AuthMethod::all()
{
    const SideMethod sides[] = {{AuthKind::StaticDh, CredKind::Rpk},
                                {AuthKind::Signature, CredKind::Rpk},
                                {AuthKind::StaticDh, CredKind::CborCert},
                                {AuthKind::Signature, CredKind::CborCert}};
    std::vector<AuthMethod> out;
    for (const auto& i : sides) {
        for (const auto& r : sides) out.push_back({i, r});
    }
    return out;
}

std::optional<AuthMethod> AuthMethod::parse(std::string_view name)
{
    const auto slash = name.find('/');
    if (slash == std::string_view::npos) {
        auto s = parse_side(name);
        if (!s) return std::nullopt;
        return AuthMethod{*s, *s};
    }
    auto i = parse_side(name.substr(0, slash));
    auto r = parse_side(name.substr(slash + 1));
    if (!i || !r) return std::nullopt;
    return AuthMethod{*i, *r};
}

Bytes encode_id_cred(const IdCred& id)
{
    Bytes out;
    cbor::Encoder enc(out);
    if (id.kind == CredKind::Rpk) {
        encode_bstr_id(enc, id.value);
    } else {
        enc.map(1).uint(kIdCredCertLabel).bstr(id.value);
    }
    return out;
}

IdCred read_id_cred(cbor::Reader& r)
{
    if (r.peek_kind() == cbor::Kind::Map) {
        if (r.read_map() != 1 || r.read_uint() != kIdCredCertLabel) {
            throw Error(Errc::DecodeError, "unsupported ID_CRED map");
        }
        return {CredKind::CborCert, raw(r.read_bstr())};
    }
    return {CredKind::Rpk, read_bstr_id(r)};
}

ValidatedCredential validate_credential(vault::KeyVault& vault, vault::ContextId session, const IdCred& presented,
                                        const CredentialSet& creds, uint64_t now, vault::KeyId out)
{
    if (presented.kind == CredKind::Rpk) {
        for (const auto& e : creds.entries) {
            if (e.kind == CredKind::Rpk && e.id == presented.value) return {e.key, e.credential};
        }
        throw Error(Errc::CredentialUnknown, "no trusted raw public key with this kid");
    }

    const Certificate cert = decode_certificate(presented.value);
    const PeerCredential* ca = nullptr;
    for (const auto& e : creds.entries) {
        if (e.kind == CredKind::CborCert && e.id == cert.issuer) {
            ca = &e;
            break;
        }
    }
    if (!ca) throw Error(Errc::CredentialUnknown, "no trusted CA for issuer");
    if (now < cert.not_before || now > cert.not_after) throw Error(Errc::CertExpired);
    const Bytes tbs = certificate_tbs(cert);
    if (!vault.asymm_verify(session, ca->key, tbs, cert.signature,
                            vault::CertifiedKey{cert.subject_public_key, out})) {
        throw Error(Errc::CertSignatureInvalid);
    }
    return {{session, out}, presented.value};
}

Bytes exporter(vault::KeyVault& vault, const HandshakeResult& result, std::string_view label, ByteView context,
               size_t length)
{
    if (length == 0 || length > 255) throw Error(Errc::BadLength, "exporter length");
    Bytes info;
    cbor::Encoder(info).array(3).tstr(label).bstr(context).uint(length);
    return vault.hkdf_expand(result.session, result.prk_out, info, length, vault::PublicOutput{});
}

Session::Session(vault::KeyVault& vault, Role role, EndpointParams params, CredentialSet creds)
    : vault_(vault), role_(role), params_(std::move(params)), creds_(std::move(creds))
{
    const auto kind = vault_.key_kind(params_.auth_key);
    const auto want = own_side().auth == AuthKind::Signature ? vault::KeyKind::SignatureSecret
                                                             : vault::KeyKind::StaticDhSecret;
    if (!kind) throw Error(Errc::UnknownKey, "authentication key");
    if (*kind != want) throw Error(Errc::WrongKeyKind, "authentication key does not match method");
    if (creds_.entries.empty()) throw Error(Errc::CredentialUnknown, "empty credential set");
    sid_ = vault_.begin_session(params_.own_context);
}

SideMethod Session::own_side() const
{
    return role_ == Role::Initiator ? params_.method.initiator : params_.method.responder;
}

SideMethod Session::peer_side() const
{
    return role_ == Role::Initiator ? params_.method.responder : params_.method.initiator;
}

template <typename F>
auto Session::guarded(F&& f, bool authenticating)
{
    try {
        return f();
    } catch (const Error& e) {
        fail();
        // Messages 2 and 3 get a single rejection code whatever the cause, so
        // a corrupted message cannot be told apart from a forged one. The
        // cause stays in the text.
        if (authenticating || e.code() == Errc::AuthFailed) {
            if (e.code() == Errc::AuthFailedWiped) throw;
            throw Error(Errc::AuthFailedWiped, e.what());
        }
        if (is_decode_class(e.code())) throw Error(Errc::DecodeError, e.what());
        throw;
    } catch (...) {
        fail();
        throw;
    }
}

void Session::fail()
{
    state_ = State::Failed;
    try {
        vault_.wipe_session(sid_);
    } catch (const Error&) {
        // Session already gone; nothing left to erase.
    }
}

Bytes Session::transcript(std::initializer_list<ByteView> parts)
{
    Bytes data;
    for (ByteView p : parts) append(data, p);
    return vault_.hash(sid_, data);
}

void Session::derive(vault::KeyRef prk, std::string_view label, ByteView th, size_t len, uint16_t out)
{
    vault_.hkdf_expand(sid_, prk, kdf_info(label, th, len), len, vault::StoreAs{vault::KeyId{out}});
}

Bytes Session::mac_aad(ByteView id_cred, ByteView th, ByteView cred) const
{
    Bytes ext = concat(bstr(th), bstr(cred));
    Bytes out;
    cbor::Encoder(out).array(3).tstr("Encrypt0").bstr(id_cred).bstr(ext);
    return out;
}

Bytes Session::sig_structure(ByteView id_cred, ByteView th, ByteView cred, ByteView mac) const
{
    Bytes ext = concat(bstr(th), bstr(cred));
    Bytes out;
    cbor::Encoder(out).array(4).tstr("Signature1").bstr(id_cred).bstr(ext).bstr(mac);
    return out;
}

Bytes Session::authenticate(vault::KeyRef prk, std::string_view mac_label, ByteView th, ByteView id_cred,
                            ByteView cred, uint16_t key_slot, uint16_t iv_slot)
{
    derive(prk, std::string("K_") + std::string(mac_label), th, kKeyLen, key_slot);
    derive(prk, std::string("IV_") + std::string(mac_label), th, kIvLen, iv_slot);
    Bytes mac = vault_.aead(sid_, slot(key_slot), slot(iv_slot), vault::Direction::Seal,
                            mac_aad(id_cred, th, cred), {});
    if (own_side().auth == AuthKind::StaticDh) return mac;
    return vault_.asymm_sign(sid_, params_.auth_key, sig_structure(id_cred, th, cred, mac));
}

void Session::verify_peer(AuthKind peer_auth, vault::KeyRef prk, std::string_view mac_label, ByteView th,
                          ByteView id_cred, ByteView cred, ByteView sig_or_mac, uint16_t key_slot,
                          uint16_t iv_slot)
{
    derive(prk, std::string("K_") + std::string(mac_label), th, kKeyLen, key_slot);
    derive(prk, std::string("IV_") + std::string(mac_label), th, kIvLen, iv_slot);
    if (peer_auth == AuthKind::StaticDh) {
        if (sig_or_mac.size() < crypto::kAeadTagLen) {
            vault_.wipe_session(sid_);
            throw Error(Errc::AuthFailed, "short MAC");
        }
        // Opening a tag-only ciphertext checks the MAC inside the vault.
        vault_.aead(sid_, slot(key_slot), slot(iv_slot), vault::Direction::Open, mac_aad(id_cred, th, cred),
                    sig_or_mac);
        return;
    }
    Bytes mac = vault_.aead(sid_, slot(key_slot), slot(iv_slot), vault::Direction::Seal,
                            mac_aad(id_cred, th, cred), {});
    if (!vault_.asymm_verify(sid_, peer_->key, sig_structure(id_cred, th, cred, mac), sig_or_mac)) {
        throw Error(Errc::AuthFailed, "signature");
    }
}

Bytes Session::own_id_cred_encoded(CredKind kind) const
{
    if (kind == CredKind::Rpk) return encode_id_cred({CredKind::Rpk, params_.own_kid});
    return encode_id_cred({CredKind::CborCert, params_.own_credential});
}

void Session::key_schedule_step(Step step)
{
    switch (step) {
    case Step::Prk2e:
        if (!have_g_xy_) throw Error(Errc::WrongState, "no ephemeral shared secret yet");
        vault_.hkdf_extract(sid_, ByteView{}, slot(kGxy), vault::KeyId{kPrk2e});
        prks_.prk_2e = slot(kPrk2e);
        return;

    case Step::Prk3e2m:
        if (!prks_.prk_2e) throw Error(Errc::WrongState, "PRK_2e missing");
        if (params_.method.responder.auth == AuthKind::Signature) {
            prks_.prk_3e2m = prks_.prk_2e;
            return;
        }
        if (role_ == Role::Initiator) {
            if (!peer_) throw Error(Errc::WrongState, "responder not yet identified");
            vault_.dh_secret_derive(sid_, slot(kEphemeral), peer_->key, vault::KeyId{kGrx});
        } else {
            vault_.dh_secret_derive(sid_, params_.auth_key, ByteView(g_x_), vault::KeyId{kGrx});
        }
        vault_.hkdf_extract(sid_, *prks_.prk_2e, slot(kGrx), vault::KeyId{kPrk3e2m});
        prks_.prk_3e2m = slot(kPrk3e2m);
        return;

    case Step::Prk4x3m:
        if (!have_msg2_ || !prks_.prk_3e2m || th_3_.empty()) {
            throw Error(Errc::WrongState, "message_2 not processed");
        }
        if (params_.method.initiator.auth == AuthKind::Signature) {
            prks_.prk_4x3m = prks_.prk_3e2m;
            return;
        }
        if (role_ == Role::Initiator) {
            vault_.dh_secret_derive(sid_, params_.auth_key, ByteView(g_y_), vault::KeyId{kGiy});
        } else {
            if (!peer_) throw Error(Errc::WrongState, "initiator not yet identified");
            vault_.dh_secret_derive(sid_, slot(kEphemeral), peer_->key, vault::KeyId{kGiy});
        }
        vault_.hkdf_extract(sid_, *prks_.prk_3e2m, slot(kGiy), vault::KeyId{kPrk4x3m});
        prks_.prk_4x3m = slot(kPrk4x3m);
        return;

    case Step::PrkOut:
        if (!prks_.prk_4x3m || th_4_.empty()) throw Error(Errc::WrongState, "message_3 not processed");
        vault_.hkdf_expand(sid_, *prks_.prk_4x3m, kdf_info("PRK_out", th_4_, crypto::kHashLen), crypto::kHashLen,
                           vault::StoreAs{vault::KeyId{kPrkOut}, vault::KeyKind::SessionResult});
        prks_.prk_out = slot(kPrkOut);
        return;
    }
}

Bytes Session::make_message1()
{
    if (role_ != Role::Initiator || state_ != State::Start) throw Error(Errc::WrongState);
    return guarded([&] {
        g_x_ = vault_.generate_ephemeral(sid_, vault::KeyId{kEphemeral});
        c_i_ = params_.connection_id;
        Message1 m{params_.method.method_id(), {kSuite}, g_x_, c_i_};
        Bytes out = encode_message1(m);
        th_1_ = vault_.hash(sid_, out);
        state_ = State::WaitMsg2;
        return out;
    });
}

Bytes Session::handle_message1(ByteView msg1)
{
    if (role_ != Role::Responder || state_ != State::Start) throw Error(Errc::WrongState);
    return guarded([&] {
        const Message1 m = decode_message1(msg1);
        if (m.method != params_.method.method_id()) throw Error(Errc::DecodeError, "authentication method not supported");
        if (std::find(m.suites.begin(), m.suites.end(), kSuite) == m.suites.end()) {
            throw Error(Errc::DecodeError, "no supported cipher suite");
        }
        if (m.g_x.size() != crypto::kDhKeyLen) throw Error(Errc::DecodeError, "G_X length");
        g_x_ = m.g_x;
        c_i_ = m.c_i;
        th_1_ = vault_.hash(sid_, msg1);

        g_y_ = vault_.generate_ephemeral(sid_, vault::KeyId{kEphemeral});
        c_r_ = params_.connection_id;
        vault_.dh_secret_derive(sid_, slot(kEphemeral), ByteView(g_x_), vault::KeyId{kGxy});
        have_g_xy_ = true;
        key_schedule_step(Step::Prk2e);

        th_2_ = transcript({bstr(th_1_), encode_data2(g_y_, c_r_)});
        key_schedule_step(Step::Prk3e2m);

        const Bytes id_cred_r = own_id_cred_encoded(own_side().cred);
        const Bytes sig_or_mac =
            authenticate(*prks_.prk_3e2m, "2m", th_2_, id_cred_r, params_.own_credential, kK2m, kIv2m);
        const Bytes plaintext = concat(id_cred_r, bstr(sig_or_mac));

        derive(*prks_.prk_2e, "KEYSTREAM_2", th_2_, plaintext.size(), kKeystream2);
        ciphertext_2_ = vault_.xor_bytes(sid_, slot(kKeystream2), plaintext);
        have_msg2_ = true;
        state_ = State::WaitMsg3;
        return encode_message2({g_y_, c_r_, ciphertext_2_});
    });
}

Bytes Session::handle_message2(ByteView msg2)
{
    if (role_ != Role::Initiator || state_ != State::WaitMsg2) throw Error(Errc::WrongState);
    return guarded([&] {
        const Message2 m = decode_message2(msg2);
        if (m.g_y.size() != crypto::kDhKeyLen) throw Error(Errc::DecodeError, "G_Y length");
        g_y_ = m.g_y;
        c_r_ = m.c_r;
        vault_.dh_secret_derive(sid_, slot(kEphemeral), ByteView(g_y_), vault::KeyId{kGxy});
        have_g_xy_ = true;
        key_schedule_step(Step::Prk2e);
        th_2_ = transcript({bstr(th_1_), encode_data2(g_y_, c_r_)});

        derive(*prks_.prk_2e, "KEYSTREAM_2", th_2_, m.ciphertext.size(), kKeystream2);
        const Bytes plaintext = vault_.xor_bytes(sid_, slot(kKeystream2), m.ciphertext);
        const Inner inner = parse_inner(plaintext);
        if (inner.id_cred.kind != peer_side().cred) throw Error(Errc::CredentialUnknown, "unexpected credential type");
        peer_ = validate_credential(vault_, sid_, inner.id_cred, creds_, params_.now, vault::KeyId{kPeerKey});

        key_schedule_step(Step::Prk3e2m);
        verify_peer(peer_side().auth, *prks_.prk_3e2m, "2m", th_2_, inner.id_cred_raw, peer_->cred,
                    inner.sig_or_mac, kK2m, kIv2m);

        ciphertext_2_ = m.ciphertext;
        th_3_ = transcript({bstr(th_2_), bstr(ciphertext_2_), bstr_id(c_r_)});
        have_msg2_ = true;
        key_schedule_step(Step::Prk4x3m);

        const Bytes id_cred_i = own_id_cred_encoded(own_side().cred);
        const Bytes sig_or_mac =
            authenticate(*prks_.prk_4x3m, "3m", th_3_, id_cred_i, params_.own_credential, kK3m, kIv3m);
        const Bytes plaintext_3 = concat(id_cred_i, bstr(sig_or_mac));
        derive(*prks_.prk_3e2m, "K_3ae", th_3_, kKeyLen, kK3ae);
        derive(*prks_.prk_3e2m, "IV_3ae", th_3_, kIvLen, kIv3ae);
        const Bytes ciphertext_3 = vault_.aead(sid_, slot(kK3ae), slot(kIv3ae), vault::Direction::Seal,
                                               encrypt0_aad(th_3_), plaintext_3);

        th_4_ = transcript({bstr(th_3_), bstr(ciphertext_3)});
        key_schedule_step(Step::PrkOut);
        vault_.finish_session(sid_);
        state_ = State::Complete;
        return encode_message3({c_r_, ciphertext_3});
    }, true);
}

void Session::handle_message3(ByteView msg3)
{
    if (role_ != Role::Responder || state_ != State::WaitMsg3) throw Error(Errc::WrongState);
    guarded([&] {
        const Message3 m = decode_message3(msg3);
        // The received C_R goes into TH_3, so a rewritten C_R breaks decryption.
        th_3_ = transcript({bstr(th_2_), bstr(ciphertext_2_), bstr_id(m.c_r)});
        derive(*prks_.prk_3e2m, "K_3ae", th_3_, kKeyLen, kK3ae);
        derive(*prks_.prk_3e2m, "IV_3ae", th_3_, kIvLen, kIv3ae);
        const Bytes plaintext = vault_.aead(sid_, slot(kK3ae), slot(kIv3ae), vault::Direction::Open,
                                            encrypt0_aad(th_3_), m.ciphertext);
        const Inner inner = parse_inner(plaintext);
        if (inner.id_cred.kind != peer_side().cred) throw Error(Errc::CredentialUnknown, "unexpected credential type");
        peer_ = validate_credential(vault_, sid_, inner.id_cred, creds_, params_.now, vault::KeyId{kPeerKey});

        key_schedule_step(Step::Prk4x3m);
        verify_peer(peer_side().auth, *prks_.prk_4x3m, "3m", th_3_, inner.id_cred_raw, peer_->cred,
                    inner.sig_or_mac, kK3m, kIv3m);

        th_4_ = transcript({bstr(th_3_), bstr(m.ciphertext)});
        key_schedule_step(Step::PrkOut);
        vault_.finish_session(sid_);
        state_ = State::Complete;
    }, true);
}

HandshakeResult Session::result() const
{
    if (state_ != State::Complete || !prks_.prk_out) throw Error(Errc::WrongState, "handshake not complete");
    return {sid_, *prks_.prk_out, th_4_};
}

namespace {

void send_error(const TxFn& tx, const Error& cause)
{
    try {
        tx(encode_error({kErrUnspecified, errc_name(cause.code())}));
    } catch (const Error&) {
        // The peer is unreachable; the local error is what matters.
    }
}

std::optional<ErrorMessage> received_error(Session& s, ByteView msg)
{
    if (!looks_like_error(msg)) return std::nullopt;
    s.fail();
    return decode_error(msg);
}

Bytes receive(Session& s, const RxFn& rx, const char* what)
{
    std::optional<Bytes> msg = rx();
    if (!msg) {
        s.fail();
        throw Error(Errc::TransportError, std::string("timed out waiting for ") + what);
    }
    return std::move(*msg);
}

}  // namespace

RunResult initiator_run(vault::KeyVault& vault, const EndpointParams& params, const CredentialSet& creds,
                        const TxFn& tx, const RxFn& rx, vault::ContextId* session_out)
{
    Session s(vault, Role::Initiator, params, creds);
    if (session_out) *session_out = s.vault_session();
    tx(s.make_message1());
    const Bytes msg2 = receive(s, rx, "message_2");
    if (auto err = received_error(s, msg2)) return *err;
    Bytes msg3;
    try {
        msg3 = s.handle_message2(msg2);
    } catch (const Error& e) {
        send_error(tx, e);
        throw;
    }
    tx(msg3);
    return s.result();
}

RunResult responder_run(vault::KeyVault& vault, const EndpointParams& params, const CredentialSet& creds,
                        const TxFn& tx, const RxFn& rx, vault::ContextId* session_out)
{
    Session s(vault, Role::Responder, params, creds);
    if (session_out) *session_out = s.vault_session();
    const Bytes msg1 = receive(s, rx, "message_1");
    if (auto err = received_error(s, msg1)) return *err;
    Bytes msg2;
    try {
        msg2 = s.handle_message1(msg1);
    } catch (const Error& e) {
        send_error(tx, e);
        throw;
    }
    tx(msg2);
    const Bytes msg3 = receive(s, rx, "message_3");
    if (auto err = received_error(s, msg3)) return *err;
    try {
        s.handle_message3(msg3);
    } catch (const Error& e) {
        send_error(tx, e);
        throw;
    }
    return s.result();
}

}  // namespace tinysec::edhoc
