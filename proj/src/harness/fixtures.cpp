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

#include "tinysec/harness/fixtures.hpp"
#include "tinysec/cbor_cert.hpp"
#include "tinysec/crypto.hpp"

#include <algorithm>

namespace tinysec::harness {

namespace {

// 2023-11-14 and ten years later; both need 5-byte CBOR heads.
constexpr uint32_t kNotBefore = 1700000000;
constexpr uint32_t kNotAfter = kNotBefore + 10u * 365u * 86400u;

class Draw {
public:
    explicit Draw(uint64_t seed) : rng_(seed) {}

    Bytes bytes(size_t n)
    {
        Bytes out(n);
        rng_(out);
        return out;
    }

    uint64_t u64()
    {
        uint64_t v = 0;
        for (uint8_t b : bytes(8)) v = (v << 8) | b;
        return v;
    }

    // A single-byte identifier in 0..47 not yet in `used`.
    Bytes short_id(std::vector<uint8_t>& used)
    {
        for (;;) {
            const uint8_t v = static_cast<uint8_t>(bytes(1)[0] % 48);
            if (std::find(used.begin(), used.end(), v) != used.end()) continue;
            used.push_back(v);
            return Bytes{v};
        }
    }

private:
    crypto::SeededRandom rng_;
};

Bytes make_cert(const crypto::CryptoProvider& crypto, ByteView ca_secret, Draw& draw, std::string_view subject,
                ByteView public_key)
{
    edhoc::Certificate c;
    c.serial = draw.bytes(3);
    c.issuer = to_bytes(kCaName);
    c.not_before = kNotBefore;
    c.not_after = kNotAfter;
    c.subject = to_bytes(subject);
    c.subject_public_key.assign(public_key.begin(), public_key.end());
    edhoc::sign_certificate(crypto, ca_secret, c);
    return edhoc::encode_certificate(c);
}

DeviceFixture make_device(const crypto::CryptoProvider& crypto, ByteView ca_secret, Draw& draw,
                          std::vector<uint8_t>& kids, std::vector<uint8_t>& cids, std::string_view tag)
{
    DeviceFixture d;
    d.signature_secret = draw.bytes(crypto::kSignKeyLen);
    d.signature_public = crypto.sign_public(d.signature_secret);
    d.dh_secret = draw.bytes(crypto::kDhKeyLen);
    d.dh_public = crypto.dh_public(d.dh_secret);
    d.kid_signature = draw.short_id(kids);
    d.kid_dh = draw.short_id(kids);
    d.connection_id = draw.short_id(cids);
    d.cert_signature = make_cert(crypto, ca_secret, draw, std::string(tag) + "-sig", d.signature_public);
    d.cert_dh = make_cert(crypto, ca_secret, draw, std::string(tag) + "-sdh", d.dh_public);
    d.vault_seed = draw.u64();
    return d;
}

}  // namespace

Fixtures make_fixtures(uint64_t seed)
{
    auto crypto = crypto::make_default_provider(crypto::system_random());
    Draw draw(seed);
    Fixtures f;
    f.seed = seed;
    f.now = kNotBefore + 86400;
    f.ca_secret = draw.bytes(crypto::kSignKeyLen);
    f.ca_public = crypto->sign_public(f.ca_secret);
    std::vector<uint8_t> kids;
    std::vector<uint8_t> cids;
    f.initiator = make_device(*crypto, f.ca_secret, draw, kids, cids, "init");
    f.responder = make_device(*crypto, f.ca_secret, draw, kids, cids, "resp");
    f.oscore_master_secret = draw.bytes(16);
    f.oscore_master_salt = draw.bytes(8);
    return f;
}

std::vector<Bytes> provisioned_secrets(const Fixtures& f)
{
    return {f.ca_secret, f.initiator.signature_secret, f.initiator.dh_secret, f.responder.signature_secret,
            f.responder.dh_secret, f.oscore_master_secret};
}

std::shared_ptr<vault::KeyVault> make_device_vault(const Fixtures& f, edhoc::Role role)
{
    return std::make_shared<vault::KeyVault>(
        crypto::make_default_provider(crypto::SeededRandom(f.device(role).vault_seed)));
}

Endpoint provision_endpoint(const Fixtures& f, edhoc::Role role, const edhoc::AuthMethod& method)
{
    using vault::KeyKind;
    const DeviceFixture& own = f.device(role);
    const DeviceFixture& peer = f.device(role == edhoc::Role::Initiator ? edhoc::Role::Responder
                                                                          : edhoc::Role::Initiator);
    Endpoint ep;
    ep.vault = make_device_vault(f, role);
    const vault::ContextId own_ctx = ep.vault->provision(
        vault::ContextKind::OwnContext, {{kOwnDhKey, KeyKind::StaticDhSecret, own.dh_secret},
                                         {kOwnSignatureKey, KeyKind::SignatureSecret, own.signature_secret}});
    const vault::ContextId peer_ctx = ep.vault->provision(
        vault::ContextKind::PeerContext, {{kPeerSignatureKey, KeyKind::PeerPublic, peer.signature_public},
                                          {kPeerDhKey, KeyKind::PeerPublic, peer.dh_public},
                                          {kCaRootKey, KeyKind::CaRootPublic, f.ca_public}});

    const edhoc::SideMethod side = role == edhoc::Role::Initiator ? method.initiator : method.responder;
    const bool sig = side.auth == edhoc::AuthKind::Signature;
    const bool rpk = side.cred == edhoc::CredKind::Rpk;

    ep.params.method = method;
    ep.params.own_context = own_ctx;
    ep.params.auth_key = {own_ctx, sig ? kOwnSignatureKey : kOwnDhKey};
    ep.params.own_kid = sig ? own.kid_signature : own.kid_dh;
    if (rpk) {
        ep.params.own_credential = sig ? own.signature_public : own.dh_public;
    } else {
        ep.params.own_credential = sig ? own.cert_signature : own.cert_dh;
    }
    ep.params.connection_id = own.connection_id;
    ep.params.now = f.now;

    ep.creds.entries = {
        {edhoc::CredKind::Rpk, peer.kid_signature, peer.signature_public, {peer_ctx, kPeerSignatureKey}},
        {edhoc::CredKind::Rpk, peer.kid_dh, peer.dh_public, {peer_ctx, kPeerDhKey}},
        {edhoc::CredKind::CborCert, to_bytes(kCaName), {}, {peer_ctx, kCaRootKey}},
    };
    return ep;
}

}  // namespace tinysec::harness
