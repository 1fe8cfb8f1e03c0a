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

#include "tinysec/cbor_cert.hpp"
#include "tinysec/edhoc.hpp"
#include "tinysec/error.hpp"
#include "tinysec/harness/fixtures.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace tinysec;
using namespace tinysec::edhoc;
using harness::Fixtures;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return Errc::Truncated;
}

class Cert : public ::testing::Test {
protected:
    Fixtures f = harness::make_fixtures(17);
    std::shared_ptr<const crypto::CryptoProvider> p = crypto::make_default_provider(crypto::SeededRandom(1));

    // A vault with the CA root and a session to validate in.
    struct Env {
        std::shared_ptr<vault::KeyVault> v;
        vault::ContextId session;
        CredentialSet creds;
    };
    Env env()
    {
        auto ep = harness::provision_endpoint(f, Role::Responder, AuthMethod::diagonal(AuthKind::Signature, CredKind::CborCert));
        return {ep.vault, ep.vault->begin_session(ep.params.own_context), ep.creds};
    }

    Bytes reissue(const std::function<void(Certificate&)>& change, bool resign = true)
    {
        Certificate c = decode_certificate(f.initiator.cert_signature);
        change(c);
        if (resign) sign_certificate(*p, f.ca_secret, c);
        return encode_certificate(c);
    }
};

}  // namespace

TEST_F(Cert, FixturesAre135Bytes)
{
    for (const auto* d : {&f.initiator, &f.responder}) {
        EXPECT_EQ(d->cert_signature.size(), harness::kCertificateSize);
        EXPECT_EQ(d->cert_dh.size(), harness::kCertificateSize);
    }
}

TEST_F(Cert, RoundTripAndSignature)
{
    const Certificate c = decode_certificate(f.initiator.cert_signature);
    EXPECT_EQ(encode_certificate(c), f.initiator.cert_signature);
    EXPECT_EQ(c.subject_public_key, f.initiator.signature_public);
    EXPECT_EQ(c.issuer, to_bytes(harness::kCaName));
    EXPECT_TRUE(p->verify(f.ca_public, certificate_tbs(c), c.signature));
}

TEST_F(Cert, DecodeErrors)
{
    const Bytes& good = f.initiator.cert_signature;
    for (size_t n = 0; n < good.size(); ++n) {
        EXPECT_EQ(code_of([&] { decode_certificate(ByteView(good).first(n)); }), Errc::DecodeError) << n;
    }
    Bytes trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(code_of([&] { decode_certificate(trailing); }), Errc::DecodeError);
    EXPECT_EQ(code_of([&] { decode_certificate(reissue([](Certificate& c) { c.subject_public_key.pop_back(); })); }),
              Errc::DecodeError);
}

TEST_F(Cert, ValidateAccepts)
{
    auto e = env();
    const auto vc = validate_credential(*e.v, e.session, {CredKind::CborCert, f.initiator.cert_signature}, e.creds,
                                        f.now, vault::KeyId{40});
    EXPECT_EQ(vc.cred, f.initiator.cert_signature);
    EXPECT_EQ(vc.key, (vault::KeyRef{e.session, vault::KeyId{40}}));
    EXPECT_EQ(e.v->key_kind(vc.key), vault::KeyKind::PeerPublic);
}

TEST_F(Cert, FlippedSignatureIsRejected)
{
    auto e = env();
    Bytes bad = f.initiator.cert_signature;
    bad[bad.size() - 5] ^= 0x01;
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::CborCert, bad}, e.creds, f.now, vault::KeyId{40});
              }),
              Errc::CertSignatureInvalid);
    EXPECT_TRUE(e.v->is_wiped(e.session));
}

TEST_F(Cert, ChangedSubjectKeyIsRejected)
{
    auto e = env();
    const Bytes bad = reissue([](Certificate& c) { c.subject_public_key[0] ^= 1; }, false);
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::CborCert, bad}, e.creds, f.now, vault::KeyId{40});
              }),
              Errc::CertSignatureInvalid);
}

TEST_F(Cert, Expiry)
{
    auto e = env();
    const Bytes old = reissue([](Certificate& c) { c.not_after = c.not_before + 10; });
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::CborCert, old}, e.creds, f.now, vault::KeyId{40});
              }),
              Errc::CertExpired);
    const Bytes future = reissue([&](Certificate& c) { c.not_before = f.now + 1; });
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::CborCert, future}, e.creds, f.now,
                                      vault::KeyId{40});
              }),
              Errc::CertExpired);
}

TEST_F(Cert, UnknownIssuerAndKid)
{
    auto e = env();
    const Bytes other = reissue([](Certificate& c) { c.issuer = to_bytes("otherCA"); });
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::CborCert, other}, e.creds, f.now, vault::KeyId{40});
              }),
              Errc::CredentialUnknown);
    Bytes unused_kid{0xfe};
    EXPECT_EQ(code_of([&] {
                  validate_credential(*e.v, e.session, {CredKind::Rpk, unused_kid}, e.creds, f.now, vault::KeyId{40});
              }),
              Errc::CredentialUnknown);
}

TEST_F(Cert, RpkLookup)
{
    auto e = env();
    const auto vc = validate_credential(*e.v, e.session, {CredKind::Rpk, f.initiator.kid_dh}, e.creds, f.now,
                                        vault::KeyId{40});
    EXPECT_EQ(vc.cred, f.initiator.dh_public);
}
