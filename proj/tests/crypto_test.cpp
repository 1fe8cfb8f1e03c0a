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

#include "tinysec/crypto.hpp"
#include "tinysec/error.hpp"
#include "tinysec/vector_file.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace tinysec;

namespace {

std::vector<VectorRecord> vectors(const std::string& kind)
{
    auto recs = load_vector_file(std::string(TINYSEC_VECTOR_DIR) + "/" + kind + ".vec");
    EXPECT_FALSE(recs.empty()) << kind;
    return recs;
}

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

class Crypto : public ::testing::Test {
protected:
    std::shared_ptr<const crypto::CryptoProvider> p = crypto::make_default_provider(crypto::SeededRandom(7));
    const Bytes key = from_hex("000102030405060708090a0b0c0d0e0f");
    const Bytes nonce = from_hex("101112131415161718191a1b1c");
};

}  // namespace

TEST_F(Crypto, AesCcmVectors)
{
    for (const auto& v : vectors("aes_ccm")) {
        const Bytes ct = p->aead_seal(v.at("key"), v.at("nonce"), v.at("aad"), v.at("plaintext"));
        EXPECT_EQ(ct, v.at("ciphertext"));
        EXPECT_EQ(p->aead_open(v.at("key"), v.at("nonce"), v.at("aad"), ct), v.at("plaintext"));
    }
}

TEST_F(Crypto, EmptySealIsJustTheTag)
{
    const Bytes ct = p->aead_seal(key, nonce, {}, {});
    EXPECT_EQ(ct.size(), crypto::kAeadTagLen);
    EXPECT_TRUE(p->aead_open(key, nonce, {}, ct).empty());
}

TEST_F(Crypto, AeadBitFlipsAreRejected)
{
    const Bytes aad = from_hex("a1a2a3");
    const Bytes ct = p->aead_seal(key, nonce, aad, to_bytes("sixteen byte msg"));
    for (size_t i = 0; i < ct.size() * 8; ++i) {
        Bytes bad = ct;
        bad[i / 8] ^= static_cast<uint8_t>(1u << (i % 8));
        EXPECT_EQ(code_of([&] { p->aead_open(key, nonce, aad, bad); }), Errc::AuthFailed) << i;
    }
    for (size_t i = 0; i < aad.size() * 8; ++i) {
        Bytes bad = aad;
        bad[i / 8] ^= static_cast<uint8_t>(1u << (i % 8));
        EXPECT_EQ(code_of([&] { p->aead_open(key, nonce, bad, ct); }), Errc::AuthFailed) << i;
    }
    Bytes other_nonce = nonce;
    other_nonce[12] ^= 1;
    EXPECT_EQ(code_of([&] { p->aead_open(key, other_nonce, aad, ct); }), Errc::AuthFailed);
}

TEST_F(Crypto, AeadLengthChecks)
{
    EXPECT_EQ(code_of([&] { p->aead_open(key, nonce, {}, Bytes(7)); }), Errc::BadLength);
    EXPECT_EQ(code_of([&] { p->aead_seal(Bytes(15), nonce, {}, {}); }), Errc::BadLength);
    EXPECT_EQ(code_of([&] { p->aead_seal(key, Bytes(12), {}, {}); }), Errc::BadLength);
}

TEST_F(Crypto, AeadRandomRoundTrip)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        Bytes pt(rng() % 200), aad(rng() % 40);
        for (auto& b : pt) b = static_cast<uint8_t>(rng());
        for (auto& b : aad) b = static_cast<uint8_t>(rng());
        const Bytes ct = p->aead_seal(key, nonce, aad, pt);
        ASSERT_EQ(ct.size(), pt.size() + crypto::kAeadTagLen);
        ASSERT_EQ(p->aead_open(key, nonce, aad, ct), pt);
    }
}

TEST_F(Crypto, HkdfVectors)
{
    for (const auto& v : vectors("hkdf_sha256")) {
        const Bytes prk = p->hkdf_extract(v.at("salt"), v.at("ikm"));
        EXPECT_EQ(prk, v.at("prk"));
        EXPECT_EQ(p->hkdf_expand(prk, v.at("info"), v.at("okm").size()), v.at("okm"));
    }
}

TEST_F(Crypto, HkdfLimits)
{
    const Bytes prk(32, 1);
    EXPECT_EQ(p->hkdf_expand(prk, {}, crypto::kMaxExpandLen).size(), crypto::kMaxExpandLen);
    EXPECT_EQ(code_of([&] { p->hkdf_expand(prk, {}, crypto::kMaxExpandLen + 1); }), Errc::OutLenTooLarge);
    EXPECT_EQ(code_of([&] { p->hkdf_expand(prk, {}, 0); }), Errc::BadLength);
    EXPECT_EQ(p->hkdf_expand(prk, to_bytes("x"), 40), p->hkdf_expand(prk, to_bytes("x"), 40));
    // Shorter outputs are prefixes of longer ones.
    const Bytes l = p->hkdf_expand(prk, to_bytes("x"), 100);
    EXPECT_EQ(p->hkdf_expand(prk, to_bytes("x"), 33), Bytes(l.begin(), l.begin() + 33));
}

TEST_F(Crypto, Sha256)
{
    EXPECT_EQ(to_hex(p->hash(to_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Crypto, X25519Vectors)
{
    for (const auto& v : vectors("x25519")) {
        EXPECT_EQ(p->dh_derive(v.at("scalar"), v.at("u")), v.at("output"));
    }
}

TEST_F(Crypto, X25519Agreement)
{
    for (int i = 0; i < 50; ++i) {
        const Bytes a = p->random(32), b = p->random(32);
        EXPECT_EQ(p->dh_derive(a, p->dh_public(b)), p->dh_derive(b, p->dh_public(a)));
    }
}

TEST_F(Crypto, X25519LowOrder)
{
    const Bytes a = p->random(32);
    EXPECT_EQ(code_of([&] { p->dh_derive(a, Bytes(32, 0)); }), Errc::LowOrderPoint);
    Bytes one(32, 0);
    one[0] = 1;
    EXPECT_EQ(code_of([&] { p->dh_derive(a, one); }), Errc::LowOrderPoint);
    EXPECT_EQ(code_of([&] { p->dh_derive(a, Bytes(31, 9)); }), Errc::BadLength);
}

TEST_F(Crypto, Ed25519Vectors)
{
    for (const auto& v : vectors("ed25519")) {
        EXPECT_EQ(p->sign_public(v.at("secret")), v.at("public"));
        EXPECT_EQ(p->sign(v.at("secret"), v.at("message")), v.at("signature"));
        EXPECT_TRUE(p->verify(v.at("public"), v.at("message"), v.at("signature")));
    }
}

TEST_F(Crypto, Ed25519RejectsChanges)
{
    const Bytes sk = p->random(32);
    const Bytes pk = p->sign_public(sk);
    const Bytes msg = to_bytes("attested message");
    const Bytes sig = p->sign(sk, msg);
    EXPECT_TRUE(p->verify(pk, msg, sig));
    for (size_t i = 0; i < msg.size() * 8; ++i) {
        Bytes bad = msg;
        bad[i / 8] ^= static_cast<uint8_t>(1u << (i % 8));
        EXPECT_FALSE(p->verify(pk, bad, sig)) << i;
    }
    Bytes bad_sig = sig;
    bad_sig[10] ^= 0x40;
    EXPECT_FALSE(p->verify(pk, msg, bad_sig));
    EXPECT_EQ(code_of([&] { p->verify(pk, msg, Bytes(63)); }), Errc::MalformedSignature);
}

TEST(Random, SeededIsDeterministic)
{
    crypto::SeededRandom a(5), b(5), c(6);
    Bytes x(100), y(100), z(100);
    a(x);
    b(y);
    c(z);
    EXPECT_EQ(x, y);
    EXPECT_NE(x, z);
    // Copies share the stream.
    crypto::SeededRandom d(5);
    crypto::SeededRandom e = d;
    Bytes first(10), second(10);
    d(first);
    e(second);
    EXPECT_NE(first, second);
}

TEST(Random, RecordingRemembersDraws)
{
    crypto::RecordingRandom r(crypto::SeededRandom(1));
    Bytes a(4), b(9);
    r(a);
    r(b);
    ASSERT_EQ(r.draws().size(), 2u);
    EXPECT_EQ(r.draws()[0], a);
    EXPECT_EQ(r.draws()[1], b);
}
