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

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>

namespace tinysec::crypto {

namespace {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct PkeyCtxDeleter {
    void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

[[noreturn]] void fail(const char* what)
{
    throw std::runtime_error(std::string("openssl: ") + what);
}

void check(int rc, const char* what)
{
    if (rc != 1) fail(what);
}

// OpenSSL treats a null data pointer in CCM updates as "no data"; always
// hand it a real address.
const uint8_t* nonnull(ByteView v)
{
    static const uint8_t dummy = 0;
    return v.empty() ? &dummy : v.data();
}

void check_ccm_params(ByteView key, ByteView nonce)
{
    if (key.size() != kAeadKeyLen) throw Error(Errc::BadLength, "aead key");
    if (nonce.size() != kAeadNonceLen) throw Error(Errc::BadLength, "aead nonce");
}

Pkey raw_private(int type, ByteView secret)
{
    Pkey k(EVP_PKEY_new_raw_private_key(type, nullptr, secret.data(), secret.size()));
    if (!k) throw Error(Errc::BadLength, "private key");
    return k;
}

Pkey raw_public(int type, ByteView pub)
{
    Pkey k(EVP_PKEY_new_raw_public_key(type, nullptr, pub.data(), pub.size()));
    if (!k) throw Error(Errc::BadLength, "public key");
    return k;
}

Bytes public_of(EVP_PKEY* k)
{
    Bytes out(32);
    size_t len = out.size();
    check(EVP_PKEY_get_raw_public_key(k, out.data(), &len), "get public");
    out.resize(len);
    return out;
}

Bytes hmac_sha256(ByteView key, ByteView data)
{
    Bytes out(kHashLen);
    unsigned int len = 0;
    static const uint8_t empty_key = 0;
    if (HMAC(EVP_sha256(), key.empty() ? &empty_key : key.data(), static_cast<int>(key.size()),
             data.data(), data.size(), out.data(), &len) == nullptr) {
        fail("hmac");
    }
    return out;
}

class OpenSslProvider final : public CryptoProvider {
public:
    explicit OpenSslProvider(RandomFn rng) : rng_(std::move(rng)) {}

    Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView pt) const override
    {
        check_ccm_params(key, nonce);
        CipherCtx ctx(EVP_CIPHER_CTX_new());
        int len = 0;
        check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ccm(), nullptr, nullptr, nullptr), "ccm init");
        check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_CCM_SET_IVLEN, kAeadNonceLen, nullptr), "ivlen");
        check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_CCM_SET_TAG, kAeadTagLen, nullptr), "taglen");
        check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "ccm key");
        check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, nullptr, static_cast<int>(pt.size())), "ccm len");
        if (!aad.empty()) {
            check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "ccm aad");
        }
        Bytes out(pt.size() + kAeadTagLen);
        uint8_t scratch = 0;
        uint8_t* dst = pt.empty() ? &scratch : out.data();
        check(EVP_EncryptUpdate(ctx.get(), dst, &len, nonnull(pt), static_cast<int>(pt.size())), "ccm data");
        check(EVP_EncryptFinal_ex(ctx.get(), dst, &len), "ccm final");
        check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_CCM_GET_TAG, kAeadTagLen, out.data() + pt.size()), "ccm tag");
        return out;
    }

    Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView ct) const override
    {
        check_ccm_params(key, nonce);
        if (ct.size() < kAeadTagLen) throw Error(Errc::BadLength, "ciphertext shorter than tag");
        const size_t body = ct.size() - kAeadTagLen;
        Bytes tag(ct.begin() + static_cast<std::ptrdiff_t>(body), ct.end());

        CipherCtx ctx(EVP_CIPHER_CTX_new());
        int len = 0;
        check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_ccm(), nullptr, nullptr, nullptr), "ccm init");
        check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_CCM_SET_IVLEN, kAeadNonceLen, nullptr), "ivlen");
        check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_CCM_SET_TAG, kAeadTagLen, tag.data()), "tag");
        check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "ccm key");
        check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, nullptr, static_cast<int>(body)), "ccm len");
        if (!aad.empty()) {
            check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "ccm aad");
        }
        Bytes out(body);
        uint8_t scratch = 0;
        uint8_t* dst = body == 0 ? &scratch : out.data();
        if (EVP_DecryptUpdate(ctx.get(), dst, &len, nonnull(ct), static_cast<int>(body)) != 1) {
            secure_zero(out);
            throw Error(Errc::AuthFailed);
        }
        return out;
    }

    Bytes hkdf_extract(ByteView salt, ByteView ikm) const override
    {
        if (salt.empty()) {
            const Bytes zeros(kHashLen, 0);
            return hmac_sha256(zeros, ikm);
        }
        return hmac_sha256(salt, ikm);
    }

    Bytes hkdf_expand(ByteView prk, ByteView info, size_t out_len) const override
    {
        if (out_len == 0) throw Error(Errc::BadLength, "hkdf output length 0");
        if (out_len > kMaxExpandLen) throw Error(Errc::OutLenTooLarge);
        Bytes okm;
        okm.reserve(out_len + kHashLen);
        Bytes t;
        for (uint8_t counter = 1; okm.size() < out_len; ++counter) {
            Bytes block = t;
            append(block, info);
            block.push_back(counter);
            t = hmac_sha256(prk, block);
            append(okm, t);
        }
        okm.resize(out_len);
        return okm;
    }

    Bytes hash(ByteView data) const override
    {
        Bytes out(kHashLen);
        unsigned int len = 0;
        check(EVP_Digest(nonnull(data), data.size(), out.data(), &len, EVP_sha256(), nullptr), "sha256");
        return out;
    }

    Bytes dh_public(ByteView secret) const override
    {
        if (secret.size() != kDhKeyLen) throw Error(Errc::BadLength, "x25519 secret");
        return public_of(raw_private(EVP_PKEY_X25519, secret).get());
    }

    Bytes dh_derive(ByteView secret, ByteView peer) const override
    {
        if (secret.size() != kDhKeyLen || peer.size() != kDhKeyLen) throw Error(Errc::BadLength, "x25519");
        Pkey own = raw_private(EVP_PKEY_X25519, secret);
        Pkey other = raw_public(EVP_PKEY_X25519, peer);
        PkeyCtx ctx(EVP_PKEY_CTX_new(own.get(), nullptr));
        check(EVP_PKEY_derive_init(ctx.get()), "derive init");
        check(EVP_PKEY_derive_set_peer(ctx.get(), other.get()), "derive peer");
        Bytes out(kDhKeyLen);
        size_t len = out.size();
        // OpenSSL refuses an all-zero shared secret.
        if (EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1) throw Error(Errc::LowOrderPoint);
        if (std::all_of(out.begin(), out.end(), [](uint8_t b) { return b == 0; })) {
            throw Error(Errc::LowOrderPoint);
        }
        return out;
    }

    Bytes sign_public(ByteView secret) const override
    {
        if (secret.size() != kSignKeyLen) throw Error(Errc::BadLength, "ed25519 secret");
        return public_of(raw_private(EVP_PKEY_ED25519, secret).get());
    }

    Bytes sign(ByteView secret, ByteView message) const override
    {
        if (secret.size() != kSignKeyLen) throw Error(Errc::BadLength, "ed25519 secret");
        Pkey key = raw_private(EVP_PKEY_ED25519, secret);
        MdCtx ctx(EVP_MD_CTX_new());
        check(EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()), "sign init");
        Bytes sig(kSignatureLen);
        size_t len = sig.size();
        check(EVP_DigestSign(ctx.get(), sig.data(), &len, nonnull(message), message.size()), "sign");
        return sig;
    }

    bool verify(ByteView pub, ByteView message, ByteView signature) const override
    {
        if (signature.size() != kSignatureLen) throw Error(Errc::MalformedSignature);
        if (pub.size() != kSignKeyLen) throw Error(Errc::BadLength, "ed25519 public");
        Pkey key = raw_public(EVP_PKEY_ED25519, pub);
        MdCtx ctx(EVP_MD_CTX_new());
        check(EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()), "verify init");
        return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), nonnull(message),
                                message.size()) == 1;
    }

    void random_bytes(std::span<uint8_t> out) const override { rng_(out); }

private:
    RandomFn rng_;
};

}  // namespace

RandomFn system_random()
{
    return [](std::span<uint8_t> out) {
        if (!out.empty() && RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) fail("RAND_bytes");
    };
}

SeededRandom::SeededRandom(uint64_t seed) : state_(std::make_shared<State>())
{
    state_->seed = seed;
}

void SeededRandom::operator()(std::span<uint8_t> out)
{
    std::lock_guard lock(state_->mu);
    size_t filled = 0;
    while (filled < out.size()) {
        if (state_->pool.empty()) {
            uint8_t block[16];
            for (int i = 0; i < 8; ++i) {
                block[i] = static_cast<uint8_t>(state_->seed >> (56 - 8 * i));
                block[8 + i] = static_cast<uint8_t>(state_->counter >> (56 - 8 * i));
            }
            ++state_->counter;
            state_->pool.resize(kHashLen);
            unsigned int len = 0;
            check(EVP_Digest(block, sizeof block, state_->pool.data(), &len, EVP_sha256(), nullptr), "sha256");
        }
        const size_t n = std::min(out.size() - filled, state_->pool.size());
        std::memcpy(out.data() + filled, state_->pool.data(), n);
        state_->pool.erase(state_->pool.begin(), state_->pool.begin() + static_cast<std::ptrdiff_t>(n));
        filled += n;
    }
}

RecordingRandom::RecordingRandom(RandomFn inner)
    : inner_(std::move(inner)), state_(std::make_shared<State>())
{
}

void RecordingRandom::operator()(std::span<uint8_t> out)
{
    inner_(out);
    std::lock_guard lock(state_->mu);
    state_->draws.emplace_back(out.begin(), out.end());
}

std::vector<Bytes> RecordingRandom::draws() const
{
    std::lock_guard lock(state_->mu);
    return state_->draws;
}

std::shared_ptr<const CryptoProvider> make_default_provider(RandomFn rng)
{
    return std::make_shared<OpenSslProvider>(std::move(rng));
}

}  // namespace tinysec::crypto
