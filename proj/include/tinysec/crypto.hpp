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

#include "tinysec/bytes.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>

namespace tinysec::crypto {

// The single suite implemented: AES-CCM-16-64-128, HMAC-SHA256 HKDF,
// SHA-256, X25519, Ed25519.
inline constexpr size_t kAeadKeyLen = 16;
inline constexpr size_t kAeadNonceLen = 13;
inline constexpr size_t kAeadTagLen = 8;
inline constexpr size_t kHashLen = 32;
inline constexpr size_t kMaxExpandLen = 255 * kHashLen;
inline constexpr size_t kDhKeyLen = 32;
inline constexpr size_t kSignKeyLen = 32;
inline constexpr size_t kSignatureLen = 64;

enum class AeadAlg : uint8_t { AesCcm_16_64_128 };
enum class HkdfAlg : uint8_t { HmacSha256 };

struct AeadInfo {
    size_t key_len;
    size_t nonce_len;
    size_t tag_len;
    int cose_id;
};

constexpr AeadInfo aead_info(AeadAlg)
{
    return {kAeadKeyLen, kAeadNonceLen, kAeadTagLen, 10};
}

constexpr size_t hash_len(HkdfAlg) { return kHashLen; }

using RandomFn = std::function<void(std::span<uint8_t>)>;

// Operating-system randomness.
RandomFn system_random();

// Deterministic byte stream: SHA-256(seed || counter) blocks. Copies share
// the same stream state.
class SeededRandom {
public:
    explicit SeededRandom(uint64_t seed);
    void operator()(std::span<uint8_t> out);

private:
    struct State {
        std::mutex mu;
        uint64_t seed;
        uint64_t counter = 0;
        Bytes pool;
    };
    std::shared_ptr<State> state_;
};

// Wraps another source and remembers everything it produced.
class RecordingRandom {
public:
    explicit RecordingRandom(RandomFn inner);
    void operator()(std::span<uint8_t> out);
    std::vector<Bytes> draws() const;

private:
    struct State {
        mutable std::mutex mu;
        std::vector<Bytes> draws;
    };
    RandomFn inner_;
    std::shared_ptr<State> state_;
};

// Crypto callbacks the protocols run on. All functions except
// random_bytes are deterministic in their inputs.
class CryptoProvider {
public:
    virtual ~CryptoProvider() = default;

    // Returns ciphertext || tag.
    virtual Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) const = 0;
    // Throws Error(AuthFailed) on any tag mismatch.
    virtual Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext) const = 0;

    virtual Bytes hkdf_extract(ByteView salt, ByteView ikm) const = 0;
    virtual Bytes hkdf_expand(ByteView prk, ByteView info, size_t out_len) const = 0;
    virtual Bytes hash(ByteView data) const = 0;

    virtual Bytes dh_public(ByteView secret_key) const = 0;
    virtual Bytes dh_derive(ByteView secret_key, ByteView peer_public) const = 0;

    virtual Bytes sign_public(ByteView secret_key) const = 0;
    virtual Bytes sign(ByteView secret_key, ByteView message) const = 0;
    virtual bool verify(ByteView public_key, ByteView message, ByteView signature) const = 0;

    virtual void random_bytes(std::span<uint8_t> out) const = 0;

    Bytes random(size_t n) const
    {
        Bytes out(n);
        random_bytes(out);
        return out;
    }
};

// Default software provider backed by OpenSSL's libcrypto.
std::shared_ptr<const CryptoProvider> make_default_provider(RandomFn rng = system_random());

}  // namespace tinysec::crypto
