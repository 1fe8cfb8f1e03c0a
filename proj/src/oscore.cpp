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

#include "tinysec/oscore.hpp"
#include "tinysec/cbor.hpp"
#include "tinysec/error.hpp"

#include <algorithm>

namespace tinysec::oscore {

namespace {

constexpr uint8_t kFlagKid = 0x08;
constexpr uint8_t kFlagKidContext = 0x10;
constexpr uint8_t kFlagPivMask = 0x07;
constexpr uint8_t kFlagReserved = 0xe0;
constexpr uint8_t kOscoreVersion = 1;

size_t max_id_len(crypto::AeadAlg alg)
{
    return crypto::aead_info(alg).nonce_len - 6;
}

void check_id(ByteView id, crypto::AeadAlg alg)
{
    if (id.size() > max_id_len(alg)) throw Error(Errc::IdTooLong);
}

}  // namespace

Bytes derivation_info(ByteView id, ByteView id_context, crypto::AeadAlg alg, std::string_view type, size_t len)
{
    Bytes out;
    cbor::Encoder enc(out);
    enc.array(5).bstr(id);
    if (id_context.empty()) {
        enc.null();
    } else {
        enc.bstr(id_context);
    }
    enc.integer(crypto::aead_info(alg).cose_id).tstr(type).uint(len);
    return out;
}

SecurityContext oscore_init(vault::KeyVault& vault, const InitParams& p)
{
    check_id(p.sender_id, p.aead_alg);
    check_id(p.recipient_id, p.aead_alg);
    if (p.sender_id == p.recipient_id) throw Error(Errc::BadLength, "sender and recipient id must differ");
    if (p.master_secret.key == kSenderKey || p.master_secret.key == kRecipientKey) {
        throw Error(Errc::WrongKeyKind, "master secret occupies a derived-key slot");
    }

    const auto info = crypto::aead_info(p.aead_alg);
    const vault::ContextId cid = p.master_secret.context;

    SecurityContext ctx;
    ctx.common = {p.aead_alg, p.hkdf_alg, p.master_secret, p.master_salt, p.id_context, {}};
    ctx.sender = {p.sender_id, {cid, kSenderKey}, 0};
    ctx.recipient = {p.recipient_id, {cid, kRecipientKey}, {}};

    vault.tee_hkdf(p.master_secret, p.master_salt,
                   derivation_info(p.sender_id, p.id_context, p.aead_alg, "Key", info.key_len), kSenderKey,
                   info.key_len, vault::DerivedKind::SenderKey);
    vault.tee_hkdf(p.master_secret, p.master_salt,
                   derivation_info(p.recipient_id, p.id_context, p.aead_alg, "Key", info.key_len),
                   kRecipientKey, info.key_len, vault::DerivedKind::RecipientKey);
    ctx.common.common_iv = vault.tee_hkdf(p.master_secret, p.master_salt,
                                          derivation_info({}, p.id_context, p.aead_alg, "IV", info.nonce_len),
                                          vault::KeyId{}, info.nonce_len, vault::DerivedKind::CommonIv);
    return ctx;
}

Bytes compute_nonce(ByteView id, ByteView piv, ByteView common_iv)
{
    if (common_iv.size() != crypto::kAeadNonceLen) throw Error(Errc::BadLength, "common iv");
    const size_t id_field = common_iv.size() - 6;
    if (id.size() > id_field) throw Error(Errc::BadLength, "id");
    if (piv.size() > kMaxPartialIvLen) throw Error(Errc::BadLength, "partial iv");

    // size(ID) || left-padded ID || left-padded PIV, XORed with the Common IV.
    Bytes nonce(common_iv.size(), 0);
    nonce[0] = static_cast<uint8_t>(id.size());
    std::copy(id.begin(), id.end(), nonce.begin() + 1 + static_cast<std::ptrdiff_t>(id_field - id.size()));
    std::copy(piv.begin(), piv.end(), nonce.end() - static_cast<std::ptrdiff_t>(piv.size()));
    for (size_t i = 0; i < nonce.size(); ++i) nonce[i] ^= common_iv[i];
    return nonce;
}

Bytes encode_partial_iv(uint64_t seq)
{
    if (seq > kMaxSequenceNumber) throw Error(Errc::SeqNumExhausted);
    Bytes out;
    for (int shift = 32; shift >= 0; shift -= 8) {
        const auto b = static_cast<uint8_t>(seq >> shift);
        if (!out.empty() || b != 0) out.push_back(b);
    }
    if (out.empty()) out.push_back(0);
    return out;
}

uint64_t decode_partial_iv(ByteView piv)
{
    if (piv.size() > kMaxPartialIvLen) throw Error(Errc::MalformedOscoreOption, "partial iv too long");
    uint64_t v = 0;
    for (uint8_t b : piv) v = (v << 8) | b;
    return v;
}

Bytes encode_oscore_option(const OscoreOptionValue& v)
{
    if (v.partial_iv.size() > kMaxPartialIvLen) throw Error(Errc::MalformedOscoreOption, "partial iv too long");
    if (v.kid_context && v.kid_context->size() > 255) throw Error(Errc::MalformedOscoreOption, "kid context");
    uint8_t flags = static_cast<uint8_t>(v.partial_iv.size());
    if (v.kid) flags |= kFlagKid;
    if (v.kid_context) flags |= kFlagKidContext;
    Bytes out;
    if (flags == 0) return out;
    out.push_back(flags);
    append(out, v.partial_iv);
    if (v.kid_context) {
        out.push_back(static_cast<uint8_t>(v.kid_context->size()));
        append(out, *v.kid_context);
    }
    if (v.kid) append(out, *v.kid);
    return out;
}

OscoreOptionValue decode_oscore_option(ByteView in)
{
    OscoreOptionValue v;
    if (in.empty()) return v;
    const uint8_t flags = in[0];
    const size_t n = flags & kFlagPivMask;
    if ((flags & kFlagReserved) != 0 || n > kMaxPartialIvLen) throw Error(Errc::MalformedOscoreOption, "flags");
    if (flags == 0) throw Error(Errc::MalformedOscoreOption, "zero flags must be encoded as empty");
    size_t pos = 1;
    if (in.size() - pos < n) throw Error(Errc::MalformedOscoreOption, "truncated partial iv");
    v.partial_iv.assign(in.begin() + 1, in.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    pos += n;
    if (flags & kFlagKidContext) {
        if (pos >= in.size()) throw Error(Errc::MalformedOscoreOption, "truncated kid context");
        const size_t s = in[pos++];
        if (in.size() - pos < s) throw Error(Errc::MalformedOscoreOption, "truncated kid context");
        auto begin = in.begin() + static_cast<std::ptrdiff_t>(pos);
        v.kid_context = Bytes(begin, begin + static_cast<std::ptrdiff_t>(s));
        pos += s;
    }
    if (flags & kFlagKid) {
        v.kid = Bytes(in.begin() + static_cast<std::ptrdiff_t>(pos), in.end());
    } else if (pos != in.size()) {
        throw Error(Errc::MalformedOscoreOption, "trailing bytes without kid flag");
    }
    return v;
}

bool is_class_u(uint32_t number)
{
    switch (number) {
    case coap::option::kUriHost:
    case coap::option::kUriPort:
    case coap::option::kOscore:
    case coap::option::kHopLimit:
    case coap::option::kProxyUri:
    case coap::option::kProxyScheme: return true;
    default: return false;
    }
}

Bytes external_aad(crypto::AeadAlg alg, ByteView request_kid, ByteView request_piv)
{
    Bytes out;
    cbor::Encoder(out)
        .array(5)
        .uint(kOscoreVersion)
        .array(1)
        .integer(crypto::aead_info(alg).cose_id)
        .bstr(request_kid)
        .bstr(request_piv)
        .bstr({});
    return out;
}

Bytes aead_aad(crypto::AeadAlg alg, ByteView request_kid, ByteView request_piv)
{
    Bytes out;
    cbor::Encoder(out).array(3).tstr("Encrypt0").bstr({}).bstr(external_aad(alg, request_kid, request_piv));
    return out;
}

Bytes coap2oscore(vault::KeyVault& vault, SecurityContext& ctx, Role role, ByteView coap_bytes)
{
    const coap::Message in = coap::parse(coap_bytes);
    if (in.find(coap::option::kOscore)) throw Error(Errc::MalformedOscoreOption, "already protected");

    coap::Message outer;
    outer.type = in.type;
    outer.message_id = in.message_id;
    outer.token = in.token;

    std::vector<coap::Option> inner_opts;
    for (const auto& opt : in.options) {
        (is_class_u(opt.number) ? outer.options : inner_opts).push_back(opt);
    }
    Bytes plaintext{in.code};
    coap::encode_options_and_payload(plaintext, inner_opts, in.payload);

    OscoreOptionValue option;
    Bytes nonce;
    Bytes aad;
    if (role == Role::Client) {
        if (ctx.sender.sequence_number > kMaxSequenceNumber) throw Error(Errc::SeqNumExhausted);
        Bytes piv = encode_partial_iv(ctx.sender.sequence_number);
        option.partial_iv = piv;
        option.kid = ctx.sender.sender_id;
        if (!ctx.common.id_context.empty()) option.kid_context = ctx.common.id_context;
        nonce = compute_nonce(ctx.sender.sender_id, piv, ctx.common.common_iv);
        aad = aead_aad(ctx.common.aead_alg, ctx.sender.sender_id, piv);
        outer.code = coap::code::kPost;
        ++ctx.sender.sequence_number;
        ctx.binding = RequestBinding{ctx.sender.sender_id, std::move(piv)};
    } else {
        if (!ctx.binding) throw Error(Errc::MissingBinding);
        nonce = compute_nonce(ctx.binding->request_kid, ctx.binding->request_piv, ctx.common.common_iv);
        aad = aead_aad(ctx.common.aead_alg, ctx.binding->request_kid, ctx.binding->request_piv);
        outer.code = coap::code::kChanged;
    }

    outer.payload = vault.tee_aead(ctx.sender.sender_key, vault::Direction::Seal, nonce, aad, plaintext);
    secure_zero(plaintext);
    if (role == Role::Server) ctx.binding.reset();

    outer.options.push_back({coap::option::kOscore, encode_oscore_option(option)});
    std::stable_sort(outer.options.begin(), outer.options.end(),
                     [](const coap::Option& a, const coap::Option& b) { return a.number < b.number; });
    return coap::serialize(outer);
}

UnprotectResult oscore2coap(vault::KeyVault& vault, SecurityContext& ctx, Role role, ByteView bytes)
{
    const coap::Message outer = coap::parse(bytes);
    const coap::Option* osc = outer.find(coap::option::kOscore);
    if (!osc) return {UnprotectStatus::CoapPassThrough, Bytes(bytes.begin(), bytes.end())};

    const OscoreOptionValue option = decode_oscore_option(osc->value);
    Bytes nonce;
    Bytes aad;
    std::optional<uint64_t> seq;
    RequestBinding request;

    if (role == Role::Server) {
        if (!option.kid || option.partial_iv.empty()) {
            throw Error(Errc::MalformedOscoreOption, "request lacks kid or partial iv");
        }
        if (*option.kid != ctx.recipient.recipient_id) throw Error(Errc::UnknownKid);
        if (option.kid_context && *option.kid_context != ctx.common.id_context) throw Error(Errc::UnknownKid);
        seq = decode_partial_iv(option.partial_iv);
        if (!ctx.recipient.replay_window.check(*seq)) throw Error(Errc::ReplayDetected);
        request = {*option.kid, option.partial_iv};
        nonce = compute_nonce(request.request_kid, request.request_piv, ctx.common.common_iv);
    } else {
        if (!ctx.binding) throw Error(Errc::MissingBinding);
        request = *ctx.binding;
        if (!option.partial_iv.empty()) {
            nonce = compute_nonce(ctx.recipient.recipient_id, option.partial_iv, ctx.common.common_iv);
        } else {
            nonce = compute_nonce(request.request_kid, request.request_piv, ctx.common.common_iv);
        }
    }
    aad = aead_aad(ctx.common.aead_alg, request.request_kid, request.request_piv);

    Bytes plaintext =
        vault.tee_aead(ctx.recipient.recipient_key, vault::Direction::Open, nonce, aad, outer.payload);
    if (plaintext.empty()) throw Error(Errc::BadLength, "empty plaintext");

    coap::Message inner;
    inner.type = outer.type;
    inner.message_id = outer.message_id;
    inner.token = outer.token;
    inner.code = plaintext[0];
    std::vector<coap::Option> inner_opts;
    coap::decode_options_and_payload(ByteView(plaintext).subspan(1), inner_opts, inner.payload);
    secure_zero(plaintext);

    for (const auto& opt : outer.options) {
        if (opt.number != coap::option::kOscore) inner.options.push_back(opt);
    }
    for (auto& opt : inner_opts) inner.options.push_back(std::move(opt));
    std::stable_sort(inner.options.begin(), inner.options.end(),
                     [](const coap::Option& a, const coap::Option& b) { return a.number < b.number; });

    if (role == Role::Server) {
        ctx.recipient.replay_window.update(*seq);
        ctx.binding = std::move(request);
    } else {
        ctx.binding.reset();
    }
    return {UnprotectStatus::Unprotected, coap::serialize(inner)};
}

}  // namespace tinysec::oscore
