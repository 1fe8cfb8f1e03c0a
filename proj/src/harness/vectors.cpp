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

#include "tinysec/harness/vectors.hpp"
#include "tinysec/coap.hpp"
#include "tinysec/crypto.hpp"
#include "tinysec/error.hpp"
#include "tinysec/oscore.hpp"
#include "tinysec/vault.hpp"

#include <filesystem>
#include <fstream>
#include <map>

namespace tinysec::harness {

const std::vector<std::string> kVectorKinds = {"aes_ccm",  "hkdf_sha256",    "x25519",
                                               "ed25519", "oscore_context", "oscore_messages"};

namespace {

std::shared_ptr<const crypto::CryptoProvider> provider()
{
    static const auto p = crypto::make_default_provider(crypto::system_random());
    return p;
}

VectorRecord with(VectorRecord rec, std::initializer_list<std::pair<const char*, Bytes>> outputs)
{
    for (const auto& [k, v] : outputs) rec.set(k, v);
    return rec;
}

Bytes opt_field(const VectorRecord& r, std::string_view name)
{
    const Bytes* v = r.find(name);
    return v ? *v : Bytes{};
}

struct Side {
    std::shared_ptr<vault::KeyVault> vault;
    oscore::SecurityContext ctx;
};

Side oscore_side(const VectorRecord& r, ByteView sender, ByteView recipient)
{
    Side s{std::make_shared<vault::KeyVault>(provider()), {}};
    const vault::ContextId id = s.vault->provision(
        vault::ContextKind::OscoreContext, {{oscore::kMasterSecretKey, vault::KeyKind::MasterSecret, r.at("master_secret")}});
    oscore::InitParams p;
    p.master_secret = {id, oscore::kMasterSecretKey};
    p.master_salt = opt_field(r, "master_salt");
    p.id_context = opt_field(r, "id_context");
    p.sender_id.assign(sender.begin(), sender.end());
    p.recipient_id.assign(recipient.begin(), recipient.end());
    s.ctx = oscore::oscore_init(*s.vault, p);
    return s;
}

VectorRecord oscore_context(const VectorRecord& in)
{
    const auto& c = *provider();
    const Bytes prk = c.hkdf_extract(opt_field(in, "master_salt"), in.at("master_secret"));
    const Bytes idc = opt_field(in, "id_context");
    const auto alg = crypto::AeadAlg::AesCcm_16_64_128;
    const auto key = [&](const Bytes& id) {
        return c.hkdf_expand(prk, oscore::derivation_info(id, idc, alg, "Key", crypto::kAeadKeyLen), crypto::kAeadKeyLen);
    };
    const Bytes sender_key = key(in.at("sender_id"));
    const Bytes recipient_key = key(in.at("recipient_id"));

    // The vault never returns the keys, so check what it holds by using it.
    Side s = oscore_side(in, in.at("sender_id"), in.at("recipient_id"));
    const Bytes nonce(crypto::kAeadNonceLen, 0);
    const Bytes probe = s.vault->tee_aead(s.ctx.sender.sender_key, vault::Direction::Seal, nonce, {}, {});
    if (probe != c.aead_seal(sender_key, nonce, {}, {})) throw std::runtime_error("vault sender key differs");
    const Bytes sealed = c.aead_seal(recipient_key, nonce, {}, {});
    s.vault->tee_aead(s.ctx.recipient.recipient_key, vault::Direction::Open, nonce, {}, sealed);

    return with(in, {{"sender_key", sender_key}, {"recipient_key", recipient_key}, {"common_iv", s.ctx.common.common_iv}});
}

VectorRecord oscore_messages(const VectorRecord& in)
{
    Side client = oscore_side(in, in.at("client_id"), in.at("server_id"));
    Side server = oscore_side(in, in.at("server_id"), in.at("client_id"));
    client.ctx.sender.sequence_number = oscore::decode_partial_iv(in.at("sequence"));

    const Bytes preq = oscore::coap2oscore(*client.vault, client.ctx, oscore::Role::Client, in.at("request"));
    const auto req = oscore::oscore2coap(*server.vault, server.ctx, oscore::Role::Server, preq);
    if (req.coap != in.at("request")) throw std::runtime_error("server did not recover the request");
    const Bytes presp = oscore::coap2oscore(*server.vault, server.ctx, oscore::Role::Server, in.at("response"));
    const auto resp = oscore::oscore2coap(*client.vault, client.ctx, oscore::Role::Client, presp);
    if (resp.coap != in.at("response")) throw std::runtime_error("client did not recover the response");
    return with(in, {{"protected_request", preq}, {"protected_response", presp}});
}

// Which fields are inputs for each kind; everything else is an output.
const std::map<std::string, std::vector<std::string>>& input_fields()
{
    static const std::map<std::string, std::vector<std::string>> m = {
        {"aes_ccm", {"key", "nonce", "aad", "plaintext"}},
        {"hkdf_sha256", {"ikm", "salt", "info", "okm_length"}},
        {"x25519", {"scalar", "u"}},
        {"ed25519", {"secret", "message"}},
        {"oscore_context", {"master_secret", "master_salt", "sender_id", "recipient_id", "id_context"}},
        {"oscore_messages",
         {"master_secret", "master_salt", "client_id", "server_id", "id_context", "sequence", "request", "response"}},
    };
    return m;
}

VectorRecord inputs_only(const std::string& kind, const VectorRecord& full)
{
    VectorRecord in;
    const auto& names = input_fields().at(kind);
    for (const auto& [k, v] : full.fields) {
        if (std::find(names.begin(), names.end(), k) != names.end()) in.set(k, v);
    }
    if (kind == "hkdf_sha256" && full.find("okm")) {
        const size_t n = full.at("okm").size();
        in.set("okm_length", Bytes{static_cast<uint8_t>(n >> 8), static_cast<uint8_t>(n)});
    }
    return in;
}

std::string stem(const std::string& path)
{
    return std::filesystem::path(path).stem().string();
}

// Published inputs for `dump_vectors`, one record per line of hex fields.
struct BuiltinRecord {
    std::vector<std::pair<const char*, const char*>> fields;
};

const std::map<std::string, std::vector<BuiltinRecord>>& builtin_inputs()
{
    static const std::map<std::string, std::vector<BuiltinRecord>> m = {
        {"aes_ccm",
         {
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000003020100a0a1a2a3a4a5"},
               {"aad", "0001020304050607"},
               {"plaintext", "08090a0b0c0d0e0f101112131415161718191a1b1c1d1e"}}},
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000004030201a0a1a2a3a4a5"},
               {"aad", "0001020304050607"},
               {"plaintext", "08090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"}}},
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000005040302a0a1a2a3a4a5"},
               {"aad", "0001020304050607"},
               {"plaintext", "08090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f20"}}},
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000006050403a0a1a2a3a4a5"},
               {"aad", "000102030405060708090a0b"},
               {"plaintext", "0c0d0e0f101112131415161718191a1b1c1d1e"}}},
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000007060504a0a1a2a3a4a5"},
               {"aad", "000102030405060708090a0b"},
               {"plaintext", "0c0d0e0f101112131415161718191a1b1c1d1e1f"}}},
             {{{"key", "c0c1c2c3c4c5c6c7c8c9cacbcccdcecf"},
               {"nonce", "00000008070605a0a1a2a3a4a5"},
               {"aad", "000102030405060708090a0b"},
               {"plaintext", "0c0d0e0f101112131415161718191a1b1c1d1e1f20"}}},
         }},
        {"hkdf_sha256",
         {
             {{{"ikm", "0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b"},
               {"salt", "000102030405060708090a0b0c"},
               {"info", "f0f1f2f3f4f5f6f7f8f9"},
               {"okm_length", "002a"}}},
             {{{"ikm",
                "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f202122232425262728292a2b2c2d2e2f"
                "303132333435363738393a3b3c3d3e3f404142434445464748494a4b4c4d4e4f"},
               {"salt",
                "606162636465666768696a6b6c6d6e6f707172737475767778797a7b7c7d7e7f808182838485868788898a8b8c8d8e8f"
                "909192939495969798999a9b9c9d9e9fa0a1a2a3a4a5a6a7a8a9aaabacadaeaf"},
               {"info",
                "b0b1b2b3b4b5b6b7b8b9babbbcbdbebfc0c1c2c3c4c5c6c7c8c9cacbcccdcecfd0d1d2d3d4d5d6d7d8d9dadbdcdddedf"
                "e0e1e2e3e4e5e6e7e8e9eaebecedeeeff0f1f2f3f4f5f6f7f8f9fafbfcfdfeff"},
               {"okm_length", "0052"}}},
             {{{"ikm", "0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b"},
               {"salt", ""},
               {"info", ""},
               {"okm_length", "002a"}}},
         }},
        {"x25519",
         {
             {{{"scalar", "a546e36bf0527c9d3b16154b82465edd62144c0ac1fc5a18506a2244ba449ac4"},
               {"u", "e6db6867583030db3594c1a424b15f7c726624ec26b3353b10a903a6d0ab1c4c"}}},
             {{{"scalar", "4b66e9d4d1b4673c5ad22691957d6af5c11b6421e0ea01d42ca4169e7918ba0d"},
               {"u", "e5210f12786811d3f4b7959d0538ae2c31dbe7106fc03c3efc4cd549c715a493"}}},
             {{{"scalar", "77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a"},
               {"u", "0900000000000000000000000000000000000000000000000000000000000000"}}},
             {{{"scalar", "5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb"},
               {"u", "0900000000000000000000000000000000000000000000000000000000000000"}}},
             {{{"scalar", "77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a"},
               {"u", "de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f"}}},
             {{{"scalar", "5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb"},
               {"u", "8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a"}}},
         }},
        {"ed25519",
         {
             {{{"secret", "9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"}, {"message", ""}}},
             {{{"secret", "4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb"}, {"message", "72"}}},
             {{{"secret", "c5aa8df43f9f837bedb7442f31dcb7b166d38535076f094b85ce3a2e0b4458f7"}, {"message", "af82"}}},
         }},
        {"oscore_context",
         {
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"sender_id", ""},
               {"recipient_id", "01"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"sender_id", "01"},
               {"recipient_id", ""}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", ""},
               {"sender_id", "00"},
               {"recipient_id", "01"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", ""},
               {"sender_id", "01"},
               {"recipient_id", "00"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"sender_id", ""},
               {"recipient_id", "01"},
               {"id_context", "37cbf3210017a2d3"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"sender_id", "01"},
               {"recipient_id", ""},
               {"id_context", "37cbf3210017a2d3"}}},
         }},
        {"oscore_messages",
         {
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"client_id", ""},
               {"server_id", "01"},
               {"sequence", "14"},
               {"request", "44015d1f00003974396c6f63616c686f737483747631"},
               {"response", "64455d1f00003974ff48656c6c6f20576f726c6421"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", ""},
               {"client_id", "00"},
               {"server_id", "01"},
               {"sequence", "14"},
               {"request", "44015d1f00003974396c6f63616c686f737483747631"},
               {"response", "64455d1f00003974ff48656c6c6f20576f726c6421"}}},
             {{{"master_secret", "0102030405060708090a0b0c0d0e0f10"},
               {"master_salt", "9e7ca92223786340"},
               {"client_id", ""},
               {"server_id", "01"},
               {"id_context", "37cbf3210017a2d3"},
               {"sequence", "14"},
               {"request", "44015d1f00003974396c6f63616c686f737483747631"},
               {"response", "64455d1f00003974ff48656c6c6f20576f726c6421"}}},
         }},
    };
    return m;
}

}  // namespace

VectorRecord compute_vector(const std::string& kind, const VectorRecord& in)
{
    const auto& c = *provider();
    if (kind == "aes_ccm") {
        return with(in, {{"ciphertext", c.aead_seal(in.at("key"), in.at("nonce"), in.at("aad"), in.at("plaintext"))}});
    }
    if (kind == "hkdf_sha256") {
        const Bytes& len = in.at("okm_length");
        const size_t n = len.size() == 2 ? (size_t{len[0]} << 8 | len[1]) : 0;
        const Bytes prk = c.hkdf_extract(in.at("salt"), in.at("ikm"));
        return with(in, {{"prk", prk}, {"okm", c.hkdf_expand(prk, in.at("info"), n)}});
    }
    if (kind == "x25519") return with(in, {{"output", c.dh_derive(in.at("scalar"), in.at("u"))}});
    if (kind == "ed25519") {
        return with(in, {{"public", c.sign_public(in.at("secret"))},
                         {"signature", c.sign(in.at("secret"), in.at("message"))}});
    }
    if (kind == "oscore_context") return oscore_context(in);
    if (kind == "oscore_messages") return oscore_messages(in);
    throw std::invalid_argument("unknown vector kind '" + kind + "'");
}

std::vector<VectorCheck> verify_vector_file(const std::string& path)
{
    const std::string kind = stem(path);
    std::vector<VectorCheck> out;
    std::vector<VectorRecord> records;
    try {
        records = load_vector_file(path);
    } catch (const std::exception& e) {
        out.push_back({path, 0, false, e.what()});
        return out;
    }
    for (size_t i = 0; i < records.size(); ++i) {
        VectorCheck check{path, i + 1, true, {}};
        try {
            const VectorRecord got = compute_vector(kind, inputs_only(kind, records[i]));
            for (const auto& [name, want] : records[i].fields) {
                const Bytes* have = got.find(name);
                if (!have) {
                    check.ok = false;
                    check.detail = "no output for field " + name;
                    break;
                }
                if (*have != want) {
                    check.ok = false;
                    check.detail = name + " mismatch: got " + to_hex(*have);
                    break;
                }
            }
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = e.what();
        }
        out.push_back(std::move(check));
    }
    if (records.empty()) out.push_back({path, 0, false, "no records"});
    return out;
}

std::vector<VectorCheck> verify_vector_dir(const std::string& dir)
{
    std::vector<VectorCheck> out;
    for (const auto& kind : kVectorKinds) {
        const std::string path = (std::filesystem::path(dir) / (kind + ".vec")).string();
        if (!std::filesystem::exists(path)) {
            out.push_back({path, 0, false, "missing"});
            continue;
        }
        auto checks = verify_vector_file(path);
        out.insert(out.end(), checks.begin(), checks.end());
    }
    return out;
}

std::vector<std::string> dump_vectors(const std::string& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& kind : kVectorKinds) {
        std::vector<VectorRecord> records;
        for (const auto& b : builtin_inputs().at(kind)) {
            VectorRecord in;
            for (const auto& [k, v] : b.fields) in.set(k, from_hex(v));
            VectorRecord rec = compute_vector(kind, in);
            std::erase_if(rec.fields, [](const auto& f) { return f.first == "okm_length"; });
            records.push_back(std::move(rec));
        }
        const std::string path = (std::filesystem::path(dir) / (kind + ".vec")).string();
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        write_vector_file(f, records);
        written.push_back(path);
    }
    return written;
}

}  // namespace tinysec::harness
