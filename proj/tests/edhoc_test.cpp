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
#include "tinysec/error.hpp"
#include "tinysec/harness/demo.hpp"
#include "tinysec/harness/fixtures.hpp"
#include "tinysec/harness/transport.hpp"
#include "tinysec/oscore.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <iostream>
#include <map>
#include <thread>

using namespace tinysec;
using namespace tinysec::edhoc;
using harness::Endpoint;
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

const AuthMethod kSigRpk = AuthMethod::diagonal(AuthKind::Signature, CredKind::Rpk);
const AuthMethod kSdhRpk = AuthMethod::diagonal(AuthKind::StaticDh, CredKind::Rpk);

std::vector<AuthMethod> diagonal_modes()
{
    return {kSdhRpk, kSigRpk, AuthMethod::diagonal(AuthKind::StaticDh, CredKind::CborCert),
            AuthMethod::diagonal(AuthKind::Signature, CredKind::CborCert)};
}

struct Handshake {
    Fixtures f;
    Endpoint ei, er;
    std::unique_ptr<Session> i, r;

    explicit Handshake(const AuthMethod& m, uint64_t seed = 5)
        : f(harness::make_fixtures(seed)),
          ei(harness::provision_endpoint(f, Role::Initiator, m)),
          er(harness::provision_endpoint(f, Role::Responder, m))
    {
        i = std::make_unique<Session>(*ei.vault, Role::Initiator, ei.params, ei.creds);
        r = std::make_unique<Session>(*er.vault, Role::Responder, er.params, er.creds);
    }

    // Runs to completion and returns the three messages.
    std::array<Bytes, 3> run()
    {
        Bytes m1 = i->make_message1();
        Bytes m2 = r->handle_message1(m1);
        Bytes m3 = i->handle_message2(m2);
        r->handle_message3(m3);
        return {m1, m2, m3};
    }
};

// Calls each EDHOC gateway operation once on a session and returns the codes.
std::vector<Errc> probe_gateway(vault::KeyVault& v, vault::ContextId s)
{
    using namespace vault;
    const Bytes any(32, 3);
    const KeyRef k{s, KeyId{1}};
    std::vector<std::function<void()>> ops = {
        [&] { v.aead(s, k, ByteView(any), Direction::Seal, {}, {}); },
        [&] { v.asymm_sign(s, k, any); },
        [&] { v.asymm_verify(s, k, any, Bytes(64)); },
        [&] { v.hkdf_extract(s, ByteView(any), k, KeyId{2}); },
        [&] { v.hkdf_expand(s, k, any, 16, StoreAs{KeyId{2}}); },
        [&] { v.dh_secret_derive(s, k, ByteView(any), KeyId{2}); },
        [&] { v.hash(s, any); },
        [&] { v.xor_bytes(s, ByteView(any), any); },
    };
    std::vector<Errc> codes;
    for (auto& op : ops) codes.push_back(code_of(op));
    return codes;
}

// The underlying cause carried in a rejection's text, e.g. "DecodeError".
std::string cause_of(const Error& e)
{
    std::string s = e.what();
    const std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (s.rfind(prefix, 0) == 0) s = s.substr(prefix.size());
    return s.substr(0, s.find(':'));
}

}  // namespace

TEST(Edhoc, MethodNamesAndIds)
{
    const auto all = AuthMethod::all();
    EXPECT_EQ(all.size(), 16u);
    for (const auto& m : all) EXPECT_EQ(AuthMethod::parse(m.name()), m) << m.name();
    EXPECT_EQ(kSigRpk.method_id(), 0);
    EXPECT_EQ(kSdhRpk.method_id(), 3);
    EXPECT_EQ(kSigRpk.name(), "sig-rpk");
    EXPECT_EQ(AuthMethod::parse("sdh-rpk/sig-cert")->responder.cred, CredKind::CborCert);
    EXPECT_EQ(AuthMethod::parse("bogus"), std::nullopt);
}

TEST(Edhoc, AllSixteenModesComplete)
{
    for (const auto& m : AuthMethod::all()) {
        Handshake h(m);
        const auto msgs = h.run();
        EXPECT_EQ(h.i->state(), State::Complete) << m.name();
        EXPECT_EQ(h.r->state(), State::Complete) << m.name();
        EXPECT_EQ(msgs[0].size(), 37u) << m.name();
        EXPECT_EQ(h.i->result().th, h.r->result().th) << m.name();
        EXPECT_EQ(exporter(*h.ei.vault, h.i->result(), "x", {}, 16),
                  exporter(*h.er.vault, h.r->result(), "x", {}, 16))
            << m.name();
    }
}

TEST(Edhoc, DiagonalSizes)
{
    std::map<std::string, std::array<size_t, 3>> expected = {
        {"static-dh-rpk", {37, 46, 20}},
        {"sig-rpk", {37, 104, 78}},
        {"static-dh-cert", {37, 186, 160}},
        {"sig-cert", {37, 243, 217}},
    };
    for (const auto& m : diagonal_modes()) {
        Handshake h(m);
        const auto msgs = h.run();
        const auto& e = expected.at(m.name());
        EXPECT_EQ(msgs[0].size(), e[0]) << m.name();
        EXPECT_EQ(msgs[1].size(), e[1]) << m.name();
        EXPECT_EQ(msgs[2].size(), e[2]) << m.name();
    }
}

TEST(Edhoc, DhCallCounts)
{
    for (const auto& m : AuthMethod::all()) {
        Handshake h(m);
        h.run();
        const size_t sdh = (m.initiator.auth == AuthKind::StaticDh) + (m.responder.auth == AuthKind::StaticDh);
        EXPECT_EQ(h.ei.vault->call_count(h.i->vault_session(), vault::GatewayOp::DhSecretDerive), 1 + sdh) << m.name();
        EXPECT_EQ(h.er.vault->call_count(h.r->vault_session(), vault::GatewayOp::DhSecretDerive), 1 + sdh) << m.name();
        const size_t sig_i = m.initiator.auth == AuthKind::Signature;
        const size_t sig_r = m.responder.auth == AuthKind::Signature;
        EXPECT_EQ(h.ei.vault->call_count(h.i->vault_session(), vault::GatewayOp::AsymmSign), sig_i) << m.name();
        EXPECT_EQ(h.er.vault->call_count(h.r->vault_session(), vault::GatewayOp::AsymmSign), sig_r) << m.name();
    }
}

TEST(Edhoc, StateMachine)
{
    Handshake h(kSigRpk);
    EXPECT_EQ(code_of([&] { h.i->key_schedule_step(Step::Prk4x3m); }), Errc::WrongState);
    EXPECT_EQ(code_of([&] { h.r->make_message1(); }), Errc::WrongState);
    EXPECT_EQ(code_of([&] { h.i->handle_message3({}); }), Errc::WrongState);
    EXPECT_EQ(code_of([&] { h.i->result(); }), Errc::WrongState);
    const Bytes m1 = h.i->make_message1();
    EXPECT_EQ(h.i->state(), State::WaitMsg2);
    EXPECT_EQ(code_of([&] { h.i->make_message1(); }), Errc::WrongState);
    EXPECT_EQ(code_of([&] { h.i->handle_message1(m1); }), Errc::WrongState);
    EXPECT_EQ(code_of([&] { h.r->handle_message3({}); }), Errc::WrongState);
    const Bytes m2 = h.r->handle_message1(m1);
    EXPECT_EQ(h.r->state(), State::WaitMsg3);
    EXPECT_EQ(code_of([&] { h.r->handle_message1(m1); }), Errc::WrongState);
    h.r->handle_message3(h.i->handle_message2(m2));
    EXPECT_EQ(h.i->state(), State::Complete);
    EXPECT_EQ(code_of([&] { h.i->handle_message2(m2); }), Errc::WrongState);
}

TEST(Edhoc, SessionSetupChecks)
{
    const Fixtures f = harness::make_fixtures(5);
    Endpoint ep = harness::provision_endpoint(f, Role::Initiator, kSigRpk);
    EndpointParams wrong = ep.params;
    wrong.auth_key.key = harness::kOwnDhKey;
    EXPECT_EQ(code_of([&] { Session(*ep.vault, Role::Initiator, wrong, ep.creds); }), Errc::WrongKeyKind);
    wrong.auth_key.key = vault::KeyId{77};
    EXPECT_EQ(code_of([&] { Session(*ep.vault, Role::Initiator, wrong, ep.creds); }), Errc::UnknownKey);
    EXPECT_EQ(code_of([&] { Session(*ep.vault, Role::Initiator, ep.params, CredentialSet{}); }),
              Errc::CredentialUnknown);
}

TEST(Edhoc, MalformedMessagesAreDecodeErrors)
{
    Handshake h(kSigRpk);
    EXPECT_EQ(code_of([&] { h.r->handle_message1(from_hex("00")); }), Errc::DecodeError);
    EXPECT_EQ(h.r->state(), State::Failed);
    EXPECT_TRUE(h.er.vault->is_wiped(h.r->vault_session()));
}

TEST(Edhoc, WrongMethodIsRejected)
{
    Handshake h(kSigRpk);
    Bytes m1 = h.i->make_message1();
    m1[0] = 0x03;
    EXPECT_THROW(h.r->handle_message1(m1), Error);
    EXPECT_EQ(h.r->state(), State::Failed);
}

TEST(Edhoc, TamperedMessagesWipeTheSession)
{
    for (const auto& m : diagonal_modes()) {
        std::map<std::string, size_t> causes;
        const std::array<Bytes, 3> clean = Handshake(m).run();
        for (int msg : {2, 3}) {
            for (size_t off = 0; off < clean[msg - 1].size(); ++off) {
                Handshake h(m);
                Bytes m2 = h.r->handle_message1(h.i->make_message1());
                Session* victim = h.i.get();
                vault::KeyVault* v = h.ei.vault.get();
                std::function<void()> deliver;
                if (msg == 2) {
                    m2[off] ^= 0x01;
                    deliver = [&] { h.i->handle_message2(m2); };
                } else {
                    Bytes m3 = h.i->handle_message2(m2);
                    m3[off] ^= 0x01;
                    victim = h.r.get();
                    v = h.er.vault.get();
                    deliver = [&, m3] { h.r->handle_message3(m3); };
                }
                try {
                    deliver();
                    ADD_FAILURE() << m.name() << " msg" << msg << " @" << off << " accepted";
                } catch (const Error& e) {
                    EXPECT_EQ(e.code(), Errc::AuthFailedWiped) << m.name() << " msg" << msg << " @" << off;
                    ++causes[cause_of(e)];
                }
                EXPECT_EQ(victim->state(), State::Failed);
                EXPECT_TRUE(v->is_wiped(victim->vault_session()));
                for (Errc p : probe_gateway(*v, victim->vault_session())) EXPECT_EQ(p, Errc::WipedState);
            }
        }
        std::cout << m.name() << " causes:";
        for (const auto& [cause, n] : causes) std::cout << " " << cause << "=" << n;
        std::cout << "\n";
    }
}

TEST(Edhoc, InitiatorIdentityStaysEncrypted)
{
    for (const auto& m : AuthMethod::all()) {
        Handshake h(m);
        const auto msgs = h.run();
        const auto& d = h.f.initiator;
        const bool sig = m.initiator.auth == AuthKind::Signature;
        const Bytes& cred = m.initiator.cred == CredKind::Rpk ? (sig ? d.signature_public : d.dh_public)
                                                              : (sig ? d.cert_signature : d.cert_dh);
        const Bytes& kid = sig ? d.kid_signature : d.kid_dh;
        const Bytes id_cred = encode_id_cred({m.initiator.cred, m.initiator.cred == CredKind::Rpk ? kid : cred});
        for (const auto& msg : msgs) {
            EXPECT_FALSE(contains_subsequence(msg, cred)) << m.name();
            if (id_cred.size() > 3) {
                EXPECT_FALSE(contains_subsequence(msg, id_cred)) << m.name();
            }
        }
    }
}

TEST(Edhoc, IdCredEncoding)
{
    // A kid alone is sent in its compact identifier form.
    EXPECT_EQ(encode_id_cred({CredKind::Rpk, from_hex("05")}), from_hex("32"));
    const Bytes cert(135, 0xaa);
    const Bytes enc = encode_id_cred({CredKind::CborCert, cert});
    EXPECT_EQ(enc[0], 0xa1);
    EXPECT_EQ(enc[1], 0x18);
    EXPECT_EQ(enc[2], 33);
    cbor::Reader r(enc);
    EXPECT_EQ(read_id_cred(r), (IdCred{CredKind::CborCert, cert}));
}

TEST(Edhoc, TranscriptBindsMessage1)
{
    for (const auto& m : diagonal_modes()) {
        Handshake h(m);
        Bytes m1 = h.i->make_message1();
        // Swap the initiator's connection identifier in flight.
        m1.back() = static_cast<uint8_t>(m1.back() == 0x00 ? 0x01 : 0x00);
        const Bytes m2 = h.r->handle_message1(m1);
        EXPECT_EQ(code_of([&] { h.i->handle_message2(m2); }), Errc::AuthFailedWiped);
        EXPECT_EQ(h.i->state(), State::Failed);
        EXPECT_TRUE(h.ei.vault->is_wiped(h.i->vault_session()));
    }
}

TEST(Edhoc, Exporter)
{
    Handshake h(kSdhRpk);
    h.run();
    vault::KeyVault& v = *h.ei.vault;
    const HandshakeResult res = h.i->result();
    const Bytes a = exporter(v, res, "OSCORE_Master_Secret", {}, 16);
    EXPECT_EQ(a.size(), 16u);
    EXPECT_EQ(a, exporter(v, res, "OSCORE_Master_Secret", {}, 16));
    EXPECT_NE(a, exporter(v, res, "OSCORE_Master_Salt", {}, 16));
    EXPECT_NE(a, exporter(v, res, "OSCORE_Master_Secret", from_hex("01"), 16));
    EXPECT_EQ(exporter(v, res, "OSCORE_Master_Salt", {}, 8).size(), 8u);
    EXPECT_EQ(exporter(v, res, "x", {}, 255).size(), 255u);
    EXPECT_EQ(code_of([&] { exporter(v, res, "x", {}, 0); }), Errc::BadLength);
    EXPECT_EQ(code_of([&] { exporter(v, res, "x", {}, 256); }), Errc::BadLength);
    // Only the session result survives completion.
    EXPECT_EQ(v.key_kind(res.prk_out), vault::KeyKind::SessionResult);
}

TEST(Edhoc, ExporterFeedsOscore)
{
    Handshake h(kSigRpk);
    h.run();
    auto make_ctx = [&](vault::KeyVault& v, const HandshakeResult& res, ByteView sender, ByteView recipient) {
        const Bytes secret = exporter(v, res, harness::kMasterSecretLabel, {}, harness::kMasterSecretLen);
        const Bytes salt = exporter(v, res, harness::kMasterSaltLabel, {}, harness::kMasterSaltLen);
        const auto cid = v.provision(vault::ContextKind::OscoreContext,
                                     {{oscore::kMasterSecretKey, vault::KeyKind::MasterSecret, secret}});
        oscore::InitParams p;
        p.master_secret = {cid, oscore::kMasterSecretKey};
        p.master_salt = salt;
        p.sender_id.assign(sender.begin(), sender.end());
        p.recipient_id.assign(recipient.begin(), recipient.end());
        return oscore::oscore_init(v, p);
    };
    const Bytes c_i = h.f.initiator.connection_id, c_r = h.f.responder.connection_id;
    auto client = make_ctx(*h.ei.vault, h.i->result(), c_r, c_i);
    auto server = make_ctx(*h.er.vault, h.r->result(), c_i, c_r);
    EXPECT_EQ(client.common.common_iv, server.common.common_iv);

    const Bytes req = coap::serialize(harness::request_fixture());
    const Bytes wire = oscore::coap2oscore(*h.ei.vault, client, oscore::Role::Client, req);
    EXPECT_EQ(oscore::oscore2coap(*h.er.vault, server, oscore::Role::Server, wire).coap, req);
}

TEST(Edhoc, UnknownResponderKeyIsReportedToPeer)
{
    const Fixtures f = harness::make_fixtures(9);
    Endpoint ei = harness::provision_endpoint(f, Role::Initiator, kSigRpk);
    Endpoint er = harness::provision_endpoint(f, Role::Responder, kSigRpk);
    CredentialSet only_ca;
    for (const auto& e : ei.creds.entries) {
        if (e.kind != CredKind::Rpk) only_ca.entries.push_back(e);
    }
    ASSERT_FALSE(only_ca.entries.empty());

    auto ch = harness::make_memory_pair(std::chrono::milliseconds(2000));
    auto tx_of = [](harness::Channel& c) { return [&c](ByteView m) { c.send(m); }; };
    auto rx_of = [](harness::Channel& c) { return [&c]() { return c.receive(); }; };

    std::optional<RunResult> responder_result;
    std::thread responder([&] {
        responder_result = responder_run(*er.vault, er.params, er.creds, tx_of(*ch.second), rx_of(*ch.second));
    });
    vault::ContextId sid;
    try {
        initiator_run(*ei.vault, ei.params, only_ca, tx_of(*ch.first), rx_of(*ch.first), &sid);
        ADD_FAILURE() << "completed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::AuthFailedWiped);
        EXPECT_EQ(cause_of(e), "CredentialUnknown");
    }
    responder.join();
    ASSERT_TRUE(responder_result);
    ASSERT_TRUE(std::holds_alternative<ErrorMessage>(*responder_result));
    EXPECT_EQ(std::get<ErrorMessage>(*responder_result).code, 1u);
    EXPECT_TRUE(ei.vault->is_wiped(sid));
}

TEST(Edhoc, SilentPeerIsTransportError)
{
    const Fixtures f = harness::make_fixtures(9);
    Endpoint ei = harness::provision_endpoint(f, Role::Initiator, kSigRpk);
    auto ch = harness::make_memory_pair(std::chrono::milliseconds(100));
    EXPECT_EQ(code_of([&] {
                  initiator_run(
                      *ei.vault, ei.params, ei.creds, [&](ByteView m) { ch.first->send(m); },
                      [&] { return ch.first->receive(); });
              }),
              Errc::TransportError);
}

TEST(Edhoc, ParallelHandshakesShareAVault)
{
    const Fixtures f = harness::make_fixtures(21);
    Endpoint ei = harness::provision_endpoint(f, Role::Initiator, kSdhRpk);
    Endpoint er = harness::provision_endpoint(f, Role::Responder, kSdhRpk);
    std::atomic<int> done{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 6; ++t) {
        threads.emplace_back([&] {
            Session i(*ei.vault, Role::Initiator, ei.params, ei.creds);
            Session r(*er.vault, Role::Responder, er.params, er.creds);
            r.handle_message3(i.handle_message2(r.handle_message1(i.make_message1())));
            if (exporter(*ei.vault, i.result(), "x", {}, 16) == exporter(*er.vault, r.result(), "x", {}, 16)) ++done;
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(done.load(), 6);
}
