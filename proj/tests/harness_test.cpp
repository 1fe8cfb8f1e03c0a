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

#include "tinysec/error.hpp"
#include "tinysec/harness/demo.hpp"
#include "tinysec/harness/fixtures.hpp"
#include "tinysec/harness/transport.hpp"
#include "tinysec/harness/vectors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace tinysec;
using namespace tinysec::harness;
using edhoc::AuthKind;
using edhoc::AuthMethod;
using edhoc::CredKind;

namespace {

const AuthMethod kSigCert = AuthMethod::diagonal(AuthKind::Signature, CredKind::CborCert);
const AuthMethod kSdhRpk = AuthMethod::diagonal(AuthKind::StaticDh, CredKind::Rpk);

}  // namespace

TEST(Fixtures, Deterministic)
{
    const Fixtures a = make_fixtures(3), b = make_fixtures(3), c = make_fixtures(4);
    EXPECT_EQ(a.initiator.cert_signature, b.initiator.cert_signature);
    EXPECT_EQ(a.responder.dh_secret, b.responder.dh_secret);
    EXPECT_NE(a.ca_secret, c.ca_secret);
    for (const auto* d : {&a.initiator, &a.responder}) {
        EXPECT_EQ(d->kid_signature.size(), 1u);
        EXPECT_LT(d->kid_signature[0], 48);
        EXPECT_NE(d->kid_signature, d->kid_dh);
    }
    EXPECT_NE(a.initiator.connection_id, a.responder.connection_id);
    EXPECT_EQ(provisioned_secrets(a).size(), 6u);
}

TEST(Transport, MemoryPair)
{
    auto p = make_memory_pair(std::chrono::milliseconds(50));
    p.first->send(from_hex("0102"));
    EXPECT_EQ(p.second->receive(), from_hex("0102"));
    EXPECT_EQ(p.second->receive(), std::nullopt);
}

TEST(Transport, UdpLoopback)
{
    auto p = make_udp_loopback_pair(std::chrono::milliseconds(500));
    p.first->send(from_hex("aabb"));
    EXPECT_EQ(p.second->receive(), from_hex("aabb"));
    p.second->send(from_hex("cc"));
    EXPECT_EQ(p.first->receive(), from_hex("cc"));
}

TEST(Transport, Tap)
{
    auto p = make_memory_pair(std::chrono::milliseconds(50));
    auto t = tapped(std::move(p.first), [](size_t i, Bytes& m) {
        if (i == 1) return false;
        m.push_back(static_cast<uint8_t>(i));
        return true;
    });
    t->send(from_hex("00"));
    t->send(from_hex("11"));
    t->send(from_hex("22"));
    EXPECT_EQ(p.second->receive(), from_hex("0000"));
    EXPECT_EQ(p.second->receive(), from_hex("2202"));
}

TEST(Transport, Names)
{
    EXPECT_EQ(parse_transport("mem"), TransportKind::InMemory);
    EXPECT_EQ(parse_transport("udp"), TransportKind::Udp);
    EXPECT_EQ(parse_transport("tcp"), std::nullopt);
    const HostPort hp = HostPort::parse("127.0.0.1:5683");
    EXPECT_EQ(hp.host, "127.0.0.1");
    EXPECT_EQ(hp.port, 5683);
    EXPECT_EQ(hp.to_string(), "127.0.0.1:5683");
    EXPECT_THROW(HostPort::parse("nohost"), std::invalid_argument);
    EXPECT_THROW(HostPort::parse("h:99999"), std::invalid_argument);
}

TEST(EdhocDemo, AllModes)
{
    for (const auto& m : AuthMethod::all()) {
        EdhocDemoOptions o;
        o.method = m;
        const auto r = run_edhoc_demo(o);
        EXPECT_TRUE(r.ok()) << m.name();
        EXPECT_EQ(r.sizes.measured[0], 37u);
        EXPECT_EQ(r.audit.find_leak(), std::nullopt) << m.name();
    }
}

TEST(EdhocDemo, SizeDeviations)
{
    EdhocDemoOptions o;
    o.method = kSigCert;
    const auto r = run_edhoc_demo(o);
    ASSERT_TRUE(r.sizes.reference);
    EXPECT_EQ(r.sizes.max_deviation(), 0.0);
    o.method = AuthMethod::diagonal(AuthKind::Signature, CredKind::Rpk);
    const auto s = run_edhoc_demo(o);
    ASSERT_TRUE(s.sizes.deviations());
    EXPECT_LT((*s.sizes.deviations())[1], 0.0);
    EXPECT_LE(s.sizes.max_deviation(), 15.0);
    o.method = *AuthMethod::parse("sig-rpk/sdh-cert");
    EXPECT_FALSE(run_edhoc_demo(o).sizes.reference);
}

TEST(EdhocDemo, UdpMatchesMemory)
{
    EdhocDemoOptions o;
    o.method = kSdhRpk;
    o.seed = 77;
    const auto mem = run_edhoc_demo(o);
    o.transport = TransportKind::Udp;
    const auto udp = run_edhoc_demo(o);
    ASSERT_TRUE(mem.ok());
    ASSERT_TRUE(udp.ok());
    EXPECT_EQ(mem.initiator.master_secret, udp.initiator.master_secret);
    EXPECT_EQ(mem.audit.wire, udp.audit.wire);
}

TEST(EdhocDemo, SeedChangesEverything)
{
    EdhocDemoOptions o;
    o.method = kSdhRpk;
    const auto a = run_edhoc_demo(o);
    const auto b = run_edhoc_demo(o);
    o.seed = 2;
    const auto c = run_edhoc_demo(o);
    EXPECT_EQ(a.audit.wire, b.audit.wire);
    EXPECT_NE(a.initiator.master_secret, c.initiator.master_secret);
}

TEST(EdhocDemo, TamperSendsErrorToPeer)
{
    for (int msg : {2, 3}) {
        EdhocDemoOptions o;
        o.method = kSigCert;
        o.tamper = TamperSpec{msg, 40, 0x01};
        const auto r = run_edhoc_demo(o);
        const PartyOutcome& victim = msg == 2 ? r.initiator : r.responder;
        const PartyOutcome& peer = msg == 2 ? r.responder : r.initiator;
        EXPECT_FALSE(victim.complete);
        EXPECT_EQ(victim.error, Errc::AuthFailedWiped);
        EXPECT_TRUE(victim.session_wiped);
        // Message 3 is the last one, so only a message-2 victim has someone
        // waiting for its error.
        if (msg == 2) {
            EXPECT_FALSE(peer.complete);
            ASSERT_TRUE(peer.peer_error);
        }
        EXPECT_FALSE(r.ok());
    }
}

TEST(EdhocDemo, DroppedMessageTimesOut)
{
    EdhocDemoOptions o;
    o.method = kSdhRpk;
    o.drop_message2 = true;
    o.timeout = std::chrono::milliseconds(100);
    const auto r = run_edhoc_demo(o);
    EXPECT_EQ(r.initiator.error, Errc::TransportError);
    EXPECT_EQ(r.responder.error, Errc::TransportError);
}

TEST(OscoreDemo, SizesAndRoundTrip)
{
    const auto r = run_oscore_demo({});
    EXPECT_TRUE(r.roundtrip_ok) << r.detail;
    EXPECT_EQ(r.coap_request, 24u);
    EXPECT_EQ(r.coap_response, 24u);
    EXPECT_EQ(r.oscore_response, 35u);
    // An empty Sender ID still costs the kid flag and a one-byte Partial IV,
    // so the request carries two bytes more than the response.
    EXPECT_EQ(r.oscore_request, 37u);
    EXPECT_EQ(r.audit.find_leak(), std::nullopt);
}

TEST(OscoreDemo, TamperAndReplay)
{
    for (OscoreTamper t : {OscoreTamper::Tag, OscoreTamper::Payload}) {
        OscoreDemoOptions o;
        o.tamper = t;
        o.replay = true;
        const auto r = run_oscore_demo(o);
        EXPECT_FALSE(r.roundtrip_ok);
        EXPECT_EQ(r.error, Errc::AuthFailed);
        EXPECT_EQ(r.context_survived, true);
        EXPECT_TRUE(r.replay_rejected());
    }
    OscoreDemoOptions o;
    o.replay = true;
    o.transport = TransportKind::Udp;
    EXPECT_TRUE(run_oscore_demo(o).replay_rejected());
}

TEST(CombinedDemo, AllModes)
{
    for (const auto& m : AuthMethod::all()) {
        CombinedDemoOptions o;
        o.method = m;
        const auto r = run_combined_demo(o);
        EXPECT_TRUE(r.ok()) << m.name();
        ASSERT_TRUE(r.oscore);
        EXPECT_EQ(r.oscore->audit.find_leak(), std::nullopt);
    }
}

TEST(CombinedDemo, DroppedHandshake)
{
    CombinedDemoOptions o;
    o.method = kSdhRpk;
    o.drop_message2 = true;
    o.timeout = std::chrono::milliseconds(100);
    const auto r = run_combined_demo(o);
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.oscore);
}

TEST(Audit, FindsLeaks)
{
    Audit a;
    a.secrets = {from_hex("a1a2a3a4")};
    a.wire = {from_hex("00a1a2a3")};
    EXPECT_EQ(a.find_leak(), std::nullopt);
    a.vault_outputs = {from_hex("ffa1a2a3a4ff")};
    EXPECT_TRUE(a.find_leak());
}

TEST(Vectors, FrozenFilesVerify)
{
    const auto checks = verify_vector_dir(TINYSEC_VECTOR_DIR);
    EXPECT_GE(checks.size(), 27u);
    for (const auto& c : checks) EXPECT_TRUE(c.ok) << c.file << " #" << c.record << " " << c.detail;
}

TEST(Vectors, DumpMatchesFrozenFiles)
{
    const auto dir = std::filesystem::temp_directory_path() / "tinysec_vectors_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto written = dump_vectors(dir.string());
    EXPECT_EQ(written.size(), kVectorKinds.size());
    for (const auto& kind : kVectorKinds) {
        const auto fresh = load_vector_file((dir / (kind + ".vec")).string());
        const auto frozen = load_vector_file(std::string(TINYSEC_VECTOR_DIR) + "/" + kind + ".vec");
        ASSERT_EQ(fresh.size(), frozen.size()) << kind;
        for (size_t i = 0; i < fresh.size(); ++i) {
            auto a = fresh[i].fields, b = frozen[i].fields;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            EXPECT_EQ(a, b) << kind << " #" << i;
        }
    }
    std::filesystem::remove_all(dir);
}

TEST(Vectors, TamperedRecordFails)
{
    VectorRecord r;
    r.set("ikm", from_hex("0b0b"));
    r.set("salt", {});
    r.set("info", {});
    r.set("okm_length", from_hex("0010"));
    const VectorRecord out = compute_vector("hkdf_sha256", r);
    EXPECT_EQ(out.at("okm").size(), 16u);
}
