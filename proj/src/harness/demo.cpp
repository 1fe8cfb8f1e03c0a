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

#include "tinysec/harness/demo.hpp"
#include "tinysec/oscore.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <thread>

namespace tinysec::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void observe(vault::KeyVault& v, Audit& audit)
{
    v.set_output_observer([&audit](std::string_view, ByteView out, bool exporter) {
        if (!exporter) audit.vault_outputs.emplace_back(out.begin(), out.end());
    });
}

struct Party {
    edhoc::Role role;
    Endpoint ep;
    std::optional<vault::ContextId> session;
    std::optional<edhoc::HandshakeResult> result;
    PartyOutcome outcome;
    std::vector<Bytes> sent;
    std::vector<Bytes> received;
    Audit audit;
};

std::unique_ptr<Party> make_party(const Fixtures& f, edhoc::Role role, const edhoc::AuthMethod& method)
{
    auto p = std::make_unique<Party>();
    p->role = role;
    p->ep = provision_endpoint(f, role, method);
    observe(*p->ep.vault, p->audit);
    return p;
}

void run_party(Party& p, Channel& ch)
{
    const edhoc::TxFn tx = [&](ByteView m) {
        p.sent.emplace_back(m.begin(), m.end());
        p.audit.wire.emplace_back(m.begin(), m.end());
        ch.send(m);
    };
    const edhoc::RxFn rx = [&]() {
        auto m = ch.receive();
        if (m) p.received.push_back(*m);
        return m;
    };
    vault::ContextId sid;
    vault::KeyVault& v = *p.ep.vault;
    try {
        const edhoc::RunResult r = p.role == edhoc::Role::Initiator
                                       ? edhoc::initiator_run(v, p.ep.params, p.ep.creds, tx, rx, &sid)
                                       : edhoc::responder_run(v, p.ep.params, p.ep.creds, tx, rx, &sid);
        p.session = sid;
        if (const auto* hs = std::get_if<edhoc::HandshakeResult>(&r)) {
            p.result = *hs;
            p.outcome.complete = true;
            p.outcome.master_secret = edhoc::exporter(v, *hs, kMasterSecretLabel, {}, kMasterSecretLen);
            p.outcome.master_salt = edhoc::exporter(v, *hs, kMasterSaltLabel, {}, kMasterSaltLen);
        } else {
            p.outcome.peer_error = std::get<edhoc::ErrorMessage>(r);
            p.outcome.detail = "peer reported: " + p.outcome.peer_error->diagnostic;
        }
    } catch (const Error& e) {
        if (sid.value != 0) p.session = sid;
        p.outcome.error = e.code();
        p.outcome.detail = e.what();
    }
    if (p.session) {
        p.outcome.session_wiped = v.is_wiped(*p.session);
        for (size_t i = 0; i < vault::kGatewayOpCount; ++i) {
            p.outcome.calls[i] = v.call_count(*p.session, static_cast<vault::GatewayOp>(i));
        }
    }
}

size_t size_at(const std::vector<Bytes>& v, size_t i)
{
    return i < v.size() ? v[i].size() : 0;
}

struct Handshake {
    Fixtures fixtures;
    std::unique_ptr<Party> initiator;
    std::unique_ptr<Party> responder;
    EdhocDemoReport report;
};

Handshake handshake(const edhoc::AuthMethod& method, TransportKind transport, uint64_t seed,
                    std::optional<TamperSpec> tamper, bool drop_message2, std::chrono::milliseconds timeout)
{
    Handshake h;
    h.fixtures = make_fixtures(seed);
    h.initiator = make_party(h.fixtures, edhoc::Role::Initiator, method);
    h.responder = make_party(h.fixtures, edhoc::Role::Responder, method);

    ChannelPair ch = make_pair(transport, timeout);
    auto corrupt = [](Bytes& m, const TamperSpec& t) {
        if (!m.empty()) m[std::min(t.offset, m.size() - 1)] ^= t.mask;
    };
    auto resp_ch = tapped(std::move(ch.second), [&](size_t index, Bytes& m) {
        if (index != 0) return true;
        if (drop_message2) return false;
        if (tamper && tamper->message == 2) corrupt(m, *tamper);
        return true;
    });
    auto init_ch = tapped(std::move(ch.first), [&](size_t index, Bytes& m) {
        if (index == 1 && tamper && tamper->message == 3) corrupt(m, *tamper);
        return true;
    });

    const auto t0 = Clock::now();
    std::thread responder([&] { run_party(*h.responder, *resp_ch); });
    run_party(*h.initiator, *init_ch);
    responder.join();

    EdhocDemoReport& r = h.report;
    r.elapsed_ms = ms_since(t0);
    r.sizes.mode = method.name();
    r.sizes.reference = reference_sizes(method);
    r.sizes.measured = {size_at(h.initiator->sent, 0), size_at(h.responder->sent, 0),
                        size_at(h.initiator->sent, 1)};
    r.initiator = h.initiator->outcome;
    r.responder = h.responder->outcome;
    r.exporter_match = r.initiator.complete && r.responder.complete &&
                       r.initiator.master_secret == r.responder.master_secret &&
                       r.initiator.master_salt == r.responder.master_salt;
    r.audit.secrets = provisioned_secrets(h.fixtures);
    r.audit.merge(h.initiator->audit);
    r.audit.merge(h.responder->audit);
    return h;
}

struct OscoreSide {
    std::shared_ptr<vault::KeyVault> vault;
    oscore::SecurityContext ctx;
};

OscoreSide make_oscore_side(std::shared_ptr<vault::KeyVault> v, ByteView master_secret, ByteView salt,
                            ByteView sender_id, ByteView recipient_id)
{
    const vault::ContextId id = v->provision(
        vault::ContextKind::OscoreContext,
        {{oscore::kMasterSecretKey, vault::KeyKind::MasterSecret, Bytes(master_secret.begin(), master_secret.end())}});
    oscore::InitParams p;
    p.master_secret = {id, oscore::kMasterSecretKey};
    p.master_salt.assign(salt.begin(), salt.end());
    p.sender_id.assign(sender_id.begin(), sender_id.end());
    p.recipient_id.assign(recipient_id.begin(), recipient_id.end());
    OscoreSide side{std::move(v), {}};
    side.ctx = oscore::oscore_init(*side.vault, p);
    return side;
}

Bytes unauthorized_reply(ByteView request)
{
    coap::Message reply;
    reply.type = coap::Type::Ack;
    reply.code = coap::code::kUnauthorized;
    try {
        const coap::Message req = coap::parse(request);
        reply.message_id = req.message_id;
        reply.token = req.token;
    } catch (const Error&) {
        // Unparseable request: answer with an empty token.
    }
    return coap::serialize(reply);
}

// Server side of one exchange; returns what goes back on the wire.
Bytes serve(OscoreSide& server, ByteView incoming, std::optional<Errc>& error, std::string& detail)
{
    try {
        const auto r = oscore::oscore2coap(*server.vault, server.ctx, oscore::Role::Server, incoming);
        if (r.status == oscore::UnprotectStatus::CoapPassThrough) {
            detail = "request was not OSCORE-protected";
            return unauthorized_reply(incoming);
        }
        const coap::Message resp = response_fixture(coap::parse(r.coap));
        return oscore::coap2oscore(*server.vault, server.ctx, oscore::Role::Server, coap::serialize(resp));
    } catch (const Error& e) {
        error = e.code();
        detail = e.what();
        return unauthorized_reply(incoming);
    }
}

bool accept_response(OscoreSide& client, ByteView incoming, ByteView expected, std::optional<Errc>& error,
                     std::string& detail)
{
    try {
        const auto r = oscore::oscore2coap(*client.vault, client.ctx, oscore::Role::Client, incoming);
        if (r.status == oscore::UnprotectStatus::CoapPassThrough) {
            if (detail.empty()) detail = "unprotected response";
            return false;
        }
        if (!std::equal(r.coap.begin(), r.coap.end(), expected.begin(), expected.end())) {
            detail = "decrypted response differs from the one sent";
            return false;
        }
        return true;
    } catch (const Error& e) {
        error = e.code();
        detail = e.what();
        return false;
    }
}

Bytes receive_or_throw(Channel& ch, const char* what)
{
    auto m = ch.receive();
    if (!m) throw Error(Errc::TransportError, std::string("timed out waiting for ") + what);
    return std::move(*m);
}

OscoreDemoReport exchange(OscoreSide& client, OscoreSide& server, TransportKind transport, OscoreTamper tamper,
                          bool replay, std::chrono::milliseconds timeout)
{
    OscoreDemoReport rep;
    ChannelPair ch = make_pair(transport, timeout);
    Channel& client_ch = *ch.first;
    Channel& server_ch = *ch.second;
    auto send = [&](Channel& c, ByteView m) {
        rep.audit.wire.emplace_back(m.begin(), m.end());
        c.send(m);
    };

    const auto t0 = Clock::now();
    const coap::Message request = request_fixture();
    const Bytes req = coap::serialize(request);
    const Bytes expected = coap::serialize(response_fixture(request));
    rep.coap_request = req.size();
    rep.coap_response = expected.size();

    // One request/response cycle; `mutate` edits the protected request in flight.
    auto cycle = [&](Bytes& protected_req, std::optional<Errc>& error, std::string& detail, bool mutate) {
        protected_req = oscore::coap2oscore(*client.vault, client.ctx, oscore::Role::Client, req);
        Bytes on_wire = protected_req;
        if (mutate && tamper == OscoreTamper::Tag) on_wire.back() ^= 0x01;
        if (mutate && tamper == OscoreTamper::Payload) {
            // First ciphertext byte follows the payload marker.
            const Bytes& m = on_wire;
            for (size_t i = m.size() - crypto::kAeadTagLen; i-- > 0;) {
                if (m[i] == 0xff) {
                    on_wire[i + 1] ^= 0x01;
                    break;
                }
            }
        }
        send(client_ch, on_wire);
        const Bytes reply = serve(server, receive_or_throw(server_ch, "request"), error, detail);
        send(server_ch, reply);
        const Bytes back = receive_or_throw(client_ch, "response");
        if (error) return false;
        if (!accept_response(client, back, expected, error, detail)) return false;
        rep.oscore_response = back.size();
        return true;
    };

    Bytes first;
    rep.roundtrip_ok = cycle(first, rep.error, rep.detail, true);
    rep.oscore_request = first.size();
    std::optional<Bytes> accepted;
    if (rep.roundtrip_ok) accepted = first;

    if (tamper != OscoreTamper::None) {
        Bytes again;
        std::optional<Errc> err;
        std::string detail;
        rep.context_survived = cycle(again, err, detail, false);
        if (*rep.context_survived) accepted = again;
    }

    // Replays the last request the server accepted.
    if (replay && accepted) {
        send(client_ch, *accepted);
        std::optional<Errc> err;
        std::string detail;
        send(server_ch, serve(server, receive_or_throw(server_ch, "replayed request"), err, detail));
        receive_or_throw(client_ch, "replay answer");
        rep.replay_error = err;
    }
    rep.elapsed_ms = ms_since(t0);
    return rep;
}

}  // namespace

std::optional<ReferenceSizes> reference_sizes(const edhoc::AuthMethod& method)
{
    if (method.initiator != method.responder) return std::nullopt;
    const bool sig = method.initiator.auth == edhoc::AuthKind::Signature;
    const bool rpk = method.initiator.cred == edhoc::CredKind::Rpk;
    if (!sig && rpk) return ReferenceSizes{37, 46, 20};
    if (sig && rpk) return ReferenceSizes{37, 117, 91};
    if (!sig) return ReferenceSizes{37, 186, 160};
    return ReferenceSizes{37, 243, 217};
}

std::optional<std::array<double, 3>> SizeRow::deviations() const
{
    if (!reference) return std::nullopt;
    const std::array<size_t, 3> ref{reference->msg1, reference->msg2, reference->msg3};
    std::array<double, 3> out{};
    for (size_t i = 0; i < 3; ++i) {
        out[i] = 100.0 * (static_cast<double>(measured[i]) - static_cast<double>(ref[i])) / static_cast<double>(ref[i]);
    }
    return out;
}

double SizeRow::max_deviation() const
{
    const auto d = deviations();
    if (!d) return 0;
    double m = 0;
    for (double x : *d) m = std::max(m, std::fabs(x));
    return m;
}

void Audit::merge(const Audit& other)
{
    wire.insert(wire.end(), other.wire.begin(), other.wire.end());
    vault_outputs.insert(vault_outputs.end(), other.vault_outputs.begin(), other.vault_outputs.end());
    secrets.insert(secrets.end(), other.secrets.begin(), other.secrets.end());
}

std::optional<std::string> Audit::find_leak() const
{
    for (size_t s = 0; s < secrets.size(); ++s) {
        for (size_t i = 0; i < wire.size(); ++i) {
            if (contains_subsequence(wire[i], secrets[s])) {
                return "secret " + std::to_string(s) + " in transmitted message " + std::to_string(i);
            }
        }
        for (size_t i = 0; i < vault_outputs.size(); ++i) {
            if (contains_subsequence(vault_outputs[i], secrets[s])) {
                return "secret " + std::to_string(s) + " in vault output " + std::to_string(i);
            }
        }
    }
    return std::nullopt;
}

EdhocDemoReport run_edhoc_demo(const EdhocDemoOptions& opts)
{
    return handshake(opts.method, opts.transport, opts.seed, opts.tamper, opts.drop_message2, opts.timeout).report;
}

PartyRun run_edhoc_party(const Fixtures& f, edhoc::Role role, const edhoc::AuthMethod& method, Channel& channel)
{
    auto p = make_party(f, role, method);
    run_party(*p, channel);
    PartyRun out;
    out.outcome = p->outcome;
    if (role == edhoc::Role::Initiator) {
        out.sizes = {size_at(p->sent, 0), size_at(p->received, 0), size_at(p->sent, 1)};
    } else {
        out.sizes = {size_at(p->received, 0), size_at(p->sent, 0), size_at(p->received, 1)};
    }
    out.audit = p->audit;
    out.audit.secrets = provisioned_secrets(f);
    return out;
}

coap::Message request_fixture()
{
    coap::Message m;
    m.type = coap::Type::Confirmable;
    m.code = coap::code::kGet;
    m.message_id = 0x5d1f;
    m.token = {0x39, 0x74};
    m.options.push_back({coap::option::kUriPath, to_bytes("tv1")});
    m.payload = to_bytes("tinysec-req-1");
    return m;
}

coap::Message response_fixture(const coap::Message& request)
{
    coap::Message m;
    m.type = coap::Type::Ack;
    m.code = coap::code::kContent;
    m.message_id = request.message_id;
    m.token = request.token;
    m.payload = to_bytes("tinysec response.");
    return m;
}

std::optional<OscoreTamper> parse_oscore_tamper(std::string_view name)
{
    if (name == "none") return OscoreTamper::None;
    if (name == "tag") return OscoreTamper::Tag;
    if (name == "payload") return OscoreTamper::Payload;
    return std::nullopt;
}

OscoreDemoReport run_oscore_demo(const OscoreDemoOptions& opts)
{
    const Fixtures f = make_fixtures(opts.seed);
    auto client_vault = make_device_vault(f, edhoc::Role::Initiator);
    auto server_vault = make_device_vault(f, edhoc::Role::Responder);
    Audit vault_audit;
    observe(*client_vault, vault_audit);
    observe(*server_vault, vault_audit);

    const Bytes client_id;
    const Bytes server_id{0x01};
    OscoreSide client = make_oscore_side(client_vault, f.oscore_master_secret, f.oscore_master_salt, client_id,
                                         server_id);
    OscoreSide server = make_oscore_side(server_vault, f.oscore_master_secret, f.oscore_master_salt, server_id,
                                         client_id);
    OscoreDemoReport rep = exchange(client, server, opts.transport, opts.tamper, opts.replay, opts.timeout);
    client_vault->set_output_observer(nullptr);
    server_vault->set_output_observer(nullptr);
    rep.audit.merge(vault_audit);
    rep.audit.secrets = provisioned_secrets(f);
    return rep;
}

CombinedDemoReport run_combined_demo(const CombinedDemoOptions& opts)
{
    Handshake h = handshake(opts.method, opts.transport, opts.seed, std::nullopt, opts.drop_message2, opts.timeout);
    CombinedDemoReport out;
    out.edhoc = h.report;
    if (!out.edhoc.ok()) return out;

    Audit vault_audit;
    observe(*h.initiator->ep.vault, vault_audit);
    observe(*h.responder->ep.vault, vault_audit);

    // Initiator sends with C_R as its OSCORE Sender ID, responder with C_I.
    const Bytes& c_i = h.fixtures.initiator.connection_id;
    const Bytes& c_r = h.fixtures.responder.connection_id;
    OscoreSide client = make_oscore_side(h.initiator->ep.vault, out.edhoc.initiator.master_secret,
                                         out.edhoc.initiator.master_salt, c_r, c_i);
    OscoreSide server = make_oscore_side(h.responder->ep.vault, out.edhoc.responder.master_secret,
                                         out.edhoc.responder.master_salt, c_i, c_r);
    try {
        out.oscore = exchange(client, server, opts.transport, OscoreTamper::None, false, opts.timeout);
    } catch (const Error& e) {
        OscoreDemoReport failed;
        failed.error = e.code();
        failed.detail = e.what();
        out.oscore = failed;
    }
    h.initiator->ep.vault->set_output_observer(nullptr);
    h.responder->ep.vault->set_output_observer(nullptr);
    out.oscore->audit.merge(vault_audit);
    out.oscore->audit.secrets = out.edhoc.audit.secrets;
    out.oscore->audit.secrets.push_back(out.edhoc.initiator.master_secret);
    return out;
}

}  // namespace tinysec::harness
