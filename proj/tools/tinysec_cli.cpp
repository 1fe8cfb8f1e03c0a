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

// tinysec command line: EDHOC handshakes, OSCORE round trips and the
// combination of both over in-memory or UDP transports, plus test-vector
// dump/verify.

#include "tinysec/edhoc.hpp"
#include "tinysec/error.hpp"
#include "tinysec/harness/demo.hpp"
#include "tinysec/harness/fixtures.hpp"
#include "tinysec/harness/transport.hpp"
#include "tinysec/harness/vectors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using tinysec::Errc;
using tinysec::errc_name;
using nlohmann::json;
namespace edhoc = tinysec::edhoc;
namespace harness = tinysec::harness;

struct Common {
    uint64_t seed = 1;
    std::string transport = "mem";
    bool json = false;
    int timeout_ms = 2000;
};

harness::TransportKind transport_or_die(const std::string& name)
{
    auto t = harness::parse_transport(name);
    if (!t) throw CLI::ValidationError("--transport", "expected mem or udp");
    return *t;
}

std::vector<edhoc::AuthMethod> modes_or_die(const std::string& name)
{
    if (name == "all") return edhoc::AuthMethod::all();
    if (name == "diagonal") {
        std::vector<edhoc::AuthMethod> out;
        for (const auto& m : edhoc::AuthMethod::all()) {
            if (m.initiator == m.responder) out.push_back(m);
        }
        return out;
    }
    auto m = edhoc::AuthMethod::parse(name);
    if (!m) throw CLI::ValidationError("--mode", "unknown mode '" + name + "'");
    return {*m};
}

std::optional<harness::TamperSpec> edhoc_tamper_or_die(const std::string& text)
{
    if (text.empty()) return std::nullopt;
    harness::TamperSpec t;
    const auto colon = text.find(':');
    const std::string msg = text.substr(0, colon);
    if (msg == "msg2") {
        t.message = 2;
    } else if (msg == "msg3") {
        t.message = 3;
    } else {
        throw CLI::ValidationError("--tamper", "expected msg2[:offset] or msg3[:offset]");
    }
    // Default: the last byte, which sits inside the authenticated part.
    t.offset = colon == std::string::npos ? SIZE_MAX : std::stoul(text.substr(colon + 1));
    return t;
}

std::string outcome_text(const harness::PartyOutcome& o)
{
    if (o.complete) return "complete";
    if (o.error) return std::string("failed(") + errc_name(*o.error) + ")";
    if (o.peer_error) return "peer-error(" + o.peer_error->diagnostic + ")";
    return "failed";
}

json outcome_json(const harness::PartyOutcome& o)
{
    json j{{"status", outcome_text(o)}, {"session_wiped", o.session_wiped}};
    if (!o.detail.empty()) j["detail"] = o.detail;
    return j;
}

json size_row_json(const harness::SizeRow& r)
{
    json j{{"mode", r.mode},
           {"msg1_len", r.measured[0]},
           {"msg2_len", r.measured[1]},
           {"msg3_len", r.measured[2]}};
    if (r.reference) {
        j["paper_msg1"] = r.reference->msg1;
        j["paper_msg2"] = r.reference->msg2;
        j["paper_msg3"] = r.reference->msg3;
        j["deviation_pct"] = *r.deviations();
    } else {
        j["paper_msg1"] = nullptr;
        j["paper_msg2"] = nullptr;
        j["paper_msg3"] = nullptr;
        j["deviation_pct"] = nullptr;
    }
    return j;
}

std::string size_row_text(const harness::SizeRow& r)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-32s msg1=%3zu msg2=%3zu msg3=%3zu", r.mode.c_str(), r.measured[0],
                  r.measured[1], r.measured[2]);
    std::string s = buf;
    if (r.reference) {
        std::snprintf(buf, sizeof buf, "  reference=%zu/%zu/%zu dev=%+.1f%%/%+.1f%%/%+.1f%%", r.reference->msg1, r.reference->msg2,
                      r.reference->msg3, (*r.deviations())[0], (*r.deviations())[1], (*r.deviations())[2]);
        s += buf;
    }
    return s;
}

int run_edhoc(const Common& c, const std::string& mode, const std::string& tamper, const std::string& listen,
              const std::string& connect)
{
    const auto timeout = std::chrono::milliseconds(c.timeout_ms);
    const auto methods = modes_or_die(mode);

    if (!listen.empty() || !connect.empty()) {
        if (methods.size() != 1) throw CLI::ValidationError("--mode", "pick a single mode with --listen/--connect");
        const bool responder = !listen.empty();
        auto channel = responder ? harness::make_udp_channel(harness::HostPort::parse(listen), std::nullopt, timeout)
                                 : harness::make_udp_channel({"0.0.0.0", 0}, harness::HostPort::parse(connect), timeout);
        const auto f = harness::make_fixtures(c.seed);
        const auto role = responder ? edhoc::Role::Responder : edhoc::Role::Initiator;
        const auto run = harness::run_edhoc_party(f, role, methods[0], *channel);
        harness::SizeRow row{methods[0].name(), run.sizes, harness::reference_sizes(methods[0])};
        if (c.json) {
            json j{{"role", responder ? "responder" : "initiator"}, {"sizes", size_row_json(row)},
                   {"outcome", outcome_json(run.outcome)}};
            if (run.outcome.complete) j["master_secret_len"] = run.outcome.master_secret.size();
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << size_row_text(row) << "  " << (responder ? "responder=" : "initiator=")
                      << outcome_text(run.outcome) << "\n";
            if (!run.outcome.detail.empty()) std::cout << "  detail: " << run.outcome.detail << "\n";
        }
        return run.outcome.complete ? 0 : 1;
    }

    const auto t = edhoc_tamper_or_die(tamper);
    json rows = json::array();
    bool all_ok = true;
    double total_ms = 0;
    for (const auto& m : methods) {
        harness::EdhocDemoOptions o;
        o.method = m;
        o.transport = transport_or_die(c.transport);
        o.seed = c.seed;
        o.tamper = t;
        o.timeout = timeout;
        const auto r = harness::run_edhoc_demo(o);
        all_ok = all_ok && r.ok();
        total_ms += r.elapsed_ms;
        if (c.json) {
            json j = size_row_json(r.sizes);
            j["initiator"] = outcome_json(r.initiator);
            j["responder"] = outcome_json(r.responder);
            j["exporter_match"] = r.exporter_match;
            j["elapsed_ms_indicative"] = r.elapsed_ms;
            rows.push_back(j);
        } else {
            char ms[32];
            std::snprintf(ms, sizeof ms, "%.2f", r.elapsed_ms);
            std::cout << size_row_text(r.sizes) << "  initiator=" << outcome_text(r.initiator)
                      << " responder=" << outcome_text(r.responder)
                      << " exporter=" << (r.exporter_match ? "match" : "differ") << " time=" << ms
                      << "ms (indicative)\n";
        }
    }
    if (c.json) {
        std::cout << json{{"transport", c.transport}, {"seed", c.seed}, {"rows", rows}, {"all_complete", all_ok},
                          {"total_ms_indicative", total_ms}}
                         .dump(2)
                  << "\n";
    } else if (methods.size() > 1) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.1f", total_ms);
        std::cout << methods.size() << " modes, " << (all_ok ? "all complete" : "FAILURES") << ", " << ms
                  << "ms total (indicative)\n";
    }
    return all_ok ? 0 : 1;
}

json oscore_json(const harness::OscoreDemoReport& r)
{
    json j{{"coap_request_len", r.coap_request},   {"coap_response_len", r.coap_response},
           {"oscore_request_len", r.oscore_request}, {"oscore_response_len", r.oscore_response},
           {"roundtrip_ok", r.roundtrip_ok},       {"elapsed_ms_indicative", r.elapsed_ms}};
    if (r.error) j["error"] = errc_name(*r.error);
    if (!r.detail.empty()) j["detail"] = r.detail;
    if (r.context_survived) j["context_survived"] = *r.context_survived;
    if (r.replay_error) j["replay_error"] = errc_name(*r.replay_error);
    return j;
}

std::string oscore_text(const harness::OscoreDemoReport& r)
{
    std::string s = "coap=" + std::to_string(r.coap_request) + "/" + std::to_string(r.coap_response) +
                    " oscore=" + std::to_string(r.oscore_request) + "/" + std::to_string(r.oscore_response) +
                    " roundtrip=";
    if (r.roundtrip_ok) {
        s += "ok";
    } else {
        s += std::string("failed(") + (r.error ? errc_name(*r.error) : r.detail.c_str()) + ")";
    }
    if (r.context_survived) s += std::string(" context=") + (*r.context_survived ? "intact" : "lost");
    return s;
}

int run_oscore(const Common& c, const std::string& tamper, bool replay)
{
    harness::OscoreDemoOptions o;
    o.transport = transport_or_die(c.transport);
    o.seed = c.seed;
    o.timeout = std::chrono::milliseconds(c.timeout_ms);
    o.replay = replay;
    if (!tamper.empty()) {
        auto t = harness::parse_oscore_tamper(tamper);
        if (!t) throw CLI::ValidationError("--tamper", "expected tag or payload");
        o.tamper = *t;
    }
    const auto r = harness::run_oscore_demo(o);
    if (c.json) {
        std::cout << oscore_json(r).dump(2) << "\n";
    } else {
        std::cout << oscore_text(r) << "  (sizes are request/response)\n";
        if (replay) {
            std::cout << "replay="
                      << (r.replay_rejected() ? "rejected(ReplayDetected)"
                                              : std::string("accepted") +
                                                    (r.replay_error ? std::string("(") + errc_name(*r.replay_error) + ")"
                                                                    : std::string()))
                      << "\n";
        }
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.2f", r.elapsed_ms);
        std::cout << "time=" << ms << "ms (indicative)\n";
    }
    if (!r.roundtrip_ok) return 1;
    if (replay && !r.replay_rejected()) return 1;
    return 0;
}

int run_combined(const Common& c, const std::string& mode, bool drop_message2)
{
    bool all_ok = true;
    json rows = json::array();
    for (const auto& m : modes_or_die(mode)) {
        harness::CombinedDemoOptions o;
        o.method = m;
        o.transport = transport_or_die(c.transport);
        o.seed = c.seed;
        o.drop_message2 = drop_message2;
        o.timeout = std::chrono::milliseconds(c.timeout_ms);
        const auto r = harness::run_combined_demo(o);
        all_ok = all_ok && r.ok();
        if (c.json) {
            json j{{"mode", m.name()},
                   {"edhoc", {{"initiator", outcome_json(r.edhoc.initiator)},
                              {"responder", outcome_json(r.edhoc.responder)},
                              {"exporter_match", r.edhoc.exporter_match}}},
                   {"master_secret_len", r.edhoc.initiator.master_secret.size()}};
            if (r.oscore) j["oscore"] = oscore_json(*r.oscore);
            rows.push_back(j);
        } else {
            std::cout << m.name() << ": edhoc initiator=" << outcome_text(r.edhoc.initiator)
                      << " responder=" << outcome_text(r.edhoc.responder);
            if (r.edhoc.ok()) std::cout << " master_secret=" << r.edhoc.initiator.master_secret.size() << "B";
            if (r.oscore) std::cout << " | oscore " << oscore_text(*r.oscore);
            std::cout << "\n";
            if (!r.edhoc.initiator.detail.empty()) std::cout << "  initiator: " << r.edhoc.initiator.detail << "\n";
            if (!r.edhoc.responder.detail.empty()) std::cout << "  responder: " << r.edhoc.responder.detail << "\n";
        }
    }
    if (c.json) std::cout << json{{"rows", rows}, {"all_ok", all_ok}}.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

int run_vectors(const std::string& action, const std::string& dir, bool as_json)
{
    if (action == "dump") {
        for (const auto& p : harness::dump_vectors(dir)) std::cout << "wrote " << p << "\n";
        return 0;
    }
    const auto checks = harness::verify_vector_dir(dir);
    bool ok = true;
    json arr = json::array();
    for (const auto& ch : checks) {
        ok = ok && ch.ok;
        if (as_json) {
            arr.push_back({{"file", ch.file}, {"record", ch.record}, {"ok", ch.ok}, {"detail", ch.detail}});
        } else {
            std::cout << (ch.ok ? "ok   " : "FAIL ") << ch.file << " #" << ch.record;
            if (!ch.detail.empty()) std::cout << "  " << ch.detail;
            std::cout << "\n";
        }
    }
    if (as_json) std::cout << json{{"checks", arr}, {"all_ok", ok}}.dump(2) << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"tinysec: EDHOC and OSCORE demos"};
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "Fixture and RNG seed")->capture_default_str();
        sub->add_option("--transport", c.transport, "mem or udp")->capture_default_str();
        sub->add_option("--timeout-ms", c.timeout_ms, "Receive timeout")->capture_default_str();
        sub->add_flag("--json", c.json, "Machine-readable report");
    };

    std::string mode = "all";
    std::string tamper;
    std::string listen;
    std::string connect;
    auto* edhoc_cmd = app.add_subcommand("edhoc", "Run EDHOC handshakes and report message sizes");
    add_common(edhoc_cmd);
    edhoc_cmd->add_option("--mode", mode, "Mode name (e.g. sig-rpk, static-dh-cert, sig-rpk/static-dh-cert), all or diagonal")
        ->capture_default_str();
    edhoc_cmd->add_option("--tamper", tamper, "Flip a bit in flight: msg2[:offset] or msg3[:offset]");
    auto* listen_opt = edhoc_cmd->add_option("--listen", listen, "Run only the responder on UDP host:port");
    auto* connect_opt = edhoc_cmd->add_option("--connect", connect, "Run only the initiator against UDP host:port");
    listen_opt->excludes(connect_opt);

    std::string oscore_tamper;
    bool replay = false;
    auto* oscore_cmd = app.add_subcommand("oscore", "Protected CoAP request/response round trip");
    add_common(oscore_cmd);
    oscore_cmd->add_option("--tamper", oscore_tamper, "Corrupt the request in flight: tag or payload");
    oscore_cmd->add_flag("--replay", replay, "Resend the accepted request");

    std::string combined_mode = "static-dh-rpk";
    bool drop_message2 = false;
    auto* combined_cmd = app.add_subcommand("combined", "EDHOC, exporter, then OSCORE");
    add_common(combined_cmd);
    combined_cmd->add_option("--mode", combined_mode, "Mode name, all or diagonal")->capture_default_str();
    combined_cmd->add_flag("--drop-msg2", drop_message2, "Lose message_2 in transit");

    std::string vec_action;
    std::string vec_dir = "tests/vectors";
    bool vec_json = false;
    auto* vectors_cmd = app.add_subcommand("vectors", "Write or check crypto test-vector files");
    vectors_cmd->add_option("action", vec_action, "dump or verify")->required()->check(CLI::IsMember({"dump", "verify"}));
    vectors_cmd->add_option("--dir", vec_dir, "Vector directory")->capture_default_str();
    vectors_cmd->add_flag("--json", vec_json, "Machine-readable report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*edhoc_cmd) return run_edhoc(c, mode, tamper, listen, connect);
        if (*oscore_cmd) return run_oscore(c, oscore_tamper, replay);
        if (*combined_cmd) return run_combined(c, combined_mode, drop_message2);
        if (*vectors_cmd) return run_vectors(vec_action, vec_dir, vec_json);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const tinysec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
