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

// The evaluation scenarios: EDHOC handshakes with size reports, an OSCORE
// request/response round trip, and EDHOC feeding OSCORE.

#include "tinysec/bytes.hpp"
#include "tinysec/coap.hpp"
#include "tinysec/edhoc.hpp"
#include "tinysec/error.hpp"
#include "tinysec/harness/fixtures.hpp"
#include "tinysec/harness/transport.hpp"

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace tinysec::harness {

struct ReferenceSizes {
    size_t msg1 = 0;
    size_t msg2 = 0;
    size_t msg3 = 0;
};

// Published message sizes; only the four diagonal modes have one.
std::optional<ReferenceSizes> reference_sizes(const edhoc::AuthMethod& method);

struct SizeRow {
    std::string mode;
    std::array<size_t, 3> measured{};
    std::optional<ReferenceSizes> reference;

    // Signed percentage per message; empty without a reference row.
    std::optional<std::array<double, 3>> deviations() const;
    // Largest absolute deviation in percent, 0 without a reference row.
    double max_deviation() const;
};

// Everything that crossed a transport or left a vault during a run, plus
// the secrets that must not appear in any of it.
struct Audit {
    std::vector<Bytes> wire;
    std::vector<Bytes> vault_outputs;
    std::vector<Bytes> secrets;

    void merge(const Audit& other);
    // Description of the first secret found in wire or vault output.
    std::optional<std::string> find_leak() const;
};

struct TamperSpec {
    // EDHOC message number (2 or 3).
    int message = 2;
    size_t offset = 0;
    uint8_t mask = 0x01;
};

struct PartyOutcome {
    bool complete = false;
    std::optional<Errc> error;
    std::string detail;
    std::optional<edhoc::ErrorMessage> peer_error;
    bool session_wiped = false;
    std::array<size_t, vault::kGatewayOpCount> calls{};
    Bytes master_secret;
    Bytes master_salt;
};

struct EdhocDemoOptions {
    edhoc::AuthMethod method;
    TransportKind transport = TransportKind::InMemory;
    uint64_t seed = 1;
    std::optional<TamperSpec> tamper;
    bool drop_message2 = false;
    std::chrono::milliseconds timeout{2000};
};

struct EdhocDemoReport {
    SizeRow sizes;
    PartyOutcome initiator;
    PartyOutcome responder;
    bool exporter_match = false;
    double elapsed_ms = 0;
    Audit audit;

    bool ok() const { return initiator.complete && responder.complete && exporter_match; }
};

inline constexpr std::string_view kMasterSecretLabel = "OSCORE_Master_Secret";
inline constexpr std::string_view kMasterSaltLabel = "OSCORE_Master_Salt";
inline constexpr size_t kMasterSecretLen = 16;
inline constexpr size_t kMasterSaltLen = 8;

EdhocDemoReport run_edhoc_demo(const EdhocDemoOptions& opts);

// One side of a handshake over a caller-supplied channel, for running
// initiator and responder in separate processes.
struct PartyRun {
    PartyOutcome outcome;
    // msg1, msg2, msg3 lengths as seen by this side (0 if never seen).
    std::array<size_t, 3> sizes{};
    Audit audit;
};
PartyRun run_edhoc_party(const Fixtures& f, edhoc::Role role, const edhoc::AuthMethod& method, Channel& channel);

// 24-byte CoAP fixtures: CON GET with a 2-byte token, Uri-Path "tv1" and a
// padded payload, and the matching ACK 2.05 Content.
coap::Message request_fixture();
coap::Message response_fixture(const coap::Message& request);

enum class OscoreTamper : uint8_t { None, Tag, Payload };
std::optional<OscoreTamper> parse_oscore_tamper(std::string_view name);

struct OscoreDemoOptions {
    TransportKind transport = TransportKind::InMemory;
    uint64_t seed = 1;
    OscoreTamper tamper = OscoreTamper::None;
    bool replay = false;
    std::chrono::milliseconds timeout{2000};
};

struct OscoreDemoReport {
    size_t coap_request = 0;
    size_t coap_response = 0;
    size_t oscore_request = 0;
    size_t oscore_response = 0;
    bool roundtrip_ok = false;
    std::optional<Errc> error;
    std::string detail;
    // After a rejected tampered request, a fresh request still goes through.
    std::optional<bool> context_survived;
    // Outcome of resending an accepted request verbatim.
    std::optional<Errc> replay_error;
    double elapsed_ms = 0;
    Audit audit;

    bool replay_rejected() const { return replay_error == Errc::ReplayDetected; }
};

OscoreDemoReport run_oscore_demo(const OscoreDemoOptions& opts);

struct CombinedDemoOptions {
    edhoc::AuthMethod method;
    TransportKind transport = TransportKind::InMemory;
    uint64_t seed = 1;
    bool drop_message2 = false;
    std::chrono::milliseconds timeout{2000};
};

struct CombinedDemoReport {
    EdhocDemoReport edhoc;
    std::optional<OscoreDemoReport> oscore;

    bool ok() const { return edhoc.ok() && oscore && oscore->roundtrip_ok; }
};

CombinedDemoReport run_combined_demo(const CombinedDemoOptions& opts);

}  // namespace tinysec::harness
