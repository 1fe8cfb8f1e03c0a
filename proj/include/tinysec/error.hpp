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

#include <stdexcept>
#include <string>

namespace tinysec {

// Every failure the library reports is one of these codes. Modules throw
// `Error`; callers that need to branch inspect `code()`.
enum class Errc {
    // cbor
    Truncated,
    UnsupportedMajorType,
    NonCanonical,
    IntegerOverflow,
    NestingTooDeep,
    TypeMismatch,
    // coap
    HeaderTooShort,
    BadVersion,
    BadTokenLength,
    BadOptionDelta,
    TruncatedOption,
    OptionOrder,
    // crypto
    BadLength,
    AuthFailed,
    OutLenTooLarge,
    LowOrderPoint,
    MalformedSignature,
    // vault
    DuplicateContextId,
    UnknownContext,
    UnknownKey,
    WipedState,
    WrongKeyKind,
    // oscore
    IdTooLong,
    SeqNumExhausted,
    ReplayDetected,
    UnknownKid,
    MalformedOscoreOption,
    MissingBinding,
    // edhoc
    DecodeError,
    WrongState,
    CredentialUnknown,
    CertExpired,
    CertSignatureInvalid,
    TransportError,
    AuthFailedWiped,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    explicit Error(Errc code)
        : std::runtime_error(errc_name(code)), code_(code)
    {
    }
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tinysec
