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

#include "tinysec/cbor_cert.hpp"
#include "tinysec/cbor.hpp"
#include "tinysec/error.hpp"

namespace tinysec::edhoc {

namespace {

void encode_tbs_fields(cbor::Encoder& enc, const Certificate& c)
{
    enc.bstr(c.serial).bstr(c.issuer).array(2).uint(c.not_before).uint(c.not_after).bstr(c.subject).bstr(
        c.subject_public_key);
}

Bytes copy(ByteView v)
{
    return Bytes(v.begin(), v.end());
}

}  // namespace

Bytes certificate_tbs(const Certificate& cert)
{
    Bytes out;
    cbor::Encoder enc(out);
    enc.array(5);
    encode_tbs_fields(enc, cert);
    return out;
}

Bytes encode_certificate(const Certificate& cert)
{
    Bytes out;
    cbor::Encoder enc(out);
    enc.array(6);
    encode_tbs_fields(enc, cert);
    enc.bstr(cert.signature);
    return out;
}

Certificate decode_certificate(ByteView bytes)
{
    try {
        cbor::Reader r(bytes);
        if (r.read_array() != 6) throw Error(Errc::DecodeError, "certificate arity");
        Certificate c;
        c.serial = copy(r.read_bstr());
        c.issuer = copy(r.read_bstr());
        if (r.read_array() != 2) throw Error(Errc::DecodeError, "validity arity");
        c.not_before = r.read_uint();
        c.not_after = r.read_uint();
        c.subject = copy(r.read_bstr());
        c.subject_public_key = copy(r.read_bstr());
        c.signature = copy(r.read_bstr());
        if (!r.at_end()) throw Error(Errc::DecodeError, "trailing bytes after certificate");
        if (c.subject_public_key.size() != 32) throw Error(Errc::DecodeError, "subject key length");
        if (c.signature.size() != crypto::kSignatureLen) throw Error(Errc::DecodeError, "signature length");
        return c;
    } catch (const Error& e) {
        if (e.code() == Errc::DecodeError) throw;
        throw Error(Errc::DecodeError, e.what());
    }
}

void sign_certificate(const crypto::CryptoProvider& crypto, ByteView ca_secret, Certificate& cert)
{
    cert.signature = crypto.sign(ca_secret, certificate_tbs(cert));
}

}  // namespace tinysec::edhoc
