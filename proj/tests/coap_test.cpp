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

#include "support/generators.hpp"
#include "tinysec/coap.hpp"
#include "tinysec/error.hpp"

#include <gtest/gtest.h>

using namespace tinysec;
using coap::Message;

namespace {

bool is_coap_error(Errc c)
{
    switch (c) {
    case Errc::HeaderTooShort:
    case Errc::BadVersion:
    case Errc::BadTokenLength:
    case Errc::BadOptionDelta:
    case Errc::TruncatedOption:
        return true;
    default:
        return false;
    }
}

Errc parse_error(ByteView in)
{
    try {
        coap::parse(in);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parsed " << to_hex(in);
    return Errc::AuthFailed;
}

}  // namespace

TEST(Coap, MinimalGet)
{
    const Message m = coap::parse(from_hex("40010000"));
    EXPECT_EQ(m.type, coap::Type::Confirmable);
    EXPECT_EQ(m.code, coap::code::kGet);
    EXPECT_EQ(m.message_id, 0);
    EXPECT_TRUE(m.token.empty());
    EXPECT_TRUE(m.options.empty());
    EXPECT_TRUE(m.payload.empty());
    EXPECT_EQ(coap::serialize(m), from_hex("40010000"));
}

TEST(Coap, UriPathAndPayload)
{
    Message m;
    m.code = coap::code::kGet;
    m.options.push_back({coap::option::kUriPath, to_bytes("s")});
    m.payload = {0x01};
    EXPECT_EQ(coap::serialize(m), from_hex("40010000 b173 ff01"));
    EXPECT_EQ(coap::parse(from_hex("40010000b173ff01")), m);
}

TEST(Coap, HeaderFields)
{
    const Message m = coap::parse(from_hex("6245 1234 abcd"));
    EXPECT_EQ(m.type, coap::Type::Ack);
    EXPECT_EQ(m.code, coap::code::kContent);
    EXPECT_EQ(m.message_id, 0x1234);
    EXPECT_EQ(m.token, from_hex("abcd"));
}

TEST(Coap, Errors)
{
    EXPECT_EQ(parse_error(from_hex("400100")), Errc::HeaderTooShort);
    EXPECT_EQ(parse_error(from_hex("80010000")), Errc::BadVersion);
    EXPECT_EQ(parse_error(from_hex("49010000")), Errc::BadTokenLength);
    EXPECT_EQ(parse_error(from_hex("4201000011")), Errc::HeaderTooShort);
    EXPECT_EQ(parse_error(from_hex("40010000ff")), Errc::BadOptionDelta);
    EXPECT_EQ(parse_error(from_hex("40010000f0")), Errc::BadOptionDelta);
    EXPECT_EQ(parse_error(from_hex("400100000f")), Errc::BadOptionDelta);
    EXPECT_EQ(parse_error(from_hex("40010000d0")), Errc::TruncatedOption);
    EXPECT_EQ(parse_error(from_hex("40010000e001")), Errc::TruncatedOption);
    EXPECT_EQ(parse_error(from_hex("40010000b2aa")), Errc::TruncatedOption);
}

TEST(Coap, ExtendedDeltaAndLength)
{
    Message m;
    m.options.push_back({13, {}});
    m.options.push_back({13 + 268, Bytes(13, 0xaa)});
    m.options.push_back({13 + 268 + 269, Bytes(269, 0xbb)});
    const Bytes wire = coap::serialize(m);
    // Delta 268 and length 13 both take the one-byte extension.
    EXPECT_EQ(wire[4], 0xd0);
    EXPECT_EQ(wire[5], 0x00);
    EXPECT_EQ(wire[6], 0xdd);
    EXPECT_EQ(wire[7], 0xff);
    EXPECT_EQ(wire[8], 0x00);
    EXPECT_EQ(wire[9 + 13], 0xee);
    EXPECT_EQ(coap::parse(wire), m);
}

TEST(Coap, EmptyPayloadHasNoMarker)
{
    Message m;
    m.code = coap::code::kPost;
    EXPECT_EQ(coap::serialize(m).size(), 4u);
}

TEST(Coap, OptionOrderOnSerialize)
{
    Message m;
    m.options.push_back({11, {}});
    m.options.push_back({3, {}});
    try {
        coap::serialize(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::OptionOrder);
    }
}

TEST(Coap, UnknownOptionsPreserved)
{
    Message m;
    m.options.push_back({2049, from_hex("0102")});
    m.options.push_back({65000, from_hex("03")});
    m.options.push_back({65000, {}});
    const Message back = coap::parse(coap::serialize(m));
    EXPECT_EQ(back, m);
    EXPECT_NE(back.find(2049), nullptr);
    EXPECT_EQ(back.find(2050), nullptr);
}

TEST(Coap, PropertyRoundTrip)
{
    testgen::Rng rng(0xc0a9);
    for (int i = 0; i < 10000; ++i) {
        const Message m = testgen::coap_message(rng);
        const Bytes wire = coap::serialize(m);
        const Message back = coap::parse(wire);
        ASSERT_EQ(back, m) << to_hex(wire);
        ASSERT_EQ(coap::serialize(back), wire);
    }
}

TEST(Coap, PrefixesOnlyRaiseCodecErrors)
{
    testgen::Rng rng(0x5ee1);
    for (int i = 0; i < 1000; ++i) {
        const Bytes wire = coap::serialize(testgen::coap_message(rng));
        for (size_t n = 0; n < wire.size(); ++n) {
            try {
                coap::parse(ByteView(wire).first(n));
            } catch (const Error& e) {
                ASSERT_TRUE(is_coap_error(e.code())) << errc_name(e.code());
            }
        }
    }
}

TEST(Coap, RandomBytesOnlyRaiseCodecErrors)
{
    testgen::Rng rng(0xf0f0);
    for (int i = 0; i < 20000; ++i) {
        Bytes in = testgen::bytes(rng, 1024);
        // Mostly valid headers so that the option parser gets exercised.
        if (in.size() >= 4 && i % 4 != 0) in[0] = static_cast<uint8_t>(0x40 | (in[0] & 0x37));
        try {
            const Message m = coap::parse(in);
            ASSERT_EQ(coap::parse(coap::serialize(m)), m);
        } catch (const Error& e) {
            ASSERT_TRUE(is_coap_error(e.code())) << errc_name(e.code());
        }
    }
}
