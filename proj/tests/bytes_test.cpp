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

#include "tinysec/bytes.hpp"
#include "tinysec/vector_file.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

using namespace tinysec;

TEST(Bytes, HexRoundTrip)
{
    EXPECT_EQ(from_hex("00 01 ab FF"), (Bytes{0x00, 0x01, 0xab, 0xff}));
    EXPECT_EQ(to_hex(Bytes{0x00, 0x01, 0xab, 0xff}), "0001abff");
    EXPECT_TRUE(from_hex("").empty());
}

TEST(Bytes, HexRejectsGarbage)
{
    EXPECT_THROW(from_hex("abc"), std::invalid_argument);
    EXPECT_THROW(from_hex("zz"), std::invalid_argument);
}

TEST(Bytes, Subsequence)
{
    const Bytes hay = from_hex("0102030405");
    EXPECT_TRUE(contains_subsequence(hay, from_hex("0304")));
    EXPECT_TRUE(contains_subsequence(hay, hay));
    EXPECT_FALSE(contains_subsequence(hay, from_hex("0305")));
    EXPECT_FALSE(contains_subsequence(from_hex("01"), from_hex("0101")));
}

TEST(Bytes, SecureZero)
{
    Bytes b = from_hex("ffffff");
    secure_zero(b);
    EXPECT_EQ(b, Bytes(3, 0));
}

TEST(VectorFile, ReadWrite)
{
    std::istringstream in("# comment\nkey=0011\nplaintext=\n\nkey=ff\n");
    auto records = read_vector_file(in);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].at("key"), from_hex("0011"));
    EXPECT_TRUE(records[0].at("plaintext").empty());
    EXPECT_EQ(records[1].find("plaintext"), nullptr);
    EXPECT_THROW(records[1].at("plaintext"), std::out_of_range);

    std::ostringstream out;
    write_vector_file(out, records);
    std::istringstream again(out.str());
    auto reread = read_vector_file(again);
    ASSERT_EQ(reread.size(), 2u);
    EXPECT_EQ(reread[0].fields, records[0].fields);
    EXPECT_EQ(reread[1].fields, records[1].fields);
}
