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

// Minimal CBOR (RFC 7049 subset): unsigned/negative integers, byte and text
// strings, definite-length arrays and maps, and the simple value null.
// Output is always canonical (shortest-form heads). Input is lenient by
// default; Mode::Strict rejects non-shortest heads.

#include "tinysec/bytes.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tinysec::cbor {

inline constexpr size_t kMaxDepth = 8;

enum class Kind : uint8_t { Uint, Nint, Bstr, Tstr, Array, Map, Null };

enum class Mode { Lenient, Strict };

// Owned item tree. For Nint, `value` holds n where the item denotes -1-n.
// Map entries are flattened into `items` as key, value, key, value, ...
struct Item {
    Kind kind = Kind::Null;
    uint64_t value = 0;
    Bytes bytes;
    std::vector<Item> items;

    static Item uint(uint64_t v) { return {Kind::Uint, v, {}, {}}; }
    static Item nint(uint64_t n) { return {Kind::Nint, n, {}, {}}; }
    static Item integer(int64_t v);
    static Item bstr(ByteView b) { return {Kind::Bstr, 0, Bytes(b.begin(), b.end()), {}}; }
    static Item tstr(std::string_view s);
    static Item array(std::vector<Item> elems) { return {Kind::Array, 0, {}, std::move(elems)}; }
    static Item map(std::vector<std::pair<Item, Item>> entries);
    static Item null() { return {}; }

    bool operator==(const Item&) const = default;
};

class Encoder {
public:
    explicit Encoder(Bytes& out) : out_(out) {}

    Encoder& uint(uint64_t v);
    Encoder& nint(uint64_t n);
    Encoder& integer(int64_t v);
    Encoder& bstr(ByteView b);
    Encoder& tstr(std::string_view s);
    Encoder& array(size_t count);
    Encoder& map(size_t pairs);
    Encoder& null();
    Encoder& item(const Item& item);

    // Appends already-encoded CBOR verbatim.
    Encoder& raw(ByteView encoded);

private:
    void head(uint8_t major, uint64_t arg);
    void item_at(const Item& item, size_t depth);

    Bytes& out_;
};

Bytes encode(const Item& item);

// Length of the shortest head for an argument value.
size_t head_size(uint64_t arg);

// Cursor over an input buffer. Returned views borrow from the input; no
// reads go past its end.
class Reader {
public:
    explicit Reader(ByteView input, Mode mode = Mode::Lenient) : in_(input), mode_(mode) {}

    bool at_end() const { return pos_ == in_.size(); }
    size_t offset() const { return pos_; }
    ByteView remaining() const { return in_.subspan(pos_); }

    Kind peek_kind() const;

    uint64_t read_uint();
    int64_t read_int();
    ByteView read_bstr();
    std::string_view read_tstr();
    size_t read_array();
    size_t read_map();
    void read_null();

    // Consumes one complete item and returns its encoded bytes.
    ByteView skip_item();
    Item read_item();

private:
    struct Head {
        uint8_t major;
        uint8_t info;
        uint64_t arg;
    };
    Head peek_head(size_t& head_len) const;
    Head take_head();
    Head expect(uint8_t major);
    void skip_at(size_t depth);
    Item item_at(size_t depth);
    ByteView take(uint64_t len);

    ByteView in_;
    size_t pos_ = 0;
    Mode mode_;
};

struct Decoded {
    Item item;
    size_t consumed = 0;
};

Decoded decode(ByteView input, Mode mode = Mode::Lenient);

}  // namespace tinysec::cbor
