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

#include "tinysec/cbor.hpp"
#include "tinysec/error.hpp"

namespace tinysec::cbor {

namespace {

constexpr uint8_t kUint = 0;
constexpr uint8_t kNint = 1;
constexpr uint8_t kBstr = 2;
constexpr uint8_t kTstr = 3;
constexpr uint8_t kArray = 4;
constexpr uint8_t kMap = 5;
constexpr uint8_t kTag = 6;
constexpr uint8_t kSimple = 7;
constexpr uint8_t kNullInfo = 22;

}  // namespace

Item Item::integer(int64_t v)
{
    if (v >= 0) return uint(static_cast<uint64_t>(v));
    return nint(static_cast<uint64_t>(-(v + 1)));
}

Item Item::tstr(std::string_view s)
{
    ByteView b = as_bytes(s);
    return {Kind::Tstr, 0, Bytes(b.begin(), b.end()), {}};
}

Item Item::map(std::vector<std::pair<Item, Item>> entries)
{
    Item m{Kind::Map, 0, {}, {}};
    m.items.reserve(entries.size() * 2);
    for (auto& [k, v] : entries) {
        m.items.push_back(std::move(k));
        m.items.push_back(std::move(v));
    }
    return m;
}

size_t head_size(uint64_t arg)
{
    if (arg < 24) return 1;
    if (arg <= 0xff) return 2;
    if (arg <= 0xffff) return 3;
    if (arg <= 0xffffffff) return 5;
    return 9;
}

void Encoder::head(uint8_t major, uint64_t arg)
{
    const uint8_t m = static_cast<uint8_t>(major << 5);
    size_t n = head_size(arg);
    switch (n) {
    case 1: out_.push_back(m | static_cast<uint8_t>(arg)); return;
    case 2: out_.push_back(m | 24); break;
    case 3: out_.push_back(m | 25); break;
    case 5: out_.push_back(m | 26); break;
    default: out_.push_back(m | 27); break;
    }
    for (size_t i = n - 1; i-- > 0;) out_.push_back(static_cast<uint8_t>(arg >> (8 * i)));
}

Encoder& Encoder::uint(uint64_t v)
{
    head(kUint, v);
    return *this;
}

Encoder& Encoder::nint(uint64_t n)
{
    head(kNint, n);
    return *this;
}

Encoder& Encoder::integer(int64_t v)
{
    if (v >= 0) return uint(static_cast<uint64_t>(v));
    return nint(static_cast<uint64_t>(-(v + 1)));
}

Encoder& Encoder::bstr(ByteView b)
{
    head(kBstr, b.size());
    append(out_, b);
    return *this;
}

Encoder& Encoder::tstr(std::string_view s)
{
    head(kTstr, s.size());
    append(out_, as_bytes(s));
    return *this;
}

Encoder& Encoder::array(size_t count)
{
    head(kArray, count);
    return *this;
}

Encoder& Encoder::map(size_t pairs)
{
    head(kMap, pairs);
    return *this;
}

Encoder& Encoder::null()
{
    out_.push_back(static_cast<uint8_t>((kSimple << 5) | kNullInfo));
    return *this;
}

Encoder& Encoder::raw(ByteView encoded)
{
    append(out_, encoded);
    return *this;
}

Encoder& Encoder::item(const Item& item)
{
    item_at(item, 0);
    return *this;
}

void Encoder::item_at(const Item& item, size_t depth)
{
    switch (item.kind) {
    case Kind::Uint: uint(item.value); return;
    case Kind::Nint: nint(item.value); return;
    case Kind::Bstr: bstr(item.bytes); return;
    case Kind::Tstr:
        head(kTstr, item.bytes.size());
        append(out_, item.bytes);
        return;
    case Kind::Null: null(); return;
    case Kind::Array:
    case Kind::Map:
        if (depth + 1 > kMaxDepth) throw Error(Errc::NestingTooDeep);
        if (item.kind == Kind::Map) {
            if (item.items.size() % 2 != 0) throw Error(Errc::TypeMismatch, "odd map entry count");
            map(item.items.size() / 2);
        } else {
            array(item.items.size());
        }
        for (const auto& child : item.items) item_at(child, depth + 1);
        return;
    }
}

Bytes encode(const Item& item)
{
    Bytes out;
    Encoder(out).item(item);
    return out;
}

Reader::Head Reader::peek_head(size_t& head_len) const
{
    if (pos_ >= in_.size()) throw Error(Errc::Truncated);
    const uint8_t first = in_[pos_];
    Head h{static_cast<uint8_t>(first >> 5), static_cast<uint8_t>(first & 0x1f), 0};
    if (h.major == kTag) throw Error(Errc::UnsupportedMajorType, "tag");
    if (h.major == kSimple) {
        if (h.info != kNullInfo) throw Error(Errc::UnsupportedMajorType, "float/simple");
        head_len = 1;
        return h;
    }
    if (h.info < 24) {
        h.arg = h.info;
        head_len = 1;
        return h;
    }
    if (h.info > 27) throw Error(Errc::UnsupportedMajorType, "indefinite/reserved length");
    const size_t extra = size_t{1} << (h.info - 24);
    if (in_.size() - pos_ - 1 < extra) throw Error(Errc::Truncated);
    for (size_t i = 0; i < extra; ++i) h.arg = (h.arg << 8) | in_[pos_ + 1 + i];
    if (mode_ == Mode::Strict && head_size(h.arg) != extra + 1) throw Error(Errc::NonCanonical);
    head_len = extra + 1;
    return h;
}

Reader::Head Reader::take_head()
{
    size_t len = 0;
    Head h = peek_head(len);
    pos_ += len;
    return h;
}

Reader::Head Reader::expect(uint8_t major)
{
    size_t len = 0;
    Head h = peek_head(len);
    if (h.major != major) throw Error(Errc::TypeMismatch);
    pos_ += len;
    return h;
}

ByteView Reader::take(uint64_t len)
{
    if (len > in_.size() - pos_) throw Error(Errc::Truncated);
    ByteView out = in_.subspan(pos_, static_cast<size_t>(len));
    pos_ += static_cast<size_t>(len);
    return out;
}

Kind Reader::peek_kind() const
{
    size_t len = 0;
    switch (peek_head(len).major) {
    case kUint: return Kind::Uint;
    case kNint: return Kind::Nint;
    case kBstr: return Kind::Bstr;
    case kTstr: return Kind::Tstr;
    case kArray: return Kind::Array;
    case kMap: return Kind::Map;
    default: return Kind::Null;
    }
}

uint64_t Reader::read_uint()
{
    return expect(kUint).arg;
}

int64_t Reader::read_int()
{
    size_t len = 0;
    Head h = peek_head(len);
    if (h.major != kUint && h.major != kNint) throw Error(Errc::TypeMismatch);
    if (h.arg > static_cast<uint64_t>(INT64_MAX)) throw Error(Errc::IntegerOverflow);
    pos_ += len;
    const auto v = static_cast<int64_t>(h.arg);
    return h.major == kUint ? v : -1 - v;
}

ByteView Reader::read_bstr()
{
    return take(expect(kBstr).arg);
}

std::string_view Reader::read_tstr()
{
    ByteView b = take(expect(kTstr).arg);
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

size_t Reader::read_array()
{
    Head h = expect(kArray);
    // Every element needs at least one byte; reject absurd counts early.
    if (h.arg > in_.size() - pos_) throw Error(Errc::Truncated);
    return static_cast<size_t>(h.arg);
}

size_t Reader::read_map()
{
    Head h = expect(kMap);
    if (h.arg > (in_.size() - pos_) / 2) throw Error(Errc::Truncated);
    return static_cast<size_t>(h.arg);
}

void Reader::read_null()
{
    Head h = expect(kSimple);
    (void)h;
}

void Reader::skip_at(size_t depth)
{
    Head h = take_head();
    switch (h.major) {
    case kUint:
    case kNint:
    case kSimple: return;
    case kBstr:
    case kTstr: take(h.arg); return;
    default: break;
    }
    if (depth + 1 > kMaxDepth) throw Error(Errc::NestingTooDeep);
    const uint64_t children = h.major == kMap ? h.arg * 2 : h.arg;
    if (h.arg > in_.size() - pos_) throw Error(Errc::Truncated);
    for (uint64_t i = 0; i < children; ++i) skip_at(depth + 1);
}

ByteView Reader::skip_item()
{
    const size_t start = pos_;
    skip_at(0);
    return in_.subspan(start, pos_ - start);
}

Item Reader::item_at(size_t depth)
{
    Head h = take_head();
    switch (h.major) {
    case kUint: return Item::uint(h.arg);
    case kNint: return Item::nint(h.arg);
    case kBstr: return Item::bstr(take(h.arg));
    case kTstr: {
        ByteView b = take(h.arg);
        return {Kind::Tstr, 0, Bytes(b.begin(), b.end()), {}};
    }
    case kSimple: return Item::null();
    default: break;
    }
    if (depth + 1 > kMaxDepth) throw Error(Errc::NestingTooDeep);
    const bool is_map = h.major == kMap;
    const uint64_t children = is_map ? h.arg * 2 : h.arg;
    if (children > in_.size() - pos_) throw Error(Errc::Truncated);
    Item out{is_map ? Kind::Map : Kind::Array, 0, {}, {}};
    out.items.reserve(static_cast<size_t>(children));
    for (uint64_t i = 0; i < children; ++i) out.items.push_back(item_at(depth + 1));
    return out;
}

Item Reader::read_item()
{
    return item_at(0);
}

Decoded decode(ByteView input, Mode mode)
{
    Reader r(input, mode);
    Item item = r.read_item();
    return {std::move(item), r.offset()};
}

}  // namespace tinysec::cbor
