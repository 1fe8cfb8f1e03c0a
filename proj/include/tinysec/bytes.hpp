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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tinysec {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// Parses a hex string; whitespace is ignored. Throws std::invalid_argument.
Bytes from_hex(std::string_view hex);
std::string to_hex(ByteView bytes);

inline ByteView as_bytes(std::string_view s)
{
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s)
{
    ByteView v = as_bytes(s);
    return Bytes(v.begin(), v.end());
}

inline void append(Bytes& out, ByteView tail)
{
    out.insert(out.end(), tail.begin(), tail.end());
}

inline Bytes concat(ByteView a, ByteView b)
{
    Bytes out(a.begin(), a.end());
    append(out, b);
    return out;
}

// True if `needle` occurs contiguously inside `haystack`.
bool contains_subsequence(ByteView haystack, ByteView needle);

// Overwrites the buffer in a way the optimizer may not elide.
void secure_zero(std::span<uint8_t> buf);

}  // namespace tinysec
