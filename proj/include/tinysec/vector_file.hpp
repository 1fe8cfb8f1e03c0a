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

// Line-oriented test-vector files: `name=hexvalue` records, one vector per
// blank-line-separated block. Lines starting with '#' are comments.

#include "tinysec/bytes.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tinysec {

struct VectorRecord {
    std::vector<std::pair<std::string, Bytes>> fields;

    const Bytes* find(std::string_view name) const;
    // Throws std::out_of_range if absent.
    const Bytes& at(std::string_view name) const;
    void set(std::string name, Bytes value);
};

std::vector<VectorRecord> read_vector_file(std::istream& in);
std::vector<VectorRecord> load_vector_file(const std::string& path);
void write_vector_file(std::ostream& out, const std::vector<VectorRecord>& records);

}  // namespace tinysec
