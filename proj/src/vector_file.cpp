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

#include "tinysec/vector_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tinysec {

const Bytes* VectorRecord::find(std::string_view name) const
{
    for (const auto& [k, v] : fields) {
        if (k == name) return &v;
    }
    return nullptr;
}

const Bytes& VectorRecord::at(std::string_view name) const
{
    if (const Bytes* v = find(name)) return *v;
    throw std::out_of_range("vector field missing: " + std::string(name));
}

void VectorRecord::set(std::string name, Bytes value)
{
    for (auto& [k, v] : fields) {
        if (k == name) {
            v = std::move(value);
            return;
        }
    }
    fields.emplace_back(std::move(name), std::move(value));
}

std::vector<VectorRecord> read_vector_file(std::istream& in)
{
    std::vector<VectorRecord> records;
    VectorRecord current;
    std::string line;
    size_t lineno = 0;
    auto flush = [&] {
        if (!current.fields.empty()) records.push_back(std::move(current));
        current = {};
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            flush();
            continue;
        }
        if (line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("vector file line " + std::to_string(lineno) + ": missing '='");
        }
        std::string name = line.substr(first, eq - first);
        while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
        current.fields.emplace_back(std::move(name), from_hex(std::string_view(line).substr(eq + 1)));
    }
    flush();
    return records;
}

std::vector<VectorRecord> load_vector_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_vector_file(in);
}

void write_vector_file(std::ostream& out, const std::vector<VectorRecord>& records)
{
    bool first = true;
    for (const auto& rec : records) {
        if (!first) out << '\n';
        first = false;
        for (const auto& [k, v] : rec.fields) out << k << '=' << to_hex(v) << '\n';
    }
}

}  // namespace tinysec
