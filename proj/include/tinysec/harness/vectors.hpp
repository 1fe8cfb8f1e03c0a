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

// Crypto test-vector files (see vector_file.hpp for the format). The file
// name selects the kind: aes_ccm, hkdf_sha256, x25519, ed25519,
// oscore_context, oscore_messages.

#include "tinysec/vector_file.hpp"

#include <string>
#include <vector>

namespace tinysec::harness {

extern const std::vector<std::string> kVectorKinds;

struct VectorCheck {
    std::string file;
    size_t record = 0;
    bool ok = false;
    std::string detail;
};

// Recomputes the output fields of each record from its input fields.
std::vector<VectorCheck> verify_vector_file(const std::string& path);
// All known kinds in `dir`; a missing file is reported as a failed check.
std::vector<VectorCheck> verify_vector_dir(const std::string& dir);

// Output fields for one record of the given kind, computed from its inputs.
VectorRecord compute_vector(const std::string& kind, const VectorRecord& inputs);

// Writes one file per kind, computed from built-in published inputs.
// Returns the paths written.
std::vector<std::string> dump_vectors(const std::string& dir);

}  // namespace tinysec::harness
