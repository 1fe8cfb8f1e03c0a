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

namespace tinysec::oscore {

// Sliding anti-replay window anchored at the highest accepted sequence
// number. Bit i of the mask records whether (highest - 1 - i) was seen.
class ReplayWindow {
public:
    static constexpr size_t kSize = 32;

    // True if `seq` has not been accepted before and is not too old.
    [[nodiscard]] bool check(uint64_t seq) const;
    // Marks `seq` as seen. Only call after check() passed.
    void update(uint64_t seq);
    bool check_and_update(uint64_t seq);

    bool empty() const { return !initialized_; }
    uint64_t highest() const { return highest_; }
    uint32_t mask() const { return mask_; }

private:
    uint64_t highest_ = 0;
    uint32_t mask_ = 0;
    bool initialized_ = false;
};

}  // namespace tinysec::oscore
