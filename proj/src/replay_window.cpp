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

#include "tinysec/replay_window.hpp"

namespace tinysec::oscore {

bool ReplayWindow::check(uint64_t seq) const
{
    if (!initialized_ || seq > highest_) return true;
    if (seq == highest_) return false;
    const uint64_t age = highest_ - seq;
    if (age > kSize) return false;
    return (mask_ & (uint32_t{1} << (age - 1))) == 0;
}

void ReplayWindow::update(uint64_t seq)
{
    if (!initialized_) {
        initialized_ = true;
        highest_ = seq;
        mask_ = 0;
        return;
    }
    if (seq > highest_) {
        const uint64_t shift = seq - highest_;
        if (shift > kSize) {
            mask_ = 0;
        } else {
            // The old highest becomes bit (shift - 1).
            const uint64_t widened = (uint64_t{mask_} << shift) | (uint64_t{1} << (shift - 1));
            mask_ = static_cast<uint32_t>(widened);
        }
        highest_ = seq;
        return;
    }
    const uint64_t age = highest_ - seq;
    if (age >= 1 && age <= kSize) mask_ |= uint32_t{1} << (age - 1);
}

bool ReplayWindow::check_and_update(uint64_t seq)
{
    if (!check(seq)) return false;
    update(seq);
    return true;
}

}  // namespace tinysec::oscore
