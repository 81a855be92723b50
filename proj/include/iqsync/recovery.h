// Copyright 2026 The iqsync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IQSYNC_RECOVERY_H
#define IQSYNC_RECOVERY_H

#include <cstdint>
#include <span>
#include <vector>

namespace iqsync {

struct RecoveryResult {
    /// Recovered offset in timebins; positive when Bob's clock runs ahead.
    int64_t delta_timebins = 0;
    /// delta_timebins / 2, truncated toward zero.
    int64_t delta_symbols = 0;
    /// Final counter C of every level 0..l_max.
    std::vector<int64_t> level_counters;
    /// Total iterations of the per-detection inner loop.
    uint64_t loop_iterations = 0;
    /// Set when the detection record was empty.
    bool no_data = false;
};

/// Dichotomic offset recovery over binary-PPM detection timebins.
///
/// Reconstructs the offset one bit per level, least significant first, using
/// only integer additions, comparisons and shifts. `detections` must be
/// sorted ascending; a DataError is thrown otherwise.
RecoveryResult recover_offset(uint32_t l_max, uint32_t d_i, std::span<const uint64_t> detections);

/// True iff `delta_timebins` lies in the range the recovery can report,
/// [-2 Delta_max, 2 Delta_max - 1] timebins, i.e. symbol offsets
/// -Delta_max <= Delta <= Delta_max - 1.
bool verify_range(int64_t delta_timebins, uint32_t l_max);

}  // namespace iqsync

#endif
