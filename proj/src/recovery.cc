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

#include "iqsync/recovery.h"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

#include "iqsync/channel.h"
#include "iqsync/pattern.h"

namespace iqsync {

RecoveryResult recover_offset(uint32_t l_max, uint32_t d_i, std::span<const uint64_t> detections) {
    SyncConfig config;
    config.l_max = l_max;
    config.d_i = d_i;
    config.validate();
    if (std::adjacent_find(detections.begin(), detections.end(), std::greater<uint64_t>()) != detections.end()) {
        throw DataError("detection timebins must be sorted ascending");
    }

    const uint32_t n_levels = l_max + 1;
    const uint64_t symbols_per_group = uint64_t{1} << (l_max + 1);
    const uint64_t window_lo = uint64_t{1} << (l_max - 1);
    const uint64_t window_hi = symbols_per_group - window_lo;
    const uint64_t in_group_mask = symbols_per_group - 1;

    RecoveryResult result;
    result.level_counters.assign(n_levels, 0);
    result.no_data = detections.empty();

    // Internal offset, kept modulo 2^(l_max + 1) timebins by construction.
    uint64_t delta = 0;
    size_t first = 0;
    for (uint32_t level = 0; level <= l_max; level++) {
        int64_t counter = 0;
        uint64_t group_required = level / d_i;
        for (size_t k = first; k < detections.size(); k++) {
            result.loop_iterations++;
            uint64_t k_s = detections[k] >> 1;
            uint64_t group = k_s >> n_levels;
            if (group > group_required) {
                if ((level + 1) / d_i > group_required) {
                    first = k;
                }
                break;
            }
            // Only reachable when no detection lies beyond this group, so
            // the resume pointer was never advanced past an earlier group.
            if (group < group_required) {
                continue;
            }
            uint64_t k_s_in_group = k_s & in_group_mask;
            if (k_s_in_group < window_lo || k_s_in_group >= window_hi) {
                continue;
            }
            uint64_t shifted = detections[k] + delta;
            uint64_t expected = ((shifted >> 1 << 1) >> level) & 1;
            uint64_t observed = shifted & 1;
            counter += observed == expected ? 1 : -1;
        }
        result.level_counters[level] = counter;
        if (counter < 0) {
            delta += uint64_t{1} << level;
        }
    }

    int64_t signed_delta = static_cast<int64_t>(delta);
    if (signed_delta > (int64_t{1} << l_max)) {
        signed_delta -= int64_t{1} << (l_max + 1);
    }
    result.delta_timebins = -signed_delta;
    result.delta_symbols = result.delta_timebins / 2;
    return result;
}

bool verify_range(int64_t delta_timebins, uint32_t l_max) {
    if (l_max < 1 || l_max > MAX_SUPPORTED_LEVEL) {
        return false;
    }
    int64_t two_delta_max = int64_t{1} << l_max;
    return delta_timebins >= -two_delta_max && delta_timebins <= two_delta_max - 1;
}

}  // namespace iqsync
