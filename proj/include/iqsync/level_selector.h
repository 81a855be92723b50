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

#ifndef IQSYNC_LEVEL_SELECTOR_H
#define IQSYNC_LEVEL_SELECTOR_H

#include <concepts>
#include <cstdint>

namespace iqsync {

/// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-mode pseudorandom level source.
///
/// The level chosen for symbol k_s is a pure function of (seed, k_s), so the
/// pattern can be regenerated from any position and sender-side generation
/// needs no state beyond the seed. Draws over spans that are not a power of
/// two use rejection so every level in the span is equally likely.
class LevelSelector {
   public:
    explicit LevelSelector(uint64_t seed) : seed_(seed) {
    }

    uint64_t seed() const {
        return seed_;
    }

    /// Raw 64-bit word for (symbol, attempt).
    uint64_t word(uint64_t k_s, uint64_t attempt) const {
        return mix64(mix64(seed_ + 0x9E3779B97F4A7C15ULL * (k_s + 1)) + 0xD1B54A32D192ED03ULL * attempt);
    }

    /// Uniform integer in [lo, hi] for symbol k_s.
    uint32_t level(uint64_t k_s, uint32_t lo, uint32_t hi) const {
        uint64_t span = uint64_t{hi} - lo + 1;
        if (span <= 1) {
            return lo;
        }
        // 2^64 mod span; words below it would bias the low residues.
        uint64_t threshold = (0 - span) % span;
        for (uint64_t attempt = 0;; attempt++) {
            uint64_t r = word(k_s, attempt);
            if (r >= threshold) {
                return lo + static_cast<uint32_t>(r % span);
            }
        }
    }

   private:
    uint64_t seed_;
};

/// Anything that can choose a level in [lo, hi] for a given symbol index.
template <typename T>
concept LevelSource = requires(const T &src, uint64_t k_s, uint32_t lo, uint32_t hi) {
    { src.level(k_s, lo, hi) } -> std::convertible_to<uint32_t>;
};

static_assert(LevelSource<LevelSelector>);

}  // namespace iqsync

#endif
