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

#ifndef IQSYNC_PATTERN_H
#define IQSYNC_PATTERN_H

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iqsync/level_selector.h"

namespace iqsync {

/// Largest supported maximum level. Keeps 2*N_s (the timebin count) inside 64 bits.
constexpr uint32_t MAX_SUPPORTED_LEVEL = 56;

/// Protocol parameters shared by sender and receiver.
struct SyncConfig {
    uint32_t l_max = 1;  ///< maximum level; sets the recoverable offset range
    uint32_t d_i = 1;    ///< degree of interleaving (levels mixed per group)
    uint64_t seed = 0;   ///< seeds the sender's level choices
    double t_s_ps = 1600.0;  ///< symbol duration in picoseconds (two timebins)

    /// Throws std::invalid_argument when the parameters are inconsistent.
    void validate() const;
};

struct DerivedCounts {
    uint64_t num_levels;         ///< N_l = l_max + 1
    uint64_t num_groups;         ///< N_g = ceil(N_l / d_i)
    uint64_t symbols_per_group;  ///< N_s,g = 2^(l_max + 1)
    uint64_t num_symbols;        ///< N_s = N_s,g * N_g

    bool operator==(const DerivedCounts &) const = default;
};

DerivedCounts derived_counts(const SyncConfig &config);

/// Same counts without the need for a seed / symbol duration.
DerivedCounts derived_counts(uint32_t l_max, uint32_t d_i);

struct SymbolRecord {
    uint64_t k_s;    ///< symbol index
    uint64_t k_g;    ///< group index
    uint32_t level;  ///< level the symbol was taken from
    uint8_t symbol;  ///< transmitted bit

    bool operator==(const SymbolRecord &) const = default;
};

/// Bit carried by symbol k_s on `level`: bit (level-1) of k_s, and 0 on level 0.
constexpr uint8_t level_symbol(uint64_t k_s, uint32_t level) {
    return static_cast<uint8_t>(((k_s << 1) >> level) & 1);
}

/// Level range [lo, hi] interleaved in group k_g.
struct LevelRange {
    uint32_t lo;
    uint32_t hi;
};

inline LevelRange group_levels(const SyncConfig &config, uint64_t k_g) {
    uint32_t lo = static_cast<uint32_t>(k_g * config.d_i);
    uint32_t hi = std::min(lo + config.d_i - 1, config.l_max);
    return {lo, hi};
}

template <LevelSource Source>
SymbolRecord symbol_at(const SyncConfig &config, const Source &source, uint64_t k_s) {
    uint64_t n_l = config.l_max + 1;
    uint64_t k_g = k_s >> n_l;
    if (k_g >= (n_l + config.d_i - 1) / config.d_i) {
        throw std::out_of_range("symbol index beyond the end of the pattern");
    }
    LevelRange range = group_levels(config, k_g);
    uint32_t level = static_cast<uint32_t>(source.level(k_s, range.lo, range.hi));
    if (level < range.lo || level > range.hi) {
        throw std::logic_error("level source returned a level outside the group's range");
    }
    return {k_s, k_g, level, level_symbol(k_s, level)};
}

inline SymbolRecord symbol_at(const SyncConfig &config, uint64_t k_s) {
    config.validate();
    return symbol_at(config, LevelSelector(config.seed), k_s);
}

/// Lazily generated pattern. Holds only the config and the level source, so
/// iterating a pattern of 10^10 symbols needs constant memory.
template <LevelSource Source = LevelSelector>
class PatternView {
   public:
    class iterator {
       public:
        using iterator_category = std::input_iterator_tag;
        using value_type = SymbolRecord;
        using difference_type = std::ptrdiff_t;
        using pointer = const SymbolRecord *;
        using reference = SymbolRecord;

        iterator() = default;
        iterator(const PatternView *view, uint64_t k_s) : view_(view), k_s_(k_s) {
        }

        SymbolRecord operator*() const {
            return symbol_at(view_->config_, view_->source_, k_s_);
        }
        iterator &operator++() {
            k_s_++;
            return *this;
        }
        iterator operator++(int) {
            iterator copy = *this;
            k_s_++;
            return copy;
        }
        bool operator==(const iterator &other) const {
            return k_s_ == other.k_s_;
        }

       private:
        const PatternView *view_ = nullptr;
        uint64_t k_s_ = 0;
    };

    PatternView(SyncConfig config, Source source) : config_(config), source_(std::move(source)) {
        config_.validate();
        size_ = derived_counts(config_).num_symbols;
    }

    iterator begin() const {
        return iterator(this, 0);
    }
    iterator end() const {
        return iterator(this, size_);
    }
    uint64_t size() const {
        return size_;
    }

   private:
    SyncConfig config_;
    Source source_;
    uint64_t size_;
};

/// Pattern whose levels come from the seeded counter-mode selector.
inline PatternView<LevelSelector> generate_pattern(const SyncConfig &config) {
    return PatternView<LevelSelector>(config, LevelSelector(config.seed));
}

template <LevelSource Source>
PatternView<Source> generate_pattern(const SyncConfig &config, Source source) {
    return PatternView<Source>(config, std::move(source));
}

/// Materializes the transmitted bits. Only sensible for small l_max.
std::vector<uint8_t> pattern_bits(const SyncConfig &config);

struct MaxOffset {
    uint64_t symbols;  ///< Delta_max = 2^(l_max - 1)
    double time_ps;    ///< Delta_max * t_s
};

MaxOffset max_offset(const SyncConfig &config);

/// Total transmission time N_s * t_s, in seconds.
double pattern_duration(const SyncConfig &config);

/// Packed pattern file: u64 little-endian symbol count, then bits packed
/// LSB-first within each byte.
void write_packed_pattern(std::ostream &out, const SyncConfig &config);
std::vector<uint8_t> read_packed_pattern(std::istream &in);

}  // namespace iqsync

#endif
