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

#include "iqsync/pattern.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

using namespace iqsync;

namespace {

SyncConfig make_config(uint32_t l_max, uint32_t d_i, uint64_t seed = 0, double t_s_ps = 1600) {
    SyncConfig c;
    c.l_max = l_max;
    c.d_i = d_i;
    c.seed = seed;
    c.t_s_ps = t_s_ps;
    return c;
}

std::string bits_string(const SyncConfig &config) {
    std::string out;
    for (SymbolRecord r : generate_pattern(config)) {
        out += static_cast<char>('0' + r.symbol);
    }
    return out;
}

/// Replays a fixed list of level choices, one per symbol.
struct ScriptedLevels {
    std::vector<uint32_t> levels;
    uint32_t level(uint64_t k_s, uint32_t, uint32_t) const {
        return levels.at(k_s);
    }
};

/// Always picks the same level.
struct ForcedLevel {
    uint32_t forced;
    uint32_t level(uint64_t, uint32_t, uint32_t) const {
        return forced;
    }
};

}  // namespace

TEST(pattern, derived_counts) {
    ASSERT_EQ(derived_counts(2, 1), (DerivedCounts{3, 3, 8, 24}));
    ASSERT_EQ(derived_counts(3, 2), (DerivedCounts{4, 2, 16, 32}));
    ASSERT_EQ(derived_counts(1, 2), (DerivedCounts{2, 1, 4, 4}));
    // Last group narrower than d_i.
    ASSERT_EQ(derived_counts(4, 2), (DerivedCounts{5, 3, 32, 96}));
}

TEST(pattern, config_validation) {
    ASSERT_THROW(derived_counts(0, 1), std::invalid_argument);
    ASSERT_THROW(derived_counts(3, 0), std::invalid_argument);
    ASSERT_THROW(derived_counts(3, 5), std::invalid_argument);
    ASSERT_NO_THROW(derived_counts(3, 4));
    ASSERT_THROW(derived_counts(MAX_SUPPORTED_LEVEL + 1, 1), std::invalid_argument);
    SyncConfig bad = make_config(3, 1, 0, 0);
    ASSERT_THROW(bad.validate(), std::invalid_argument);
}

TEST(pattern, table_one_row) {
    ASSERT_EQ(bits_string(make_config(2, 1)), "000000000101010100110011");
    ASSERT_EQ(symbol_at(make_config(2, 1), 9), (SymbolRecord{9, 1, 1, 1}));
    ASSERT_EQ(symbol_at(make_config(2, 1), 18), (SymbolRecord{18, 2, 2, 1}));
}

TEST(pattern, smallest_pattern) {
    ASSERT_EQ(bits_string(make_config(1, 1)), "00000101");
}

TEST(pattern, table_two_with_scripted_levels) {
    SyncConfig config = make_config(3, 2);
    ScriptedLevels levels{{0, 0, 1, 0, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1,
                           3, 2, 2, 3, 2, 2, 2, 2, 3, 2, 3, 2, 2, 3, 3, 2}};
    std::string out;
    for (SymbolRecord r : generate_pattern(config, levels)) {
        out += static_cast<char>('0' + r.symbol);
    }
    ASSERT_EQ(out, "00000101000001010010001100010111");
    ASSERT_EQ(symbol_at(config, ForcedLevel{1}, 5).symbol, 1);
}

TEST(pattern, level_zero_is_all_zero) {
    SyncConfig config = make_config(5, 3);
    for (uint64_t k = 0; k < derived_counts(config).symbols_per_group; k++) {
        ASSERT_EQ(symbol_at(config, ForcedLevel{0}, k).symbol, 0);
    }
}

TEST(pattern, out_of_range_symbol) {
    SyncConfig config = make_config(2, 1);
    ASSERT_THROW(symbol_at(config, 24), std::out_of_range);
    ASSERT_NO_THROW(symbol_at(config, 23));
    // A level source that ignores its range is caught.
    ASSERT_THROW(symbol_at(config, ForcedLevel{2}, 0), std::logic_error);
}

TEST(pattern, deterministic_for_equal_seed) {
    SyncConfig config = make_config(16, 4, 0xC0FFEE);
    auto a = generate_pattern(config);
    auto b = generate_pattern(config);
    auto ia = a.begin();
    auto ib = b.begin();
    for (int i = 0; i < 200000; i++, ++ia, ++ib) {
        ASSERT_EQ(*ia, *ib);
    }
    SyncConfig other = config;
    other.seed++;
    size_t differences = 0;
    auto ic = generate_pattern(other).begin();
    ia = a.begin();
    for (int i = 0; i < 10000; i++, ++ia, ++ic) {
        differences += (*ia).level != (*ic).level;
    }
    ASSERT_GT(differences, 1000u);
}

TEST(pattern, chosen_level_lies_in_group_range) {
    std::mt19937_64 rng(7);
    for (uint32_t l_max = 1; l_max <= 9; l_max++) {
        for (uint32_t d_i = 1; d_i <= l_max + 1; d_i++) {
            SyncConfig config = make_config(l_max, d_i, rng());
            for (SymbolRecord r : generate_pattern(config)) {
                uint32_t lo = static_cast<uint32_t>(r.k_g * d_i);
                uint32_t hi = std::min(lo + d_i - 1, l_max);
                ASSERT_EQ(r.k_g, r.k_s >> (l_max + 1));
                ASSERT_GE(r.level, lo);
                ASSERT_LE(r.level, hi);
                ASSERT_EQ(r.symbol, level_symbol(r.k_s, r.level));
            }
        }
    }
}

TEST(pattern, no_interleaving_structure_exhaustive) {
    for (uint32_t l_max = 1; l_max <= 8; l_max++) {
        SyncConfig config = make_config(l_max, 1, 99);
        uint64_t per_group = derived_counts(config).symbols_per_group;
        for (SymbolRecord r : generate_pattern(config)) {
            ASSERT_EQ(r.level, r.k_g);
            uint64_t within = r.k_s % per_group;
            uint8_t expected = r.k_g == 0 ? 0 : static_cast<uint8_t>((within >> (r.k_g - 1)) & 1);
            ASSERT_EQ(r.symbol, expected) << "l_max=" << l_max << " k_s=" << r.k_s;
        }
    }
}

TEST(pattern, level_frequencies_balanced) {
    // l_max = 13: 2^14 symbols per group, d_i = 3 leaves a final group of 2 levels.
    SyncConfig config = make_config(13, 3, 12345);
    DerivedCounts counts = derived_counts(config);
    std::vector<std::vector<uint64_t>> hist(counts.num_groups, std::vector<uint64_t>(config.l_max + 1, 0));
    for (SymbolRecord r : generate_pattern(config)) {
        hist[r.k_g][r.level]++;
    }
    double n = static_cast<double>(counts.symbols_per_group);
    for (uint64_t g = 0; g < counts.num_groups; g++) {
        LevelRange range = group_levels(config, g);
        double span = range.hi - range.lo + 1;
        double p = 1 / span;
        double sigma = std::sqrt(n * p * (1 - p));
        for (uint32_t l = range.lo; l <= range.hi; l++) {
            ASSERT_NEAR(static_cast<double>(hist[g][l]), n * p, 5 * sigma) << "group " << g << " level " << l;
        }
    }
}

TEST(level_selector, unbiased_over_non_power_of_two_span) {
    LevelSelector sel(42);
    std::vector<uint64_t> counts(5, 0);
    const uint64_t n = 200000;
    for (uint64_t k = 0; k < n; k++) {
        counts[sel.level(k, 10, 14) - 10]++;
    }
    double sigma = std::sqrt(n * 0.2 * 0.8);
    for (uint64_t c : counts) {
        ASSERT_NEAR(static_cast<double>(c), n * 0.2, 5 * sigma);
    }
    ASSERT_EQ(sel.level(3, 7, 7), 7u);
}

TEST(pattern, max_offset) {
    MaxOffset m = max_offset(make_config(28, 1));
    ASSERT_EQ(m.symbols, uint64_t{1} << 27);
    ASSERT_NEAR(m.time_ps * 1e-12, 0.2147, 1e-4);
    ASSERT_EQ(max_offset(make_config(1, 1)).symbols, 1u);
    MaxOffset ten = max_offset(make_config(10, 1));
    ASSERT_EQ(ten.symbols, 512u);
    ASSERT_DOUBLE_EQ(ten.time_ps, 819.2e3);
}

TEST(pattern, pattern_duration) {
    ASSERT_NEAR(pattern_duration(make_config(28, 1)), 24.9, 0.05);
    ASSERT_NEAR(pattern_duration(make_config(28, 4)), 6.9, 0.05);
    ASSERT_DOUBLE_EQ(pattern_duration(make_config(1, 1, 0, 2)), 16e-12);
}

TEST(pattern, duration_scaling) {
    // With n = Delta_max: N_s(d_i = N_l) = 4n and N_s(d_i = 1) = 4n (log2 n + 2).
    for (uint32_t l_max = 2; l_max <= 40; l_max++) {
        double n = std::ldexp(1.0, static_cast<int>(l_max) - 1);
        double no_interleave = static_cast<double>(derived_counts(l_max, 1).num_symbols);
        double max_interleave = static_cast<double>(derived_counts(l_max, l_max + 1).num_symbols);
        ASSERT_DOUBLE_EQ(max_interleave, 4 * n);
        ASSERT_DOUBLE_EQ(no_interleave, 4 * n * (std::log2(n) + 2));
    }
}

TEST(pattern, packed_serialization_round_trip) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; rep++) {
        uint32_t l_max = 1 + static_cast<uint32_t>(rng() % 8);
        uint32_t d_i = 1 + static_cast<uint32_t>(rng() % (l_max + 1));
        SyncConfig config = make_config(l_max, d_i, rng());
        std::stringstream ss;
        write_packed_pattern(ss, config);
        ASSERT_EQ(read_packed_pattern(ss), pattern_bits(config));
    }
}

TEST(pattern, packed_layout_is_lsb_first) {
    std::stringstream ss;
    write_packed_pattern(ss, make_config(2, 1));
    std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 8u + 3u);
    ASSERT_EQ(static_cast<unsigned char>(bytes[0]), 24);
    // Symbols 8..15 = 01010101 -> bits 1,3,5,7 set.
    ASSERT_EQ(static_cast<unsigned char>(bytes[8]), 0x00);
    ASSERT_EQ(static_cast<unsigned char>(bytes[9]), 0xAA);
    ASSERT_EQ(static_cast<unsigned char>(bytes[10]), 0xCC);
}

TEST(pattern, truncated_packed_file) {
    std::stringstream ss;
    write_packed_pattern(ss, make_config(3, 1));
    std::string bytes = ss.str();
    std::stringstream cut(bytes.substr(0, bytes.size() - 1));
    ASSERT_THROW(read_packed_pattern(cut), std::runtime_error);
}
