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

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace iqsync {

void SyncConfig::validate() const {
    if (l_max < 1) {
        throw std::invalid_argument("l_max must be at least 1");
    }
    if (l_max > MAX_SUPPORTED_LEVEL) {
        throw std::invalid_argument(
            "l_max=" + std::to_string(l_max) + " exceeds the supported maximum of " +
            std::to_string(MAX_SUPPORTED_LEVEL));
    }
    if (d_i < 1 || d_i > l_max + 1) {
        throw std::invalid_argument(
            "d_i=" + std::to_string(d_i) + " must lie in [1, l_max + 1] = [1, " + std::to_string(l_max + 1) + "]");
    }
    if (!(t_s_ps > 0) || !std::isfinite(t_s_ps)) {
        throw std::invalid_argument("symbol duration must be positive");
    }
}

DerivedCounts derived_counts(uint32_t l_max, uint32_t d_i) {
    SyncConfig config;
    config.l_max = l_max;
    config.d_i = d_i;
    return derived_counts(config);
}

DerivedCounts derived_counts(const SyncConfig &config) {
    config.validate();
    DerivedCounts c;
    c.num_levels = uint64_t{config.l_max} + 1;
    c.num_groups = (c.num_levels + config.d_i - 1) / config.d_i;
    c.symbols_per_group = uint64_t{1} << (config.l_max + 1);
    c.num_symbols = c.symbols_per_group * c.num_groups;
    return c;
}

std::vector<uint8_t> pattern_bits(const SyncConfig &config) {
    std::vector<uint8_t> bits;
    auto pattern = generate_pattern(config);
    bits.reserve(pattern.size());
    for (SymbolRecord r : pattern) {
        bits.push_back(r.symbol);
    }
    return bits;
}

MaxOffset max_offset(const SyncConfig &config) {
    config.validate();
    uint64_t symbols = uint64_t{1} << (config.l_max - 1);
    return {symbols, static_cast<double>(symbols) * config.t_s_ps};
}

double pattern_duration(const SyncConfig &config) {
    return static_cast<double>(derived_counts(config).num_symbols) * config.t_s_ps * 1e-12;
}

void write_packed_pattern(std::ostream &out, const SyncConfig &config) {
    auto pattern = generate_pattern(config);
    uint64_t n = pattern.size();
    std::array<char, 8> prefix;
    for (size_t i = 0; i < 8; i++) {
        prefix[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
    }
    out.write(prefix.data(), prefix.size());

    uint8_t byte = 0;
    for (SymbolRecord r : pattern) {
        byte |= static_cast<uint8_t>(r.symbol << (r.k_s & 7));
        if ((r.k_s & 7) == 7) {
            out.put(static_cast<char>(byte));
            byte = 0;
        }
    }
    if (n & 7) {
        out.put(static_cast<char>(byte));
    }
    if (!out) {
        throw std::runtime_error("failed to write pattern");
    }
}

std::vector<uint8_t> read_packed_pattern(std::istream &in) {
    std::array<unsigned char, 8> prefix;
    if (!in.read(reinterpret_cast<char *>(prefix.data()), prefix.size())) {
        throw std::runtime_error("truncated pattern header");
    }
    uint64_t n = 0;
    for (size_t i = 0; i < 8; i++) {
        n |= uint64_t{prefix[i]} << (8 * i);
    }
    std::vector<uint8_t> bits;
    bits.reserve(n);
    for (uint64_t k = 0; k < n; k += 8) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            throw std::runtime_error("truncated pattern body");
        }
        for (uint64_t b = 0; b < 8 && k + b < n; b++) {
            bits.push_back(static_cast<uint8_t>((c >> b) & 1));
        }
    }
    return bits;
}

}  // namespace iqsync
