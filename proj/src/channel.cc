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

#include "iqsync/channel.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace iqsync {

namespace {

bool is_probability(double p) {
    return p >= 0 && p <= 1;
}

/// Calls `hit(k)` for each index k in [0, n) selected by independent
/// Bernoulli(p) trials, by sampling the gaps between hits.
template <typename F>
void for_each_bernoulli_hit(uint64_t n, double p, std::mt19937_64 &rng, F &&hit) {
    if (p <= 0 || n == 0) {
        return;
    }
    if (p >= 1) {
        for (uint64_t k = 0; k < n; k++) {
            hit(k);
        }
        return;
    }
    std::geometric_distribution<uint64_t> gap(p);
    uint64_t k = gap(rng);
    while (k < n) {
        hit(k);
        uint64_t g = gap(rng);
        if (g >= n - k) {
            break;
        }
        k += g + 1;
    }
}

}  // namespace

void LinkParams::validate() const {
    if (!is_probability(p_sig)) {
        throw std::invalid_argument("p_sig must lie in [0, 1]");
    }
    if (!is_probability(p_noise)) {
        throw std::invalid_argument("p_noise must lie in [0, 1]");
    }
    if (!(frac_offset >= 0 && frac_offset < 1)) {
        throw std::invalid_argument("frac_offset must lie in [0, 1)");
    }
    if (!(jitter_sigma >= 0) || !std::isfinite(jitter_sigma)) {
        throw std::invalid_argument("jitter_sigma must be non-negative");
    }
}

double p_sig_from_attenuation(double eta_db, double mean_photons) {
    return std::min(1.0, mean_photons * std::pow(10.0, -eta_db / 10.0));
}

double attenuation_from_p_sig(double p_sig, double mean_photons) {
    return -10.0 * std::log10(p_sig / mean_photons);
}

DetectionSet simulate_detections(const SyncConfig &config, const LinkParams &link) {
    link.validate();
    DerivedCounts counts = derived_counts(config);
    LevelSelector selector(config.seed);
    std::mt19937_64 rng(link.rng_seed);

    std::vector<uint64_t> signal;
    for_each_bernoulli_hit(counts.num_symbols, link.p_sig, rng, [&](uint64_t k_s) {
        signal.push_back(ppm_timebin(k_s, symbol_at(config, selector, k_s).symbol));
    });
    std::vector<uint64_t> noise;
    for_each_bernoulli_hit(2 * counts.num_symbols, link.p_noise / 2, rng, [&](uint64_t tb) {
        noise.push_back(tb);
    });

    std::vector<uint64_t> merged;
    merged.reserve(signal.size() + noise.size());
    std::set_union(signal.begin(), signal.end(), noise.begin(), noise.end(), std::back_inserter(merged));

    DetectionSet out;
    out.timebins.reserve(merged.size());
    int64_t offset = link.offset_timebins;
    if (offset >= 0) {
        uint64_t shift = static_cast<uint64_t>(offset);
        if (!merged.empty() && merged.back() > std::numeric_limits<uint64_t>::max() - shift) {
            throw std::overflow_error("offset pushes detections past the 64-bit timebin range");
        }
        for (uint64_t tb : merged) {
            out.timebins.push_back(tb + shift);
        }
    } else {
        uint64_t cut = static_cast<uint64_t>(-(offset + 1)) + 1;
        for (uint64_t tb : merged) {
            if (tb >= cut) {
                out.timebins.push_back(tb - cut);
            }
        }
    }
    return out;
}

double expected_detection_count(const SyncConfig &config, const LinkParams &link) {
    double p_det = link.p_sig + link.p_noise - link.p_sig * link.p_noise;
    return static_cast<double>(derived_counts(config).num_symbols) * p_det;
}

std::vector<double> simulate_raw_timestamps(
    std::span<const uint64_t> timebins, double timebin_ps, const LinkParams &link) {
    link.validate();
    std::mt19937_64 rng(mix64(link.rng_seed ^ 0x6A09E667F3BCC909ULL));
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::vector<double> out;
    out.reserve(timebins.size());
    for (uint64_t tb : timebins) {
        double position = static_cast<double>(tb) + 0.5 + link.frac_offset;
        if (link.jitter_sigma > 0) {
            position += link.jitter_sigma * jitter(rng);
        }
        if (position >= 0) {
            out.push_back(position * timebin_ps);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Alignment align_timebins(std::span<const double> raw_timestamps_ps, double timebin_ps, size_t n_bins) {
    if (raw_timestamps_ps.empty()) {
        throw std::invalid_argument("no timestamps to align");
    }
    if (n_bins < 8) {
        throw std::invalid_argument("histogram needs at least 8 bins");
    }
    if (!(timebin_ps > 0)) {
        throw std::invalid_argument("timebin duration must be positive");
    }

    auto phase_of = [&](double t) {
        double phase = std::fmod(t, timebin_ps) / timebin_ps;
        return phase < 0 ? phase + 1 : phase;
    };
    auto bin_of = [&](double phase) {
        return std::min(n_bins - 1, static_cast<size_t>(phase * static_cast<double>(n_bins)));
    };

    std::vector<size_t> histogram(n_bins, 0);
    for (double t : raw_timestamps_ps) {
        if (t < 0) {
            throw std::invalid_argument("timestamps must be non-negative");
        }
        histogram[bin_of(phase_of(t))]++;
    }
    size_t peak = static_cast<size_t>(std::max_element(histogram.begin(), histogram.end()) - histogram.begin());
    double mean = static_cast<double>(raw_timestamps_ps.size()) / static_cast<double>(n_bins);

    Alignment result;
    result.significant_peak = static_cast<double>(histogram[peak]) > mean + 5 * std::sqrt(mean);
    if (result.significant_peak) {
        // Circular mean of the residues that fall near the peak.
        size_t half_width = std::max<size_t>(1, n_bins / 8);
        double c = 0;
        double s = 0;
        for (double t : raw_timestamps_ps) {
            double phase = phase_of(t);
            size_t b = bin_of(phase);
            size_t distance = (b + n_bins - peak) % n_bins;
            distance = std::min(distance, n_bins - distance);
            if (distance <= half_width) {
                c += std::cos(2 * std::numbers::pi * phase);
                s += std::sin(2 * std::numbers::pi * phase);
            }
        }
        double phase = std::atan2(s, c) / (2 * std::numbers::pi);
        // Detections are expected at timebin centers.
        double shift = phase - 0.5;
        shift -= std::floor(shift + 0.5);
        result.shift_ps = shift * timebin_ps;
    }

    auto &out = result.detections.timebins;
    out.reserve(raw_timestamps_ps.size());
    for (double t : raw_timestamps_ps) {
        double shifted = t - result.shift_ps;
        if (shifted >= 0) {
            out.push_back(static_cast<uint64_t>(std::floor(shifted / timebin_ps)));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    result.detections.raw_timestamps_ps.assign(raw_timestamps_ps.begin(), raw_timestamps_ps.end());
    return result;
}

bool is_strictly_increasing(std::span<const uint64_t> timebins) {
    return std::adjacent_find(timebins.begin(), timebins.end(), std::greater_equal<uint64_t>()) == timebins.end();
}

void write_detections_text(std::ostream &out, std::span<const uint64_t> timebins) {
    for (uint64_t tb : timebins) {
        out << tb << '\n';
    }
}

std::vector<uint64_t> read_detections_text(std::istream &in) {
    std::vector<uint64_t> out;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            continue;
        }
        size_t end = line.find_last_not_of(" \t\r") + 1;
        std::string_view token(line.data() + begin, end - begin);
        uint64_t value = 0;
        bool ok = !token.empty();
        for (char ch : token) {
            if (ch < '0' || ch > '9') {
                ok = false;
                break;
            }
            uint64_t digit = static_cast<uint64_t>(ch - '0');
            if (value > (std::numeric_limits<uint64_t>::max() - digit) / 10) {
                ok = false;
                break;
            }
            value = value * 10 + digit;
        }
        if (!ok) {
            throw DataError("line " + std::to_string(line_number) + ": expected a timebin index, got '" +
                            std::string(token) + "'");
        }
        out.push_back(value);
    }
    return out;
}

void write_detections_binary(std::ostream &out, std::span<const uint64_t> timebins) {
    std::array<char, 8> buf;
    for (uint64_t tb : timebins) {
        for (size_t i = 0; i < 8; i++) {
            buf[i] = static_cast<char>((tb >> (8 * i)) & 0xFF);
        }
        out.write(buf.data(), buf.size());
    }
}

std::vector<uint64_t> read_detections_binary(std::istream &in) {
    std::vector<uint64_t> out;
    std::array<unsigned char, 8> buf;
    while (true) {
        in.read(reinterpret_cast<char *>(buf.data()), buf.size());
        std::streamsize got = in.gcount();
        if (got == 0) {
            break;
        }
        if (got != 8) {
            throw DataError("binary detection file length is not a multiple of 8 bytes");
        }
        uint64_t value = 0;
        for (size_t i = 0; i < 8; i++) {
            value |= uint64_t{buf[i]} << (8 * i);
        }
        out.push_back(value);
    }
    return out;
}

}  // namespace iqsync
