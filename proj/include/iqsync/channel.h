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

#ifndef IQSYNC_CHANNEL_H
#define IQSYNC_CHANNEL_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "iqsync/pattern.h"

namespace iqsync {

/// Malformed or inconsistent input data (detection files, unsorted records).
class DataError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Per-symbol link statistics plus the clock offset Bob is subjected to.
struct LinkParams {
    double p_sig = 1.0;          ///< probability of a signal detection per symbol
    double p_noise = 0.0;        ///< probability of a noise detection per symbol
    int64_t offset_timebins = 0; ///< Bob's clock lead, in timebins (2 per symbol)
    double frac_offset = 0.0;    ///< sub-timebin offset of raw timestamps, in timebins, [0, 1)
    double jitter_sigma = 0.0;   ///< gaussian timestamp jitter, in timebins
    uint64_t rng_seed = 0;

    void validate() const;
};

/// Probability of a signal detection for a given end-to-end attenuation and
/// mean photon number per symbol.
double p_sig_from_attenuation(double eta_db, double mean_photons = 1.0);
double attenuation_from_p_sig(double p_sig, double mean_photons = 1.0);

/// Timebin indices Bob registered, strictly increasing.
struct DetectionSet {
    std::vector<uint64_t> timebins;
    /// Picosecond timestamps before timebin alignment; empty unless simulated.
    std::vector<double> raw_timestamps_ps;

    size_t size() const {
        return timebins.size();
    }
};

/// Binary PPM: bit 0 is the early timebin, bit 1 the late one.
constexpr uint64_t ppm_timebin(uint64_t k_s, uint8_t bit) {
    return 2 * k_s + bit;
}

/// Samples Bob's detection record for one run of the pattern over a lossy,
/// noisy channel. Signal clicks occur with p_sig per symbol on the pulse
/// timebin, noise clicks with p_noise/2 per timebin; both are shifted by the
/// link offset and anything landing before timebin 0 is dropped.
///
/// Cost is proportional to the number of detections, not to N_s.
DetectionSet simulate_detections(const SyncConfig &config, const LinkParams &link);

/// Expected size of the detection record before offset truncation: N_s * p_det.
double expected_detection_count(const SyncConfig &config, const LinkParams &link);

/// Converts simulated timebins into raw picosecond timestamps, applying the
/// link's fractional offset and jitter. Detections are placed at timebin centers.
std::vector<double> simulate_raw_timestamps(
    std::span<const uint64_t> timebins, double timebin_ps, const LinkParams &link);

struct Alignment {
    double shift_ps = 0;           ///< subtracted from every timestamp before binning
    bool significant_peak = true;  ///< false when the phase histogram was flat
    DetectionSet detections;
};

/// Estimates the sub-timebin phase of the detections with a histogram of
/// timestamp residues, then bins the shifted timestamps into timebin indices.
Alignment align_timebins(std::span<const double> raw_timestamps_ps, double timebin_ps, size_t n_bins = 64);

/// True iff the values are strictly increasing.
bool is_strictly_increasing(std::span<const uint64_t> timebins);

/// Detection file, text form: one decimal timebin index per line.
void write_detections_text(std::ostream &out, std::span<const uint64_t> timebins);
std::vector<uint64_t> read_detections_text(std::istream &in);

/// Detection file, binary form: little-endian u64 per detection.
void write_detections_binary(std::ostream &out, std::span<const uint64_t> timebins);
std::vector<uint64_t> read_detections_binary(std::istream &in);

}  // namespace iqsync

#endif
