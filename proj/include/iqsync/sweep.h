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

#ifndef IQSYNC_SWEEP_H
#define IQSYNC_SWEEP_H

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "iqsync/analytics.h"

namespace iqsync {

/// One synchronization attempt: pattern, channel, recovery.
struct TrialRecord {
    uint32_t l_max = 0;
    uint32_t d_i = 0;
    double p_sig = 0;
    double p_noise = 0;
    uint64_t trial = 0;
    int64_t injected_offset_timebins = 0;
    int64_t recovered_offset_timebins = 0;
    bool success = false;
    uint64_t loop_iterations = 0;
    uint64_t detections = 0;
};

/// Offset drawn uniformly from the guaranteed symbol range
/// [-Delta_max, Delta_max - 2], plus a +-1 timebin sub-offset with
/// probability 1/2. The one combination that falls outside the reportable
/// range (-2 Delta_max - 1 timebins) takes the +1 sub-offset instead.
int64_t draw_offset_timebins(uint32_t l_max, std::mt19937_64 &rng);

/// Runs one trial. The pattern seed, channel seed and offset are all derived
/// from `trial_seed`.
TrialRecord run_trial(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise, uint64_t trial_seed);

/// Same, with an explicitly chosen offset.
TrialRecord run_trial_at_offset(
    uint32_t l_max, uint32_t d_i, double p_sig, double p_noise, int64_t offset_timebins, uint64_t trial_seed);

/// p_noise of a sweep cell, either absolute or proportional to p_sig.
struct NoiseSetting {
    bool proportional = false;
    double value = 0;

    double resolve(double p_sig) const {
        return proportional ? value * p_sig : value;
    }
};

struct SweepSpec {
    std::vector<uint32_t> l_max_values;
    /// 0 stands for maximal interleaving (d_i = N_l).
    std::vector<uint32_t> d_i_values;
    std::vector<double> p_sig_values;
    std::vector<NoiseSetting> noise_values;
    uint64_t trials = 1;
    uint64_t base_seed = 0;
    /// Cells whose pattern exceeds this many symbols are skipped.
    uint64_t max_symbols = uint64_t{1} << 30;

    void validate() const;
};

struct CellSummary {
    uint32_t l_max = 0;
    uint32_t d_i = 0;
    double p_sig = 0;
    double p_noise = 0;
    uint64_t num_symbols = 0;
    uint64_t trials = 0;
    uint64_t failures = 0;
    double p_fail_empirical = 0;
    Interval ci{0, 1};
    double p_fail_analytic = 0;
    /// |empirical - analytic| in binomial standard errors of the analytic rate.
    double deviation_sigmas = 0;
    double mean_detections = 0;
    double mean_loop_iterations = 0;
    double expected_loop_iterations = 0;
    bool skipped = false;
    std::string note;

    auto key() const {
        return std::tuple(l_max, d_i, p_sig, p_noise);
    }
};

struct SweepResult {
    std::vector<CellSummary> cells;
    std::vector<TrialRecord> trials;
};

/// Runs every cell of the grid. Cells come back sorted by
/// (l_max, d_i, p_sig, p_noise).
SweepResult run_sweep(const SweepSpec &spec, bool keep_trials = true);

/// Aggregates one cell's trials and attaches the analytic failure rate.
CellSummary summarize_cell(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise,
                           const std::vector<TrialRecord> &trials);

/// |empirical - analytic| / sqrt(p (1 - p) / n), p the analytic rate. A zero
/// standard error yields 0 when the rates agree exactly and infinity otherwise.
double binomial_deviation_sigmas(double p_empirical, double p_analytic, uint64_t trials);

}  // namespace iqsync

#endif
