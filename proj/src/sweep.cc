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

#include "iqsync/sweep.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "iqsync/channel.h"
#include "iqsync/pattern.h"
#include "iqsync/recovery.h"

namespace iqsync {

namespace {

constexpr uint64_t PATTERN_STREAM = 0x243F6A8885A308D3ULL;
constexpr uint64_t CHANNEL_STREAM = 0x13198A2E03707344ULL;
constexpr uint64_t OFFSET_STREAM = 0xA4093822299F31D0ULL;

}  // namespace

int64_t draw_offset_timebins(uint32_t l_max, std::mt19937_64 &rng) {
    int64_t delta_max = int64_t{1} << (l_max - 1);
    std::uniform_int_distribution<int64_t> symbols(-delta_max, delta_max - 2);
    int64_t offset = 2 * symbols(rng);
    std::uniform_int_distribution<int> sub(0, 3);
    switch (sub(rng)) {
        case 0:
            offset -= 1;
            break;
        case 1:
            offset += 1;
            break;
        default:
            break;
    }
    if (offset < -2 * delta_max) {
        offset += 2;
    }
    return offset;
}

TrialRecord run_trial_at_offset(
    uint32_t l_max, uint32_t d_i, double p_sig, double p_noise, int64_t offset_timebins, uint64_t trial_seed) {
    SyncConfig config;
    config.l_max = l_max;
    config.d_i = d_i;
    config.seed = mix64(trial_seed ^ PATTERN_STREAM);

    LinkParams link;
    link.p_sig = p_sig;
    link.p_noise = p_noise;
    link.offset_timebins = offset_timebins;
    link.rng_seed = mix64(trial_seed ^ CHANNEL_STREAM);

    DetectionSet detections = simulate_detections(config, link);
    RecoveryResult recovered = recover_offset(l_max, d_i, detections.timebins);

    TrialRecord t;
    t.l_max = l_max;
    t.d_i = d_i;
    t.p_sig = p_sig;
    t.p_noise = p_noise;
    t.injected_offset_timebins = offset_timebins;
    t.recovered_offset_timebins = recovered.delta_timebins;
    t.success = recovered.delta_timebins == offset_timebins;
    t.loop_iterations = recovered.loop_iterations;
    t.detections = detections.size();
    return t;
}

TrialRecord run_trial(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise, uint64_t trial_seed) {
    std::mt19937_64 rng(mix64(trial_seed ^ OFFSET_STREAM));
    int64_t offset = draw_offset_timebins(l_max, rng);
    return run_trial_at_offset(l_max, d_i, p_sig, p_noise, offset, trial_seed);
}

void SweepSpec::validate() const {
    if (l_max_values.empty() || d_i_values.empty() || p_sig_values.empty() || noise_values.empty()) {
        throw std::invalid_argument("every sweep grid axis needs at least one value");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
}

double binomial_deviation_sigmas(double p_empirical, double p_analytic, uint64_t trials) {
    double diff = std::abs(p_empirical - p_analytic);
    double se = std::sqrt(p_analytic * (1 - p_analytic) / static_cast<double>(trials));
    if (se > 0) {
        return diff / se;
    }
    return diff == 0 ? 0 : std::numeric_limits<double>::infinity();
}

CellSummary summarize_cell(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise,
                           const std::vector<TrialRecord> &trials) {
    CellSummary c;
    c.l_max = l_max;
    c.d_i = d_i;
    c.p_sig = p_sig;
    c.p_noise = p_noise;
    c.num_symbols = derived_counts(l_max, d_i).num_symbols;
    c.trials = trials.size();
    double detections = 0;
    double loops = 0;
    for (const TrialRecord &t : trials) {
        c.failures += t.success ? 0 : 1;
        detections += static_cast<double>(t.detections);
        loops += static_cast<double>(t.loop_iterations);
    }
    if (c.trials > 0) {
        double n = static_cast<double>(c.trials);
        c.p_fail_empirical = static_cast<double>(c.failures) / n;
        c.ci = clopper_pearson(c.failures, c.trials);
        c.mean_detections = detections / n;
        c.mean_loop_iterations = loops / n;
    }
    c.expected_loop_iterations = expected_loop_iterations(l_max, d_i, p_sig, p_noise);
    try {
        c.p_fail_analytic = success_probability(l_max, d_i, p_sig, p_noise).p_fail;
    } catch (const std::domain_error &) {
        // No detections at all: the recovery reports 0, which is right only
        // for a zero offset. Leave the analytic column at 1.
        c.p_fail_analytic = 1;
        c.note = "no detection statistics";
    }
    if (c.trials > 0) {
        c.deviation_sigmas = binomial_deviation_sigmas(c.p_fail_empirical, c.p_fail_analytic, c.trials);
    }
    return c;
}

SweepResult run_sweep(const SweepSpec &spec, bool keep_trials) {
    spec.validate();
    SweepResult result;
    for (uint32_t l_max : spec.l_max_values) {
        for (uint32_t d_i_raw : spec.d_i_values) {
            uint32_t d_i = d_i_raw == 0 ? l_max + 1 : d_i_raw;
            for (double p_sig : spec.p_sig_values) {
                for (const NoiseSetting &noise : spec.noise_values) {
                    double p_noise = noise.resolve(p_sig);
                    CellSummary skipped;
                    skipped.l_max = l_max;
                    skipped.d_i = d_i;
                    skipped.p_sig = p_sig;
                    skipped.p_noise = p_noise;
                    skipped.skipped = true;

                    SyncConfig config;
                    config.l_max = l_max;
                    config.d_i = d_i;
                    try {
                        config.validate();
                        LinkParams link;
                        link.p_sig = p_sig;
                        link.p_noise = p_noise;
                        link.validate();
                    } catch (const std::invalid_argument &e) {
                        skipped.note = e.what();
                        result.cells.push_back(skipped);
                        continue;
                    }
                    uint64_t n_s = derived_counts(config).num_symbols;
                    if (n_s > spec.max_symbols) {
                        skipped.num_symbols = n_s;
                        skipped.note = "pattern of " + std::to_string(n_s) + " symbols exceeds the sweep budget";
                        result.cells.push_back(skipped);
                        continue;
                    }

                    std::vector<TrialRecord> trials;
                    trials.reserve(spec.trials);
                    for (uint64_t t = 0; t < spec.trials; t++) {
                        TrialRecord rec = run_trial(l_max, d_i, p_sig, p_noise, spec.base_seed + t);
                        rec.trial = t;
                        trials.push_back(rec);
                    }
                    result.cells.push_back(summarize_cell(l_max, d_i, p_sig, p_noise, trials));
                    if (keep_trials) {
                        result.trials.insert(result.trials.end(), trials.begin(), trials.end());
                    }
                }
            }
        }
    }
    std::stable_sort(result.cells.begin(), result.cells.end(),
                     [](const CellSummary &a, const CellSummary &b) { return a.key() < b.key(); });
    std::stable_sort(result.trials.begin(), result.trials.end(), [](const TrialRecord &a, const TrialRecord &b) {
        return std::tie(a.l_max, a.d_i, a.p_sig, a.p_noise, a.trial) <
               std::tie(b.l_max, b.d_i, b.p_sig, b.p_noise, b.trial);
    });
    return result;
}

}  // namespace iqsync
