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

#ifndef IQSYNC_ANALYTICS_H
#define IQSYNC_ANALYTICS_H

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iqsync {

/// Standard normal CDF.
double normal_cdf(double x);

/// Probability that a detection adds a random +-1 to a level's counter:
/// noise, or signal belonging to another level interleaved in the same group.
double p_rand_exact(double p_sig, double p_noise, uint32_t d_i);

/// Probability of any detection in one symbol.
double p_det(double p_sig, double p_noise);

struct ModelResult {
    double p_success_1 = 0;  ///< one level decided correctly
    double p_success = 0;    ///< all N_l levels decided correctly
    double p_fail = 1;       ///< 1 - p_success, computed without cancellation
    double mu_tot = 0;
    double sigma_tot = 0;
    double p_rand = 0;
    /// 9(1-p)/(np) < 1 for the signal binomial and both random binomials.
    bool normal_approx_valid = false;
};

/// Normal approximation of the counter distribution of one level and the
/// resulting success probability of the whole recovery.
/// Throws std::domain_error when there are no detections at all.
ModelResult success_probability(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise);

/// Mean inner-loop iterations of the recovery: p_det * N_s,g * N_l.
double expected_loop_iterations(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise);

/// p_noise / (2 p_sig); 0.22 p_sig maps to 11 %.
double qber_estimate(double p_sig, double p_noise);

/// Outcome of solving P_success(eta) = p_target for the attenuation.
struct AttenuationSolution {
    enum class Status { ok, no_solution };
    Status status = Status::no_solution;
    double eta_db = 0;
    double p_sig = 0;
    int iterations = 0;
    std::string note;

    bool ok() const {
        return status == Status::ok;
    }
};

/// Thrown when the success probability is not monotone over the bracket.
class NonMonotoneBracket : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// How p_noise follows p_sig while solving for the attenuation.
struct NoiseSpec {
    enum class Kind { zero, fixed, ratio };
    Kind kind = Kind::zero;
    double value = 0;  ///< absolute p_noise (fixed) or p_noise / p_sig (ratio)

    static NoiseSpec none() {
        return {Kind::zero, 0};
    }
    static NoiseSpec fixed_at(double p) {
        return {Kind::fixed, p};
    }
    static NoiseSpec ratio_of_signal(double r) {
        return {Kind::ratio, r};
    }

    double p_noise(double p_sig) const;
    std::string describe() const;
};

/// Largest attenuation (mu = 1 photon per symbol) at which the recovery
/// still succeeds with probability p_target. Bisection in eta to 1e-9 dB.
AttenuationSolution tolerable_attenuation(uint32_t l_max, uint32_t d_i, NoiseSpec noise, double p_target);

inline AttenuationSolution tolerable_attenuation(uint32_t l_max, uint32_t d_i, double p_noise, double p_target) {
    return tolerable_attenuation(l_max, d_i, NoiseSpec::fixed_at(p_noise), p_target);
}

struct ComplexityPoint {
    uint32_t l_max = 0;
    uint32_t d_i = 0;
    uint64_t delta_max = 0;
    double eta_db = 0;
    double p_sig = 0;
    double p_noise = 0;
    double n_loop = 0;
    bool solved = false;
    std::string note;
};

enum class InterleavePolicy { none, max };

/// d_i for a policy: 1 (none) or N_l (max).
uint32_t interleave_degree(InterleavePolicy policy, uint32_t l_max);

/// Expected time complexity along the p_target attenuation curve.
std::vector<ComplexityPoint> complexity_curve(
    std::span<const uint32_t> l_max_values, InterleavePolicy policy, NoiseSpec noise, double p_target);

struct PolyLogFit {
    double a = 0;
    double b = 0;
    double max_rel_dev = 0;

    double operator()(double n) const;
};

/// Least squares of log y = log a + b log(log2 n).
PolyLogFit polylog_fit(std::span<const double> n, std::span<const double> y);

struct ReferenceDurations {
    uint64_t no_interleave;   ///< N_s with d_i = 1
    uint64_t max_interleave;  ///< N_s with d_i = N_l
    uint64_t crosscorr;       ///< pattern length of a single-FFT cross-correlation search, 2 Delta_max
};

/// Pattern lengths (symbols) needed to cover a given maximum offset.
/// delta_max must be a power of two.
ReferenceDurations reference_durations(uint64_t delta_max);

/// Two-sided Clopper-Pearson interval for a binomial proportion.
struct Interval {
    double lo;
    double hi;
};
Interval clopper_pearson(uint64_t successes, uint64_t trials, double confidence = 0.95);

}  // namespace iqsync

#endif
