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

#include "iqsync/analytics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "iqsync/channel.h"
#include "iqsync/pattern.h"

using namespace iqsync;

namespace {

/// P(X >= k) for X ~ Bin(n, p), summed term by term.
double binomial_upper_tail(uint64_t k, uint64_t n, double p) {
    double total = 0;
    for (uint64_t i = k; i <= n; i++) {
        total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                          i * std::log(p) + (n - i) * std::log1p(-p));
    }
    return total;
}

}  // namespace

TEST(analytics, p_rand_example) {
    ASSERT_NEAR(p_rand_exact(1e-3, 1e-7, 4), 7.501e-4, 1e-9);
    ASSERT_DOUBLE_EQ(p_rand_exact(0.2, 0, 1), 0);
    ASSERT_DOUBLE_EQ(p_rand_exact(0, 0.3, 5), 0.3);
}

TEST(analytics, normal_cdf) {
    ASSERT_DOUBLE_EQ(normal_cdf(0), 0.5);
    ASSERT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
    ASSERT_NEAR(normal_cdf(-8), 6.22096057427178e-16, 1e-25);
}

TEST(analytics, model_moments) {
    ModelResult r = success_probability(12, 4, 0.01, 1e-4);
    double n = 4096;
    double p = 0.01 / 4;
    double pr = 1 - (1 - 1e-4) * (1 - 0.01 * 3 / 4);
    ASSERT_NEAR(r.mu_tot, n * p, 1e-12);
    ASSERT_NEAR(r.p_rand, pr, 1e-15);
    ASSERT_NEAR(r.sigma_tot, std::sqrt(n * p * (1 - p) + 2 * n * (pr / 2) * (1 - pr / 2)), 1e-12);
    double p1 = normal_cdf(r.mu_tot / r.sigma_tot);
    ASSERT_NEAR(r.p_success_1, p1, 1e-12);
    ASSERT_NEAR(r.p_success, std::pow(p1, 13), 1e-12);
    ASSERT_NEAR(r.p_fail, 1 - std::pow(p1, 13), 1e-12);
}

TEST(analytics, noiseless_perfect_link_always_succeeds) {
    ModelResult r = success_probability(10, 1, 1, 0);
    ASSERT_EQ(r.sigma_tot, 0);
    ASSERT_EQ(r.p_success, 1);
    ASSERT_EQ(r.p_fail, 0);
    ASSERT_THROW(success_probability(10, 1, 0, 0), std::domain_error);
}

TEST(analytics, pure_noise_is_a_coin_flip_per_level) {
    ModelResult r = success_probability(6, 1, 0, 0.01);
    ASSERT_NEAR(r.p_success_1, 0.5, 1e-15);
    ASSERT_NEAR(r.p_success, std::pow(0.5, 7), 1e-15);
}

TEST(analytics, monotonicity) {
    double prev = 0;
    for (double eta = 60; eta >= 20; eta -= 0.5) {
        double p = success_probability(16, 1, p_sig_from_attenuation(eta), 1e-6).p_success;
        ASSERT_GE(p, prev);
        prev = p;
    }
    double prev_noise = 1;
    for (double pn = 1e-8; pn < 1e-2; pn *= 2) {
        double p = success_probability(16, 1, 1e-3, pn).p_success;
        ASSERT_LE(p, prev_noise);
        prev_noise = p;
    }
    double prev_di = 1;
    for (uint32_t d_i = 1; d_i <= 17; d_i++) {
        double p = success_probability(16, d_i, 3e-4, 1e-6).p_success_1;
        ASSERT_LE(p, prev_di);
        prev_di = p;
    }
}

TEST(analytics, normal_approximation_flag) {
    // 9 (1 - p) / (n p) < 1 with n = 2^l_max.
    ASSERT_FALSE(success_probability(3, 1, 1e-3, 0).normal_approx_valid);
    ASSERT_TRUE(success_probability(20, 1, 1e-3, 1e-4).normal_approx_valid);
    ASSERT_FALSE(success_probability(20, 1, 1e-3, 0).normal_approx_valid);
}

TEST(analytics, expected_loop_iterations) {
    ASSERT_NEAR(expected_loop_iterations(3, 1, 1e-3, 0), 0.064, 1e-15);
    ASSERT_NEAR(expected_loop_iterations(10, 11, 0.1, 0.1), 0.19 * 2048 * 11, 1e-9);
}

TEST(analytics, qber) {
    ASSERT_NEAR(qber_estimate(1e-3, 1e-4), 0.05, 1e-15);
    ASSERT_NEAR(qber_estimate(0.5, 0.22 * 0.5), 0.11, 1e-15);
    ASSERT_THROW(qber_estimate(0, 1e-4), std::domain_error);
}

TEST(analytics, solver_hits_target) {
    for (uint32_t l_max : {8u, 16u, 28u, 40u}) {
        for (uint32_t d_i : {1u, 2u, l_max + 1}) {
            for (double p_noise : {0.0, 1e-7}) {
                AttenuationSolution s = tolerable_attenuation(l_max, d_i, p_noise, 0.99);
                if (success_probability(l_max, d_i, 1.0, p_noise).p_success < 0.99) {
                    ASSERT_FALSE(s.ok());
                    continue;
                }
                ASSERT_TRUE(s.ok()) << l_max << " " << d_i << " " << s.note;
                double p = success_probability(l_max, d_i, s.p_sig, p_noise).p_success;
                ASSERT_NEAR(p, 0.99, 1e-6) << l_max << " " << d_i;
            }
        }
    }
}

TEST(analytics, solver_agrees_with_grid_scan) {
    for (double target : {0.5, 0.99}) {
        AttenuationSolution s = tolerable_attenuation(12, 1, 0.0, target);
        ASSERT_TRUE(s.ok());
        double best = -1;
        for (int i = 0; i <= 100000; i++) {
            double eta = i * 0.001;
            if (success_probability(12, 1, p_sig_from_attenuation(eta), 0).p_success >= target) {
                best = eta;
            }
        }
        ASSERT_NEAR(s.eta_db, best, 0.01);
    }
}

TEST(analytics, solver_reports_unreachable_targets) {
    // Pure noise already succeeds with 0.5^N_l.
    AttenuationSolution s = tolerable_attenuation(3, 1, 1e-3, 0.5 * 0.5 * 0.5 * 0.5);
    ASSERT_FALSE(s.ok());
    ASSERT_FALSE(s.note.empty());
    // Noise so strong that even a lossless link misses the target.
    s = tolerable_attenuation(2, 1, NoiseSpec::fixed_at(0.9), 0.999999);
    ASSERT_FALSE(s.ok());
}

TEST(analytics, noise_spec) {
    ASSERT_EQ(NoiseSpec::none().p_noise(0.3), 0);
    ASSERT_EQ(NoiseSpec::fixed_at(1e-7).p_noise(0.3), 1e-7);
    ASSERT_NEAR(NoiseSpec::ratio_of_signal(0.22).p_noise(0.5), 0.11, 1e-15);
}

TEST(analytics, complexity_curve_points) {
    std::vector<uint32_t> levels{10, 14, 18};
    auto curve = complexity_curve(levels, InterleavePolicy::max, NoiseSpec::fixed_at(1e-7), 0.5);
    ASSERT_EQ(curve.size(), 3u);
    for (const ComplexityPoint &p : curve) {
        ASSERT_TRUE(p.solved);
        ASSERT_EQ(p.d_i, p.l_max + 1);
        ASSERT_EQ(p.delta_max, uint64_t{1} << (p.l_max - 1));
        ASSERT_NEAR(p.n_loop, expected_loop_iterations(p.l_max, p.d_i, p.p_sig, p.p_noise), 1e-9 * p.n_loop);
    }
    ASSERT_EQ(interleave_degree(InterleavePolicy::none, 9), 1u);
    ASSERT_EQ(interleave_degree(InterleavePolicy::max, 9), 10u);
}

TEST(analytics, polylog_fit_exact) {
    std::vector<double> n;
    std::vector<double> y;
    for (int e = 2; e <= 30; e += 2) {
        double v = std::ldexp(1.0, e);
        n.push_back(v);
        y.push_back(3 * std::pow(std::log2(v), 1.5));
    }
    PolyLogFit fit = polylog_fit(n, y);
    ASSERT_NEAR(fit.a, 3, 1e-9);
    ASSERT_NEAR(fit.b, 1.5, 1e-9);
    ASSERT_LT(fit.max_rel_dev, 1e-9);
    ASSERT_NEAR(fit(1024), 3 * std::pow(10, 1.5), 1e-6);
}

TEST(analytics, polylog_fit_rejects_bad_input) {
    std::vector<double> n{4, 8};
    std::vector<double> y{1, 2};
    ASSERT_THROW(polylog_fit(n, y), std::invalid_argument);
    std::vector<double> n3{4, 8, 16};
    std::vector<double> y3{1, -2, 3};
    ASSERT_THROW(polylog_fit(n3, y3), std::invalid_argument);
}

TEST(analytics, reference_durations) {
    ReferenceDurations r = reference_durations(uint64_t{1} << 27);
    ASSERT_EQ(r.no_interleave, derived_counts(28, 1).num_symbols);
    ASSERT_EQ(r.max_interleave, derived_counts(28, 29).num_symbols);
    ASSERT_EQ(r.crosscorr, uint64_t{1} << 28);
    ASSERT_EQ(r.no_interleave / r.max_interleave, 29u);
    ASSERT_THROW(reference_durations(12), std::invalid_argument);
}

TEST(analytics, clopper_pearson) {
    Interval none = clopper_pearson(0, 50);
    ASSERT_EQ(none.lo, 0);
    ASSERT_NEAR(none.hi, 0.071, 5e-4);
    Interval all = clopper_pearson(50, 50);
    ASSERT_NEAR(all.lo, 1 - none.hi, 1e-12);
    ASSERT_EQ(all.hi, 1);
    for (uint64_t k : {1u, 7u, 25u, 49u}) {
        Interval ci = clopper_pearson(k, 50);
        ASSERT_NEAR(binomial_upper_tail(k, 50, ci.lo), 0.025, 1e-9);
        ASSERT_NEAR(1 - binomial_upper_tail(k + 1, 50, ci.hi), 0.025, 1e-9);
    }
    ASSERT_THROW(clopper_pearson(5, 4), std::invalid_argument);
}
