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

#include <algorithm>
#include <bit>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iqsync/channel.h"
#include "iqsync/pattern.h"

namespace iqsync {

namespace {

/// Footnote criterion: the 3 sigma band of B(n, p) stays inside [0, n].
bool normal_approximation_holds(double n, double p) {
    return p > 0 && 9 * (1 - p) / (n * p) < 1;
}

/// Upper tail of the standard normal, accurate far into the tail.
double normal_upper_tail(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double p_rand_exact(double p_sig, double p_noise, uint32_t d_i) {
    if (d_i < 1) {
        throw std::invalid_argument("d_i must be at least 1");
    }
    // 1 - (1 - a)(1 - b), expanded to keep precision for tiny a, b.
    double other = p_sig * (1 - 1.0 / d_i);
    return p_noise + other - p_noise * other;
}

double p_det(double p_sig, double p_noise) {
    return p_sig + p_noise - p_sig * p_noise;
}

ModelResult success_probability(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise) {
    DerivedCounts counts = derived_counts(l_max, d_i);
    LinkParams link;
    link.p_sig = p_sig;
    link.p_noise = p_noise;
    link.validate();

    // Only the middle half of each group passes the acceptance window.
    double n = static_cast<double>(counts.symbols_per_group) / 2;
    double p_level = p_sig / d_i;

    ModelResult r;
    r.p_rand = p_rand_exact(p_sig, p_noise, d_i);
    double p_half_rand = r.p_rand / 2;
    double var_sig = n * p_level * (1 - p_level);
    double var_rand = n * p_half_rand * (1 - p_half_rand);
    r.mu_tot = n * p_level;
    r.sigma_tot = std::sqrt(var_sig + 2 * var_rand);
    r.normal_approx_valid = normal_approximation_holds(n, p_level) && normal_approximation_holds(n, p_half_rand);

    double q1;  // 1 - P_success,1
    if (r.sigma_tot > 0) {
        q1 = normal_upper_tail(r.mu_tot / r.sigma_tot);
    } else if (r.mu_tot > 0) {
        q1 = 0;
    } else {
        throw std::domain_error("no detection statistics: p_sig and p_noise are both zero");
    }
    double levels = static_cast<double>(counts.num_levels);
    r.p_success_1 = 1 - q1;
    r.p_fail = -std::expm1(levels * std::log1p(-q1));
    r.p_success = std::exp(levels * std::log1p(-q1));
    return r;
}

double expected_loop_iterations(uint32_t l_max, uint32_t d_i, double p_sig, double p_noise) {
    DerivedCounts counts = derived_counts(l_max, d_i);
    return p_det(p_sig, p_noise) * static_cast<double>(counts.symbols_per_group) *
           static_cast<double>(counts.num_levels);
}

double qber_estimate(double p_sig, double p_noise) {
    if (!(p_sig > 0)) {
        throw std::domain_error("QBER needs a non-zero signal probability");
    }
    return p_noise / (2 * p_sig);
}

double NoiseSpec::p_noise(double p_sig) const {
    switch (kind) {
        case Kind::zero:
            return 0;
        case Kind::fixed:
            return value;
        case Kind::ratio:
            return std::min(1.0, value * p_sig);
    }
    return 0;
}

std::string NoiseSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::zero:
            out << "zero";
            break;
        case Kind::fixed:
            out << "fixed:" << value;
            break;
        case Kind::ratio:
            out << "ratio:" << value;
            break;
    }
    return out.str();
}

AttenuationSolution tolerable_attenuation(uint32_t l_max, uint32_t d_i, NoiseSpec noise, double p_target) {
    if (!(p_target > 0 && p_target < 1)) {
        throw std::invalid_argument("p_target must lie in (0, 1)");
    }
    DerivedCounts counts = derived_counts(l_max, d_i);
    auto success_at = [&](double eta) {
        double p_sig = p_sig_from_attenuation(eta);
        return success_probability(l_max, d_i, p_sig, noise.p_noise(p_sig)).p_success;
    };

    AttenuationSolution out;
    double zero_signal_limit = std::pow(0.5, static_cast<double>(counts.num_levels));
    if (p_target <= zero_signal_limit) {
        out.note = "target at or below the zero-signal limit 0.5^N_l";
        return out;
    }

    // p_sig in [1e-30, 1].
    constexpr double eta_hi_bound = 300;
    constexpr int scan_points = 256;
    double previous = success_at(0);
    if (previous < p_target) {
        out.note = "target not reached even without attenuation";
        return out;
    }
    for (int i = 1; i <= scan_points; i++) {
        double eta = eta_hi_bound * i / scan_points;
        double current = success_at(eta);
        if (current > previous + 1e-12) {
            std::ostringstream msg;
            msg << "success probability increases with attenuation near " << eta << " dB (" << previous << " -> "
                << current << ") for l_max=" << l_max << ", d_i=" << d_i << ", noise=" << noise.describe();
            throw NonMonotoneBracket(msg.str());
        }
        previous = current;
    }
    if (previous >= p_target) {
        out.note = "target still met at the lower edge of the p_sig bracket";
        return out;
    }

    double lo = 0;
    double hi = eta_hi_bound;
    int iterations = 0;
    while (hi - lo > 1e-9 && iterations < 200) {
        double mid = 0.5 * (lo + hi);
        if (success_at(mid) >= p_target) {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations++;
    }
    out.status = AttenuationSolution::Status::ok;
    out.eta_db = 0.5 * (lo + hi);
    out.p_sig = p_sig_from_attenuation(out.eta_db);
    out.iterations = iterations;
    return out;
}

uint32_t interleave_degree(InterleavePolicy policy, uint32_t l_max) {
    return policy == InterleavePolicy::none ? 1 : l_max + 1;
}

std::vector<ComplexityPoint> complexity_curve(
    std::span<const uint32_t> l_max_values, InterleavePolicy policy, NoiseSpec noise, double p_target) {
    std::vector<ComplexityPoint> points;
    points.reserve(l_max_values.size());
    for (uint32_t l_max : l_max_values) {
        ComplexityPoint p;
        p.l_max = l_max;
        p.d_i = interleave_degree(policy, l_max);
        p.delta_max = max_offset(SyncConfig{l_max, p.d_i}).symbols;
        try {
            AttenuationSolution sol = tolerable_attenuation(l_max, p.d_i, noise, p_target);
            p.solved = sol.ok();
            p.note = sol.note;
            if (sol.ok()) {
                p.eta_db = sol.eta_db;
                p.p_sig = sol.p_sig;
                p.p_noise = noise.p_noise(sol.p_sig);
                p.n_loop = expected_loop_iterations(l_max, p.d_i, p.p_sig, p.p_noise);
            }
        } catch (const NonMonotoneBracket &e) {
            p.solved = false;
            p.note = e.what();
        }
        points.push_back(p);
    }
    return points;
}

double PolyLogFit::operator()(double n) const {
    return a * std::pow(std::log2(n), b);
}

PolyLogFit polylog_fit(std::span<const double> n, std::span<const double> y) {
    if (n.size() != y.size()) {
        throw std::invalid_argument("n and y differ in length");
    }
    if (n.size() < 3) {
        throw std::invalid_argument("poly-log fit needs at least 3 points");
    }
    size_t m = n.size();
    std::vector<double> xs(m);
    std::vector<double> ys(m);
    for (size_t i = 0; i < m; i++) {
        if (!(n[i] >= 2) || !(y[i] > 0)) {
            throw std::invalid_argument("poly-log fit needs n >= 2 and y > 0");
        }
        xs[i] = std::log(std::log2(n[i]));
        ys[i] = std::log(y[i]);
    }
    double mean_x = 0;
    double mean_y = 0;
    for (size_t i = 0; i < m; i++) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxx = 0;
    double sxy = 0;
    for (size_t i = 0; i < m; i++) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    if (!(sxx > 1e-12 * static_cast<double>(m))) {
        throw std::invalid_argument("poly-log fit is degenerate: all n are (nearly) equal");
    }
    PolyLogFit fit;
    fit.b = sxy / sxx;
    fit.a = std::exp(mean_y - fit.b * mean_x);
    for (size_t i = 0; i < m; i++) {
        fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(fit(n[i]) - y[i]) / y[i]);
    }
    return fit;
}

ReferenceDurations reference_durations(uint64_t delta_max) {
    if (!std::has_single_bit(delta_max)) {
        throw std::invalid_argument("delta_max must be a power of two");
    }
    uint32_t l_max = static_cast<uint32_t>(std::countr_zero(delta_max)) + 1;
    return {
        derived_counts(l_max, 1).num_symbols,
        derived_counts(l_max, l_max + 1).num_symbols,
        2 * delta_max,
    };
}

Interval clopper_pearson(uint64_t successes, uint64_t trials, double confidence) {
    if (trials == 0 || successes > trials) {
        throw std::invalid_argument("clopper_pearson needs 0 <= successes <= trials, trials > 0");
    }
    double alpha = 1 - confidence;
    double k = static_cast<double>(successes);
    double n = static_cast<double>(trials);
    Interval out{0, 1};
    if (successes > 0) {
        out.lo = boost::math::ibeta_inv(k, n - k + 1, alpha / 2);
    }
    if (successes < trials) {
        out.hi = boost::math::ibeta_inv(k + 1, n - k, 1 - alpha / 2);
    }
    return out;
}

}  // namespace iqsync
