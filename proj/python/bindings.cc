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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iqsync/analytics.h"
#include "iqsync/channel.h"
#include "iqsync/pattern.h"
#include "iqsync/recovery.h"
#include "iqsync/sweep.h"

namespace py = pybind11;
using namespace iqsync;

namespace {

SyncConfig make_config(uint32_t l_max, uint32_t d_i, uint64_t seed, double t_s_ps) {
    SyncConfig c;
    c.l_max = l_max;
    c.d_i = d_i;
    c.seed = seed;
    c.t_s_ps = t_s_ps;
    c.validate();
    return c;
}

template <typename T>
py::array_t<T> to_array(std::vector<T> &&values) {
    auto *owned = new std::vector<T>(std::move(values));
    py::capsule free_when_done(owned, [](void *p) { delete static_cast<std::vector<T> *>(p); });
    return py::array_t<T>(owned->size(), owned->data(), free_when_done);
}

/// Levels and symbols of the whole pattern as two uint8 arrays.
py::tuple pattern_arrays(const SyncConfig &config) {
    DerivedCounts counts = derived_counts(config);
    std::vector<uint8_t> levels;
    std::vector<uint8_t> symbols;
    levels.reserve(counts.num_symbols);
    symbols.reserve(counts.num_symbols);
    for (SymbolRecord r : generate_pattern(config)) {
        levels.push_back(static_cast<uint8_t>(r.level));
        symbols.push_back(r.symbol);
    }
    return py::make_tuple(to_array(std::move(levels)), to_array(std::move(symbols)));
}

}  // namespace

PYBIND11_MODULE(_iqsync, m) {
    m.doc() = "Pattern generation, channel simulation, offset recovery and the analytic success model.";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NonMonotoneBracket>(m, "NonMonotoneBracket", PyExc_RuntimeError);

    py::class_<SyncConfig>(m, "SyncConfig")
        .def(py::init(&make_config), py::arg("l_max") = 1, py::arg("d_i") = 1, py::arg("seed") = 0,
             py::arg("t_s_ps") = 1600.0)
        .def_readwrite("l_max", &SyncConfig::l_max)
        .def_readwrite("d_i", &SyncConfig::d_i)
        .def_readwrite("seed", &SyncConfig::seed)
        .def_readwrite("t_s_ps", &SyncConfig::t_s_ps)
        .def("__repr__", [](const SyncConfig &c) {
            return "SyncConfig(l_max=" + std::to_string(c.l_max) + ", d_i=" + std::to_string(c.d_i) +
                   ", seed=" + std::to_string(c.seed) + ")";
        });

    py::class_<DerivedCounts>(m, "DerivedCounts")
        .def_readonly("num_levels", &DerivedCounts::num_levels)
        .def_readonly("num_groups", &DerivedCounts::num_groups)
        .def_readonly("symbols_per_group", &DerivedCounts::symbols_per_group)
        .def_readonly("num_symbols", &DerivedCounts::num_symbols);

    m.def("derived_counts", py::overload_cast<uint32_t, uint32_t>(&derived_counts), py::arg("l_max"),
          py::arg("d_i"));
    m.def("pattern", &pattern_arrays, py::arg("config"),
          "Returns (levels, symbols) of every pattern symbol as uint8 arrays.");
    m.def(
        "max_offset",
        [](const SyncConfig &c) {
            MaxOffset o = max_offset(c);
            return py::make_tuple(o.symbols, o.time_ps);
        },
        py::arg("config"), "Returns (symbols, picoseconds).");
    m.def("pattern_duration", &pattern_duration, py::arg("config"), "Pattern duration in seconds.");

    py::class_<LinkParams>(m, "LinkParams")
        .def(py::init([](double p_sig, double p_noise, int64_t offset_timebins, double frac_offset,
                         double jitter_sigma, uint64_t rng_seed) {
                 LinkParams l;
                 l.p_sig = p_sig;
                 l.p_noise = p_noise;
                 l.offset_timebins = offset_timebins;
                 l.frac_offset = frac_offset;
                 l.jitter_sigma = jitter_sigma;
                 l.rng_seed = rng_seed;
                 l.validate();
                 return l;
             }),
             py::arg("p_sig") = 1.0, py::arg("p_noise") = 0.0, py::arg("offset_timebins") = 0,
             py::arg("frac_offset") = 0.0, py::arg("jitter_sigma") = 0.0, py::arg("rng_seed") = 0)
        .def_readwrite("p_sig", &LinkParams::p_sig)
        .def_readwrite("p_noise", &LinkParams::p_noise)
        .def_readwrite("offset_timebins", &LinkParams::offset_timebins)
        .def_readwrite("frac_offset", &LinkParams::frac_offset)
        .def_readwrite("jitter_sigma", &LinkParams::jitter_sigma)
        .def_readwrite("rng_seed", &LinkParams::rng_seed);

    m.def("p_sig_from_attenuation", &p_sig_from_attenuation, py::arg("eta_db"), py::arg("mean_photons") = 1.0);
    m.def("attenuation_from_p_sig", &attenuation_from_p_sig, py::arg("p_sig"), py::arg("mean_photons") = 1.0);
    m.def(
        "simulate_detections",
        [](const SyncConfig &config, const LinkParams &link) {
            return to_array(std::move(simulate_detections(config, link).timebins));
        },
        py::arg("config"), py::arg("link"), "Sorted uint64 timebin indices of Bob's detections.");

    py::class_<RecoveryResult>(m, "RecoveryResult")
        .def_readonly("delta_timebins", &RecoveryResult::delta_timebins)
        .def_readonly("delta_symbols", &RecoveryResult::delta_symbols)
        .def_readonly("level_counters", &RecoveryResult::level_counters)
        .def_readonly("loop_iterations", &RecoveryResult::loop_iterations)
        .def_readonly("no_data", &RecoveryResult::no_data);

    m.def(
        "recover_offset",
        [](uint32_t l_max, uint32_t d_i, py::array_t<uint64_t, py::array::c_style | py::array::forcecast> det) {
            std::span<const uint64_t> view(det.data(), static_cast<size_t>(det.size()));
            py::gil_scoped_release release;
            return recover_offset(l_max, d_i, view);
        },
        py::arg("l_max"), py::arg("d_i"), py::arg("detections"));
    m.def("verify_range", &verify_range, py::arg("delta_timebins"), py::arg("l_max"));

    py::class_<ModelResult>(m, "ModelResult")
        .def_readonly("p_success_1", &ModelResult::p_success_1)
        .def_readonly("p_success", &ModelResult::p_success)
        .def_readonly("p_fail", &ModelResult::p_fail)
        .def_readonly("mu_tot", &ModelResult::mu_tot)
        .def_readonly("sigma_tot", &ModelResult::sigma_tot)
        .def_readonly("p_rand", &ModelResult::p_rand)
        .def_readonly("normal_approx_valid", &ModelResult::normal_approx_valid);

    m.def("success_probability", &success_probability, py::arg("l_max"), py::arg("d_i"), py::arg("p_sig"),
          py::arg("p_noise"));
    m.def("expected_loop_iterations", &expected_loop_iterations, py::arg("l_max"), py::arg("d_i"), py::arg("p_sig"),
          py::arg("p_noise"));
    m.def("qber_estimate", &qber_estimate, py::arg("p_sig"), py::arg("p_noise"));

    py::class_<AttenuationSolution>(m, "AttenuationSolution")
        .def_property_readonly("ok", &AttenuationSolution::ok)
        .def_readonly("eta_db", &AttenuationSolution::eta_db)
        .def_readonly("p_sig", &AttenuationSolution::p_sig)
        .def_readonly("iterations", &AttenuationSolution::iterations)
        .def_readonly("note", &AttenuationSolution::note);

    m.def(
        "tolerable_attenuation",
        [](uint32_t l_max, uint32_t d_i, double p_target, double p_noise, double p_noise_ratio) {
            NoiseSpec noise = p_noise_ratio > 0 ? NoiseSpec::ratio_of_signal(p_noise_ratio)
                              : p_noise > 0     ? NoiseSpec::fixed_at(p_noise)
                                                : NoiseSpec::none();
            return tolerable_attenuation(l_max, d_i, noise, p_target);
        },
        py::arg("l_max"), py::arg("d_i"), py::arg("p_target"), py::arg("p_noise") = 0.0,
        py::arg("p_noise_ratio") = 0.0,
        "Attenuation (dB) at which the success probability drops to p_target. Noise is either fixed or a "
        "multiple of p_sig.");

    py::class_<PolyLogFit>(m, "PolyLogFit")
        .def_readonly("a", &PolyLogFit::a)
        .def_readonly("b", &PolyLogFit::b)
        .def_readonly("max_rel_dev", &PolyLogFit::max_rel_dev)
        .def("__call__", &PolyLogFit::operator(), py::arg("n"));
    m.def(
        "polylog_fit",
        [](const std::vector<double> &n, const std::vector<double> &y) { return polylog_fit(n, y); },
        py::arg("n"), py::arg("y"));

    py::class_<Interval>(m, "Interval").def_readonly("lo", &Interval::lo).def_readonly("hi", &Interval::hi);
    m.def("clopper_pearson", &clopper_pearson, py::arg("successes"), py::arg("trials"),
          py::arg("confidence") = 0.95);

    py::class_<TrialRecord>(m, "TrialRecord")
        .def_readonly("injected_offset_timebins", &TrialRecord::injected_offset_timebins)
        .def_readonly("recovered_offset_timebins", &TrialRecord::recovered_offset_timebins)
        .def_readonly("success", &TrialRecord::success)
        .def_readonly("loop_iterations", &TrialRecord::loop_iterations)
        .def_readonly("detections", &TrialRecord::detections);
    m.def("run_trial", &run_trial, py::arg("l_max"), py::arg("d_i"), py::arg("p_sig"), py::arg("p_noise"),
          py::arg("trial_seed"));
}
