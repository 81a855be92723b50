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

#include "cli.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "iqsync/analytics.h"
#include "iqsync/channel.h"
#include "iqsync/csv.h"
#include "iqsync/pattern.h"
#include "iqsync/recovery.h"
#include "iqsync/sweep.h"

namespace iqsync::cli {

namespace {

constexpr uint64_t DESK_SYMBOL_LIMIT = uint64_t{1} << 30;

uint32_t parse_u32(const std::string &text, const char *what) {
    uint32_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw std::invalid_argument(std::string("invalid ") + what + ": '" + text + "'");
    }
    return value;
}

/// Expands "3", "1:30" and comma lists (already split by CLI11) into levels.
std::vector<uint32_t> expand_levels(const std::vector<std::string> &items) {
    std::vector<uint32_t> out;
    for (const std::string &item : items) {
        size_t colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(parse_u32(item, "l_max"));
            continue;
        }
        uint32_t lo = parse_u32(item.substr(0, colon), "l_max range");
        uint32_t hi = parse_u32(item.substr(colon + 1), "l_max range");
        if (hi < lo) {
            throw std::invalid_argument("empty l_max range '" + item + "'");
        }
        for (uint32_t l = lo; l <= hi; l++) {
            out.push_back(l);
        }
    }
    return out;
}

/// "max" means d_i = N_l for the given l_max.
uint32_t resolve_di(const std::string &text, uint32_t l_max) {
    if (text == "max") {
        return l_max + 1;
    }
    return parse_u32(text, "d_i");
}

/// Destination stream: a file when a path was given, `fallback` otherwise.
class Output {
   public:
    Output(const std::string &path, std::ostream &fallback, bool binary = false) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
        if (!*file_) {
            throw DataError("cannot open '" + path + "' for writing");
        }
        stream_ = file_.get();
    }

    std::ostream &stream() {
        return *stream_;
    }
    bool is_file() const {
        return file_ != nullptr;
    }

    void close() {
        if (file_) {
            file_->close();
            if (!*file_) {
                throw DataError("failed writing output file");
            }
        }
    }

   private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *stream_ = nullptr;
};

/// Signal / noise axes shared by several commands.
struct LinkAxes {
    std::vector<double> p_sig;
    std::vector<double> eta_db;
    std::vector<double> p_noise;
    std::vector<double> p_noise_ratio;

    void add_to(CLI::App *app) {
        auto *psig = app->add_option("--psig", p_sig, "Signal detection probability per symbol (list)")
                         ->delimiter(',');
        auto *eta = app->add_option("--eta-db", eta_db, "Channel attenuation in dB, 1 photon per symbol (list)")
                        ->delimiter(',');
        psig->excludes(eta);
        eta->excludes(psig);
        app->add_option("--pnoise", p_noise, "Noise detection probability per symbol (list)")->delimiter(',');
        app->add_option("--pnoise-ratio", p_noise_ratio, "Noise probability as a multiple of p_sig (list)")
            ->delimiter(',');
    }

    std::vector<double> signals() const {
        if (!eta_db.empty()) {
            std::vector<double> out;
            for (double eta : eta_db) {
                out.push_back(p_sig_from_attenuation(eta));
            }
            return out;
        }
        if (p_sig.empty()) {
            throw std::invalid_argument("one of --psig or --eta-db is required");
        }
        return p_sig;
    }

    std::vector<NoiseSetting> noises() const {
        std::vector<NoiseSetting> out;
        for (double p : p_noise) {
            out.push_back({false, p});
        }
        for (double r : p_noise_ratio) {
            out.push_back({true, r});
        }
        if (out.empty()) {
            out.push_back({false, 0});
        }
        return out;
    }
};

std::vector<uint64_t> read_detection_file(const std::string &path, const std::string &format) {
    bool binary = format == "binary" || (format == "auto" && path.size() >= 4 && path.ends_with(".bin"));
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return binary ? read_detections_binary(in) : read_detections_text(in);
}

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc() ? std::string(buf, end) : "nan";
}

// ---------------------------------------------------------------- pattern

struct PatternOptions {
    uint32_t l_max = 2;
    std::string d_i = "1";
    uint64_t seed = 0;
    std::string out;
    std::string format = "packed";
    bool force = false;
};

int cmd_pattern(const PatternOptions &o, std::ostream &out, std::ostream &err) {
    SyncConfig config;
    config.l_max = o.l_max;
    config.d_i = resolve_di(o.d_i, o.l_max);
    config.seed = o.seed;
    DerivedCounts counts = derived_counts(config);
    if (counts.num_symbols > DESK_SYMBOL_LIMIT && !o.force) {
        err << "pattern has " << counts.num_symbols << " symbols (> 2^30); pass --force to write it anyway\n";
        return EXIT_USAGE;
    }
    bool packed = o.format == "packed";
    Output dest(o.out, out, packed);
    if (packed) {
        write_packed_pattern(dest.stream(), config);
    } else {
        for (SymbolRecord r : generate_pattern(config)) {
            dest.stream() << static_cast<char>('0' + r.symbol);
        }
        dest.stream() << '\n';
    }
    dest.close();
    if (dest.is_file()) {
        out << "symbols=" << counts.num_symbols << "\n";
    }
    return EXIT_OK;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    uint32_t l_max = 10;
    std::string d_i = "1";
    uint64_t seed = 0;
    std::optional<uint64_t> channel_seed;
    double t_s_ps = 1600;
    LinkAxes link;
    int64_t offset_tb = 0;
    double frac_offset = 0;
    double jitter = 0;
    std::string out;
    std::string raw_out;
    std::string format = "text";
    bool force = false;
};

int cmd_simulate(const SimulateOptions &o, std::ostream &out, std::ostream &err) {
    SyncConfig config;
    config.l_max = o.l_max;
    config.d_i = resolve_di(o.d_i, o.l_max);
    config.seed = o.seed;
    config.t_s_ps = o.t_s_ps;
    DerivedCounts counts = derived_counts(config);
    if (counts.num_symbols > DESK_SYMBOL_LIMIT && !o.force) {
        err << "pattern has " << counts.num_symbols << " symbols (> 2^30); pass --force to simulate anyway\n";
        return EXIT_USAGE;
    }
    auto signals = o.link.signals();
    if (signals.size() != 1 || o.link.p_noise.size() + o.link.p_noise_ratio.size() > 1) {
        throw std::invalid_argument("simulate takes a single signal and noise value");
    }
    LinkParams link;
    link.p_sig = signals[0];
    link.p_noise = o.link.noises()[0].resolve(link.p_sig);
    link.offset_timebins = o.offset_tb;
    link.frac_offset = o.frac_offset;
    link.jitter_sigma = o.jitter;
    link.rng_seed = o.channel_seed ? *o.channel_seed : mix64(o.seed + 1);

    DetectionSet detections = simulate_detections(config, link);
    bool binary = o.format == "binary";
    Output dest(o.out, out, binary);
    if (binary) {
        write_detections_binary(dest.stream(), detections.timebins);
    } else {
        write_detections_text(dest.stream(), detections.timebins);
    }
    dest.close();

    if (!o.raw_out.empty()) {
        auto raw = simulate_raw_timestamps(detections.timebins, config.t_s_ps / 2, link);
        Output raw_dest(o.raw_out, out);
        for (double t : raw) {
            raw_dest.stream() << shortest(t) << '\n';
        }
        raw_dest.close();
    }

    std::ostream &report = dest.is_file() ? out : err;
    report << "detections=" << detections.size() << "\n";
    report << "expected_detections=" << csv_number(expected_detection_count(config, link)) << "\n";
    return EXIT_OK;
}

// ---------------------------------------------------------------- recover

struct RecoverOptions {
    uint32_t l_max = 10;
    std::string d_i = "1";
    std::string input;
    std::string format = "auto";
};

int cmd_recover(const RecoverOptions &o, std::ostream &out, std::ostream &err) {
    uint32_t d_i = resolve_di(o.d_i, o.l_max);
    std::vector<uint64_t> detections = read_detection_file(o.input, o.format);
    RecoveryResult r = recover_offset(o.l_max, d_i, detections);
    if (r.no_data) {
        err << "warning: no detections; reporting a zero offset\n";
    }
    out << "delta_timebins=" << r.delta_timebins << "\n";
    out << "delta_symbols=" << r.delta_symbols << "\n";
    out << "level_counters=";
    for (size_t i = 0; i < r.level_counters.size(); i++) {
        out << (i ? "," : "") << r.level_counters[i];
    }
    out << "\n";
    out << "loop_iterations=" << r.loop_iterations << "\n";
    out << "detections=" << detections.size() << "\n";
    out << "in_range=" << (verify_range(r.delta_timebins, o.l_max) ? "true" : "false") << "\n";
    return EXIT_OK;
}

// ---------------------------------------------------------------- model

struct ModelOptions {
    std::vector<std::string> l_max{"10"};
    std::vector<std::string> d_i{"1"};
    LinkAxes link;
    std::vector<double> p_target{0.5};
    double t_s_ps = 1600;
    std::string out;
};

int cmd_model_success(const ModelOptions &o, std::ostream &out) {
    Output dest(o.out, out);
    CsvWriter csv(dest.stream(), {"l_max", "d_i", "p_sig", "p_noise", "eta_db", "mu_tot", "sigma_tot", "p_rand",
                                  "p_success_1", "p_success", "p_fail", "normal_approx_valid", "status"});
    for (uint32_t l_max : expand_levels(o.l_max)) {
        for (const std::string &di_text : o.d_i) {
            uint32_t d_i = resolve_di(di_text, l_max);
            for (double p_sig : o.link.signals()) {
                for (const NoiseSetting &noise : o.link.noises()) {
                    double p_noise = noise.resolve(p_sig);
                    std::vector<std::string> row = {csv_number(l_max), csv_number(d_i), csv_number(p_sig),
                                                    csv_number(p_noise), csv_number(attenuation_from_p_sig(p_sig))};
                    try {
                        ModelResult m = success_probability(l_max, d_i, p_sig, p_noise);
                        for (double v : {m.mu_tot, m.sigma_tot, m.p_rand, m.p_success_1, m.p_success, m.p_fail}) {
                            row.push_back(csv_number(v));
                        }
                        row.push_back(csv_bool(m.normal_approx_valid));
                        row.push_back("ok");
                    } catch (const std::domain_error &e) {
                        for (int i = 0; i < 7; i++) {
                            row.push_back("");
                        }
                        row.push_back(e.what());
                    }
                    csv.row(row);
                }
            }
        }
    }
    dest.close();
    return EXIT_OK;
}

int cmd_model_loops(const ModelOptions &o, std::ostream &out) {
    Output dest(o.out, out);
    CsvWriter csv(dest.stream(), {"l_max", "d_i", "p_sig", "p_noise", "p_det", "n_s", "expected_detections", "n_loop"});
    for (uint32_t l_max : expand_levels(o.l_max)) {
        for (const std::string &di_text : o.d_i) {
            uint32_t d_i = resolve_di(di_text, l_max);
            DerivedCounts counts = derived_counts(l_max, d_i);
            for (double p_sig : o.link.signals()) {
                for (const NoiseSetting &noise : o.link.noises()) {
                    double p_noise = noise.resolve(p_sig);
                    double pd = p_det(p_sig, p_noise);
                    csv.row({csv_number(l_max), csv_number(d_i), csv_number(p_sig), csv_number(p_noise),
                             csv_number(pd), csv_number(counts.num_symbols),
                             csv_number(pd * static_cast<double>(counts.num_symbols)),
                             csv_number(expected_loop_iterations(l_max, d_i, p_sig, p_noise))});
                }
            }
        }
    }
    dest.close();
    return EXIT_OK;
}

int cmd_model_attenuation(const ModelOptions &o, std::ostream &out) {
    std::vector<NoiseSpec> noises;
    for (double p : o.link.p_noise) {
        noises.push_back(p == 0 ? NoiseSpec::none() : NoiseSpec::fixed_at(p));
    }
    for (double r : o.link.p_noise_ratio) {
        noises.push_back(NoiseSpec::ratio_of_signal(r));
    }
    if (noises.empty()) {
        noises.push_back(NoiseSpec::none());
    }
    if (!o.link.p_sig.empty() || !o.link.eta_db.empty()) {
        throw std::invalid_argument("model attenuation solves for the signal; drop --psig/--eta-db");
    }

    Output dest(o.out, out);
    CsvWriter csv(dest.stream(), {"l_max", "d_i", "delta_max", "noise", "p_target", "status", "eta_db", "p_sig",
                                  "p_noise", "n_loop", "fft_reference", "note"});
    bool any_unsolved = false;
    std::vector<uint32_t> levels = expand_levels(o.l_max);
    for (const std::string &di_text : o.d_i) {
        for (const NoiseSpec &noise : noises) {
            for (double target : o.p_target) {
                for (uint32_t l_max : levels) {
                    uint32_t d_i = resolve_di(di_text, l_max);
                    uint64_t delta_max = uint64_t{1} << (l_max - 1);
                    double n = static_cast<double>(delta_max);
                    std::vector<std::string> row = {csv_number(l_max), csv_number(d_i), csv_number(delta_max),
                                                    noise.describe(), csv_number(target)};
                    AttenuationSolution sol;
                    std::string note;
                    try {
                        sol = tolerable_attenuation(l_max, d_i, noise, target);
                        note = sol.note;
                    } catch (const NonMonotoneBracket &e) {
                        note = e.what();
                    }
                    if (sol.ok()) {
                        double p_noise = noise.p_noise(sol.p_sig);
                        row.insert(row.end(),
                                   {"ok", csv_number(sol.eta_db), csv_number(sol.p_sig), csv_number(p_noise),
                                    csv_number(expected_loop_iterations(l_max, d_i, sol.p_sig, p_noise))});
                    } else {
                        any_unsolved = true;
                        row.insert(row.end(), {"no_solution", "", "", "", ""});
                    }
                    row.push_back(csv_number(n * std::log2(std::max(n, 1.0))));
                    row.push_back(note);
                    csv.row(row);
                }
            }
        }
    }
    dest.close();
    return any_unsolved ? EXIT_NO_SOLUTION : EXIT_OK;
}

int cmd_model_qber(const ModelOptions &o, std::ostream &out) {
    Output dest(o.out, out);
    CsvWriter csv(dest.stream(), {"p_sig", "p_noise", "qber"});
    for (double p_sig : o.link.signals()) {
        for (const NoiseSetting &noise : o.link.noises()) {
            double p_noise = noise.resolve(p_sig);
            csv.row({csv_number(p_sig), csv_number(p_noise), csv_number(qber_estimate(p_sig, p_noise))});
        }
    }
    dest.close();
    return EXIT_OK;
}

int cmd_model_durations(const ModelOptions &o, std::ostream &out) {
    Output dest(o.out, out);
    CsvWriter csv(dest.stream(), {"l_max", "delta_max", "delta_max_s", "n_s_no_interleave", "n_s_max_interleave",
                                  "crosscorr", "t_no_interleave_s", "t_max_interleave_s"});
    for (uint32_t l_max : expand_levels(o.l_max)) {
        SyncConfig config;
        config.l_max = l_max;
        config.t_s_ps = o.t_s_ps;
        MaxOffset offset = max_offset(config);
        ReferenceDurations ref = reference_durations(offset.symbols);
        double t_s = o.t_s_ps * 1e-12;
        csv.row({csv_number(l_max), csv_number(offset.symbols), csv_number(offset.time_ps * 1e-12),
                 csv_number(ref.no_interleave), csv_number(ref.max_interleave), csv_number(ref.crosscorr),
                 csv_number(static_cast<double>(ref.no_interleave) * t_s),
                 csv_number(static_cast<double>(ref.max_interleave) * t_s)});
    }
    dest.close();
    return EXIT_OK;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    std::vector<std::string> l_max{"10"};
    std::vector<std::string> d_i{"1"};
    LinkAxes link;
    uint64_t trials = 50;
    uint64_t seed = 0;
    uint64_t max_symbols = DESK_SYMBOL_LIMIT;
    bool force = false;
    std::string out;
    std::string summary;
};

int cmd_sweep(const SweepOptions &o, std::ostream &out) {
    SweepSpec spec;
    spec.l_max_values = expand_levels(o.l_max);
    for (const std::string &d : o.d_i) {
        spec.d_i_values.push_back(d == "max" ? 0 : parse_u32(d, "d_i"));
    }
    spec.p_sig_values = o.link.signals();
    spec.noise_values = o.link.noises();
    spec.trials = o.trials;
    spec.base_seed = o.seed;
    spec.max_symbols = o.force ? std::numeric_limits<uint64_t>::max() : o.max_symbols;

    SweepResult result = run_sweep(spec, !o.out.empty());

    if (!o.out.empty()) {
        Output dest(o.out, out);
        CsvWriter csv(dest.stream(), {"l_max", "d_i", "p_sig", "p_noise", "trial", "injected_offset_tb",
                                      "recovered_offset_tb", "success", "loop_iterations", "detections"});
        for (const TrialRecord &t : result.trials) {
            csv.row({csv_number(t.l_max), csv_number(t.d_i), csv_number(t.p_sig), csv_number(t.p_noise),
                     csv_number(t.trial), csv_number(t.injected_offset_timebins),
                     csv_number(t.recovered_offset_timebins), csv_bool(t.success), csv_number(t.loop_iterations),
                     csv_number(t.detections)});
        }
        dest.close();
    }

    Output dest(o.summary, out);
    CsvWriter csv(dest.stream(),
                  {"l_max", "d_i", "p_sig", "p_noise", "n_s", "trials", "failures", "p_fail", "ci_lo", "ci_hi",
                   "p_fail_analytic", "deviation_sigmas", "mean_detections", "mean_loop_iterations",
                   "expected_loop_iterations", "skipped", "note"});
    for (const CellSummary &c : result.cells) {
        csv.row({csv_number(c.l_max), csv_number(c.d_i), csv_number(c.p_sig), csv_number(c.p_noise),
                 csv_number(c.num_symbols), csv_number(c.trials), csv_number(c.failures),
                 csv_number(c.p_fail_empirical), csv_number(c.ci.lo), csv_number(c.ci.hi),
                 csv_number(c.p_fail_analytic), csv_number(c.deviation_sigmas), csv_number(c.mean_detections),
                 csv_number(c.mean_loop_iterations), csv_number(c.expected_loop_iterations), csv_bool(c.skipped),
                 c.note});
    }
    dest.close();
    return EXIT_OK;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
    std::string input;
    std::string n_col;
    std::string y_col;
};

int pick_column(const CsvTable &table, const std::string &requested, std::initializer_list<const char *> defaults) {
    if (!requested.empty()) {
        int c = table.column(requested);
        if (c < 0) {
            throw DataError("no column named '" + requested + "'");
        }
        return c;
    }
    for (const char *name : defaults) {
        int c = table.column(name);
        if (c >= 0) {
            return c;
        }
    }
    throw DataError("cannot find the n / y columns; name them with --n-col / --y-col");
}

int cmd_fit(const FitOptions &o, std::ostream &out) {
    std::ifstream in(o.input);
    if (!in) {
        throw DataError("cannot open '" + o.input + "'");
    }
    CsvTable table = read_csv(in);
    int n_col = pick_column(table, o.n_col, {"n", "delta_max"});
    int y_col = pick_column(table, o.y_col, {"y", "n_loop"});
    int status_col = table.column("status");
    std::vector<double> n;
    std::vector<double> y;
    for (const auto &row : table.rows) {
        if (status_col >= 0 && row[status_col] != "ok") {
            continue;
        }
        n.push_back(parse_csv_double(row[n_col]));
        y.push_back(parse_csv_double(row[y_col]));
    }
    if (n.size() < 3) {
        throw DataError("poly-log fit needs at least 3 usable rows, found " + std::to_string(n.size()));
    }
    PolyLogFit fit;
    try {
        fit = polylog_fit(n, y);
    } catch (const std::invalid_argument &e) {
        throw DataError(e.what());
    }
    out << "a=" << csv_number(fit.a) << "\n";
    out << "b=" << csv_number(fit.b) << "\n";
    out << "max_rel_dev=" << csv_number(fit.max_rel_dev) << "\n";
    out << "points=" << n.size() << "\n";
    return EXIT_OK;
}

/// Replaces `--config FILE` with the file's key=value pairs as `--key=value`
/// arguments, skipping keys already given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string> &args) {
    std::vector<std::string> out;
    std::string path;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (path.empty()) {
        return out;
    }
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config file '" + path + "'");
    }
    auto given = [&](const std::string &flag) {
        for (const std::string &a : out) {
            if (a == flag || a.starts_with(flag + "=")) {
                return true;
            }
        }
        return false;
    };
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return std::string();
        }
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_number) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.starts_with("--")) {
            key = key.substr(2);
        }
        std::string flag = "--" + key;
        if (given(flag)) {
            continue;
        }
        if (value == "true") {
            out.push_back(flag);
        } else if (value != "false") {
            out.push_back(flag + "=" + value);
        }
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Clock offset recovery for single-photon links: pattern generation, channel simulation, "
                 "offset recovery and the analytic success model."};
    app.name(args.empty() ? "iqsync" : args[0]);
    app.require_subcommand(1);

    PatternOptions pattern;
    auto *pattern_cmd = app.add_subcommand("pattern", "Write the synchronization pattern bits");
    pattern_cmd->add_option("--lmax", pattern.l_max, "Maximum level")->capture_default_str();
    pattern_cmd->add_option("--di", pattern.d_i, "Degree of interleaving (number or 'max')")->capture_default_str();
    pattern_cmd->add_option("--seed", pattern.seed, "Level selector seed")->capture_default_str();
    pattern_cmd->add_option("--out", pattern.out, "Output path ('-' for stdout)")->required();
    pattern_cmd->add_option("--format", pattern.format, "packed | text")
        ->check(CLI::IsMember({"packed", "text"}))
        ->capture_default_str();
    pattern_cmd->add_flag("--force", pattern.force, "Allow patterns longer than 2^30 symbols");

    SimulateOptions simulate;
    auto *simulate_cmd = app.add_subcommand("simulate", "Simulate Bob's detection record");
    simulate_cmd->add_option("--lmax", simulate.l_max, "Maximum level")->capture_default_str();
    simulate_cmd->add_option("--di", simulate.d_i, "Degree of interleaving (number or 'max')")->capture_default_str();
    simulate_cmd->add_option("--seed", simulate.seed, "Pattern seed")->capture_default_str();
    simulate_cmd->add_option("--channel-seed", simulate.channel_seed, "Channel RNG seed (default derived from --seed)");
    simulate_cmd->add_option("--ts-ps", simulate.t_s_ps, "Symbol duration in ps")->capture_default_str();
    simulate.link.add_to(simulate_cmd);
    simulate_cmd->add_option("--offset-tb", simulate.offset_tb, "Bob's clock lead in timebins")->capture_default_str();
    simulate_cmd->add_option("--frac-offset", simulate.frac_offset, "Sub-timebin offset of raw timestamps [0,1)");
    simulate_cmd->add_option("--jitter", simulate.jitter, "Timestamp jitter sigma in timebins");
    simulate_cmd->add_option("--out", simulate.out, "Detection file ('-' or empty for stdout)");
    simulate_cmd->add_option("--raw-out", simulate.raw_out, "Also write raw picosecond timestamps here");
    simulate_cmd->add_option("--format", simulate.format, "text | binary")
        ->check(CLI::IsMember({"text", "binary"}))
        ->capture_default_str();
    simulate_cmd->add_flag("--force", simulate.force, "Allow patterns longer than 2^30 symbols");

    RecoverOptions recover;
    auto *recover_cmd = app.add_subcommand("recover", "Recover the clock offset from a detection file");
    recover_cmd->add_option("--lmax", recover.l_max, "Maximum level")->capture_default_str();
    recover_cmd->add_option("--di", recover.d_i, "Degree of interleaving (number or 'max')")->capture_default_str();
    recover_cmd->add_option("detections", recover.input, "Detection file")->required();
    recover_cmd->add_option("--format", recover.format, "auto (binary iff the name ends in .bin) | text | binary")
        ->check(CLI::IsMember({"auto", "text", "binary"}))
        ->capture_default_str();

    ModelOptions model;
    auto *model_cmd = app.add_subcommand("model", "Analytic model tables as CSV");
    model_cmd->require_subcommand(1);
    auto add_model_sub = [&](const char *name, const char *help, bool with_grid, bool with_link, bool with_target) {
        auto *sub = model_cmd->add_subcommand(name, help);
        if (with_grid) {
            sub->add_option("--lmax", model.l_max, "Maximum levels: list and/or a:b ranges")
                ->delimiter(',')
                ->capture_default_str();
        }
        if (with_grid && std::string(name) != "durations") {
            sub->add_option("--di", model.d_i, "Degrees of interleaving (numbers or 'max')")
                ->delimiter(',')
                ->capture_default_str();
        }
        if (with_link) {
            model.link.add_to(sub);
        }
        if (with_target) {
            sub->add_option("--ptarget", model.p_target, "Target success probabilities")
                ->delimiter(',')
                ->capture_default_str();
        }
        sub->add_option("--out", model.out, "CSV output path (default stdout)");
        return sub;
    };
    auto *success_cmd = add_model_sub("success", "Success probability over a grid", true, true, false);
    auto *loops_cmd = add_model_sub("loops", "Expected recovery loop iterations", true, true, false);
    auto *attenuation_cmd =
        add_model_sub("attenuation", "Tolerable attenuation and time complexity", true, true, true);
    auto *qber_cmd = add_model_sub("qber", "QBER estimate", false, true, false);
    auto *durations_cmd = add_model_sub("durations", "Pattern durations versus maximum offset", true, false, false);
    durations_cmd->add_option("--ts-ps", model.t_s_ps, "Symbol duration in ps")->capture_default_str();

    SweepOptions sweep;
    auto *sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo failure rates against the analytic model");
    sweep_cmd->add_option("--lmax", sweep.l_max, "Maximum levels: list and/or a:b ranges")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--di", sweep.d_i, "Degrees of interleaving (numbers or 'max')")
        ->delimiter(',')
        ->capture_default_str();
    sweep.link.add_to(sweep_cmd);
    sweep_cmd->add_option("--trials", sweep.trials, "Trials per cell")->check(CLI::PositiveNumber)->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed; trial t uses seed + t")->capture_default_str();
    sweep_cmd->add_option("--max-symbols", sweep.max_symbols, "Skip cells with longer patterns")
        ->capture_default_str();
    sweep_cmd->add_flag("--force", sweep.force, "Do not skip long patterns");
    sweep_cmd->add_option("--out", sweep.out, "Per-trial CSV path");
    sweep_cmd->add_option("--summary", sweep.summary, "Per-cell CSV path (default stdout)");

    FitOptions fit;
    auto *fit_cmd = app.add_subcommand("fit", "Fit a (log2 n)^b to a CSV of points");
    fit_cmd->add_option("points", fit.input, "CSV file")->required();
    fit_cmd->add_option("--n-col", fit.n_col, "Column holding n (default: n or delta_max)");
    fit_cmd->add_option("--y-col", fit.y_col, "Column holding y (default: y or n_loop)");

    for (CLI::App *leaf : {pattern_cmd, simulate_cmd, recover_cmd, success_cmd, loops_cmd, attenuation_cmd, qber_cmd,
                           durations_cmd, sweep_cmd, fit_cmd}) {
        leaf->add_option("--config", "key=value file supplying any flag; command-line flags win");
    }

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const DataError &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_DATA;
    }
    std::vector<const char *> argv;
    for (const std::string &a : expanded) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    try {
        if (*pattern_cmd) {
            return cmd_pattern(pattern, out, err);
        }
        if (*simulate_cmd) {
            return cmd_simulate(simulate, out, err);
        }
        if (*recover_cmd) {
            return cmd_recover(recover, out, err);
        }
        if (*success_cmd) {
            return cmd_model_success(model, out);
        }
        if (*loops_cmd) {
            return cmd_model_loops(model, out);
        }
        if (*attenuation_cmd) {
            return cmd_model_attenuation(model, out);
        }
        if (*qber_cmd) {
            return cmd_model_qber(model, out);
        }
        if (*durations_cmd) {
            return cmd_model_durations(model, out);
        }
        if (*sweep_cmd) {
            return cmd_sweep(sweep, out);
        }
        if (*fit_cmd) {
            return cmd_fit(fit, out);
        }
    } catch (const DataError &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_DATA;
    } catch (const NonMonotoneBracket &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_NO_SOLUTION;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const std::domain_error &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_DATA;
    }
    return EXIT_USAGE;
}

}  // namespace iqsync::cli
