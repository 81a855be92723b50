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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iqsync/csv.h"

namespace fs = std::filesystem;
using namespace iqsync;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "iqsync");
    std::stringstream out;
    std::stringstream err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("iqsync_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    static std::string slurp(const std::string &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    static void spit(const std::string &p, const std::string &content) {
        std::ofstream(p, std::ios::binary) << content;
    }
    fs::path dir_;
};

std::string value_of(const std::string &text, const std::string &key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with(key + "=")) {
            return line.substr(key.size() + 1);
        }
    }
    return "<missing>";
}

}  // namespace

TEST_F(CliTest, pattern_text) {
    Result r = run_cli({"pattern", "--lmax", "2", "--di", "1", "--format", "text", "--out", "-"});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(r.out, "000000000101010100110011\n");
}

TEST_F(CliTest, pattern_packed_file) {
    Result r = run_cli({"pattern", "--lmax", "3", "--di", "max", "--seed", "9", "--out", path("p.bin")});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(value_of(r.out, "symbols"), "16");
    ASSERT_EQ(slurp(path("p.bin")).size(), 8u + 2u);
}

TEST_F(CliTest, pattern_size_guard) {
    Result r = run_cli({"pattern", "--lmax", "30", "--out", path("big.bin")});
    ASSERT_EQ(r.code, cli::EXIT_USAGE);
    ASSERT_NE(r.err.find("--force"), std::string::npos);
}

TEST_F(CliTest, simulate_then_recover) {
    for (std::string format : {"text", "binary"}) {
        std::string det = path(format == "binary" ? "det.bin" : "det.txt");
        Result s = run_cli({"simulate", "--lmax", "10", "--di", "2", "--seed", "4", "--psig", "0.05", "--pnoise",
                            "1e-3", "--offset-tb", "-301", "--out", det, "--format", format});
        ASSERT_EQ(s.code, 0) << s.err;
        Result r = run_cli({"recover", "--lmax", "10", "--di", "2", det});
        ASSERT_EQ(r.code, 0) << r.err;
        ASSERT_EQ(value_of(r.out, "delta_timebins"), "-301");
        ASSERT_EQ(value_of(r.out, "delta_symbols"), "-150");
        ASSERT_EQ(value_of(r.out, "in_range"), "true");
        ASSERT_EQ(value_of(r.out, "detections"), value_of(s.out, "detections"));
    }
}

TEST_F(CliTest, recover_table_two_record) {
    // Transmitted pulses of the l_max = 3, d_i = 2 walkthrough, delayed by 3 symbols.
    std::string bits = "00000101000001010010001100010111";
    std::string text;
    for (size_t k = 0; k < bits.size(); k++) {
        text += std::to_string(2 * (k + 3) + (bits[k] - '0')) + "\n";
    }
    spit(path("t2.txt"), text);
    Result r = run_cli({"recover", "--lmax", "3", "--di", "2", path("t2.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(value_of(r.out, "delta_timebins"), "6");
    ASSERT_EQ(value_of(r.out, "level_counters").substr(value_of(r.out, "level_counters").find(',') + 1), "-4,6,-2");
}

TEST_F(CliTest, recover_empty_and_bad_files) {
    spit(path("empty.txt"), "");
    Result r = run_cli({"recover", "--lmax", "4", path("empty.txt")});
    ASSERT_EQ(r.code, 0);
    ASSERT_NE(r.err.find("no detections"), std::string::npos);
    ASSERT_EQ(value_of(r.out, "delta_timebins"), "0");

    spit(path("unsorted.txt"), "5\n3\n");
    ASSERT_EQ(run_cli({"recover", "--lmax", "4", path("unsorted.txt")}).code, cli::EXIT_DATA);
    spit(path("junk.txt"), "5\nxyz\n");
    Result junk = run_cli({"recover", "--lmax", "4", path("junk.txt")});
    ASSERT_EQ(junk.code, cli::EXIT_DATA);
    ASSERT_NE(junk.err.find("line 2"), std::string::npos);
    ASSERT_EQ(run_cli({"recover", "--lmax", "4", path("missing.txt")}).code, cli::EXIT_DATA);
}

TEST_F(CliTest, usage_errors) {
    ASSERT_EQ(run_cli({}).code, cli::EXIT_USAGE);
    ASSERT_EQ(run_cli({"bogus"}).code, cli::EXIT_USAGE);
    ASSERT_EQ(run_cli({"pattern", "--lmax", "0", "--out", "-"}).code, cli::EXIT_USAGE);
    ASSERT_EQ(run_cli({"pattern", "--lmax", "3", "--di", "9", "--out", "-"}).code, cli::EXIT_USAGE);
    ASSERT_EQ(run_cli({"--help"}).code, cli::EXIT_OK);
}

TEST_F(CliTest, model_success_csv) {
    Result r = run_cli({"model", "success", "--lmax", "28", "--di", "4", "--eta-db", "61", "--pnoise", "1.1e-7"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    CsvTable t = read_csv(in);
    ASSERT_EQ(t.rows.size(), 1u);
    double p = parse_csv_double(t.rows[0][t.column("p_success")]);
    ASSERT_GT(p, 0.99);
}

TEST_F(CliTest, model_loops_and_qber) {
    Result r = run_cli({"model", "loops", "--lmax", "3", "--di", "1", "--psig", "1e-3", "--pnoise", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    CsvTable t = read_csv(in);
    ASSERT_NEAR(parse_csv_double(t.rows[0][t.column("n_loop")]), 0.064, 1e-12);

    Result q = run_cli({"model", "qber", "--psig", "0.5", "--pnoise-ratio", "0.22"});
    ASSERT_EQ(q.code, 0) << q.err;
    std::istringstream qin(q.out);
    CsvTable qt = read_csv(qin);
    ASSERT_NEAR(parse_csv_double(qt.rows[0][qt.column("qber")]), 0.11, 1e-9);
}

TEST_F(CliTest, model_attenuation_and_fit_round_trip) {
    std::string csv = path("att.csv");
    Result r = run_cli({"model", "attenuation", "--lmax", "10:22", "--di", "max", "--pnoise", "1e-7", "--ptarget",
                        "0.5", "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(csv);
    CsvTable t = read_csv(in);
    ASSERT_EQ(t.rows.size(), 13u);
    for (const auto &row : t.rows) {
        ASSERT_EQ(row[t.column("status")], "ok");
    }
    Result f = run_cli({"fit", csv});
    ASSERT_EQ(f.code, 0) << f.err;
    ASSERT_EQ(value_of(f.out, "points"), "13");
    double b = parse_csv_double(value_of(f.out, "b"));
    ASSERT_GT(b, 0);
}

TEST_F(CliTest, model_attenuation_unsolvable) {
    Result r = run_cli({"model", "attenuation", "--lmax", "3", "--pnoise", "1e-3", "--ptarget", "0.01"});
    ASSERT_EQ(r.code, cli::EXIT_NO_SOLUTION);
    ASSERT_NE(r.out.find("no_solution"), std::string::npos);
}

TEST_F(CliTest, model_durations) {
    Result r = run_cli({"model", "durations", "--lmax", "28"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    CsvTable t = read_csv(in);
    ASSERT_NEAR(parse_csv_double(t.rows[0][t.column("delta_max_s")]), 0.2147, 1e-4);
    ASSERT_NEAR(parse_csv_double(t.rows[0][t.column("t_no_interleave_s")]), 24.9, 0.05);
}

TEST_F(CliTest, fit_needs_three_rows) {
    spit(path("two.csv"), "n,y\n4,1\n8,2\n");
    ASSERT_EQ(run_cli({"fit", path("two.csv")}).code, cli::EXIT_DATA);
}

TEST_F(CliTest, sweep_writes_both_tables) {
    Result r = run_cli({"sweep", "--lmax", "6,8", "--di", "1,max", "--psig", "0.05", "--pnoise", "1e-4", "--trials",
                        "10", "--out", path("trials.csv"), "--summary", path("cells.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream cells_in(path("cells.csv"));
    ASSERT_EQ(read_csv(cells_in).rows.size(), 4u);
    std::ifstream trials_in(path("trials.csv"));
    ASSERT_EQ(read_csv(trials_in).rows.size(), 40u);
}

TEST_F(CliTest, config_file) {
    spit(path("c.ini"), "# pattern options\nlmax = 1\nformat = text\nout = -\n");
    Result r = run_cli({"pattern", "--config", path("c.ini")});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(r.out, "00000101\n");
    Result over = run_cli({"pattern", "--config", path("c.ini"), "--lmax", "2"});
    ASSERT_EQ(over.out, "000000000101010100110011\n");
    ASSERT_EQ(run_cli({"pattern", "--config", path("nope.ini")}).code, cli::EXIT_DATA);
}
