#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "ftsim/config.hpp"
#include "ftsim/engine.hpp"
#include "ftsim/report.hpp"

using namespace ftsim;

namespace {

std::string g_ftsim;

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    CmdResult res;
    const std::string cmd = g_ftsim + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return res;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) res.output += buf;
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return text;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

const char* kBaseArgs =
    "--set num-lps=2 --set num-entities=6 --set total-timesteps=40 "
    "--set out-degree=3";

SimConfig base_config() {
    SimConfig cfg;
    cfg.num_lps = 2;
    cfg.num_entities = 6;
    cfg.total_timesteps = 40;
    cfg.p2p.out_degree = 3;
    return cfg;
}

} // namespace

TEST_CASE("run writes a loadable report matching the library") {
    const auto res = run_cli(std::string("run ") + kBaseArgs +
                             " --seed 3 -o cli_run.csv");
    REQUIRE(res.exit_code == 0);

    const auto loaded = load_report_csv(slurp("cli_run.csv"));
    REQUIRE(loaded.size() == 1);

    SimConfig cfg = base_config();
    cfg.seed = 3;
    const SimReport direct = run_simulation(cfg);
    CHECK(loaded[0].digest() == direct.digest());
    std::remove("cli_run.csv");
}

TEST_CASE("reps vary the seed and are all recorded") {
    const auto res = run_cli(std::string("run ") + kBaseArgs +
                             " --seed 10 --reps 3 -o cli_reps.csv");
    REQUIRE(res.exit_code == 0);
    const auto loaded = load_report_csv(slurp("cli_reps.csv"));
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].seed == 10);
    CHECK(loaded[1].seed == 11);
    CHECK(loaded[2].seed == 12);
    CHECK(loaded[0].digest() != loaded[1].digest());
    std::remove("cli_reps.csv");
}

TEST_CASE("config file plus --set override plus --mode processes") {
    write_file("cli_cfg.txt",
               "num-lps=2\nnum-entities=6\ntotal-timesteps=80\n"
               "out-degree=3\nseed=9\n");
    const auto res =
        run_cli("run -c cli_cfg.txt --set total-timesteps=40 "
                "--mode processes -o cli_proc.csv");
    REQUIRE(res.exit_code == 0);
    const auto loaded = load_report_csv(slurp("cli_proc.csv"));
    REQUIRE(loaded.size() == 1);

    SimConfig cfg = base_config();
    cfg.seed = 9;
    cfg.exec_mode = ExecMode::threads;
    const SimReport direct = run_simulation(cfg);
    CHECK(loaded[0].digest() == direct.digest());
    std::remove("cli_cfg.txt");
    std::remove("cli_proc.csv");
}

TEST_CASE("sweep produces one block per value") {
    const auto res = run_cli(std::string("sweep ") + kBaseArgs +
                             " --seed 4 --key num-entities --values 4,8 "
                             "-o cli_sweep.csv");
    REQUIRE(res.exit_code == 0);
    const auto loaded = load_report_csv(slurp("cli_sweep.csv"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].entities.size() == 4);
    CHECK(loaded[1].entities.size() == 8);
    std::remove("cli_sweep.csv");
}

TEST_CASE("reliability prints the default grid") {
    const auto res = run_cli("reliability");
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("n,lambda,t_seconds,reliability") == 0);
    CHECK(res.output.find("0.99900786449220") != std::string::npos);
    int rows = 0;
    for (char ch : res.output)
        if (ch == '\n') ++rows;
    CHECK(rows == 10);
}

TEST_CASE("compare distinguishes equal, divergent and incompatible") {
    REQUIRE(run_cli(std::string("run ") + kBaseArgs +
                    " --seed 5 -o cli_a.csv")
                .exit_code == 0);
    REQUIRE(run_cli(std::string("run ") + kBaseArgs +
                    " --seed 5 -o cli_b.csv")
                .exit_code == 0);
    REQUIRE(run_cli(std::string("run ") + kBaseArgs +
                    " --seed 6 -o cli_c.csv")
                .exit_code == 0);
    REQUIRE(run_cli(std::string("run ") + kBaseArgs +
                    " --seed 5 --set num-entities=4 -o cli_d.csv")
                .exit_code == 0);

    const auto same = run_cli("compare cli_a.csv cli_b.csv");
    CHECK(same.exit_code == 0);
    CHECK(same.output.find("equivalent") != std::string::npos);

    const auto diff = run_cli("compare cli_a.csv cli_c.csv");
    CHECK(diff.exit_code == 1);
    CHECK(diff.output.find("entities differ") != std::string::npos);

    const auto inc = run_cli("compare cli_a.csv cli_d.csv");
    CHECK(inc.exit_code == 2);

    for (const char* f : {"cli_a.csv", "cli_b.csv", "cli_c.csv",
                          "cli_d.csv"})
        std::remove(f);
}

TEST_CASE("bad invocations fail with a diagnostic") {
    CHECK(run_cli("").exit_code != 0);
    const auto bad_key = run_cli("run --set no-such-key=1");
    CHECK(bad_key.exit_code == 1);
    CHECK(bad_key.output.find("error:") != std::string::npos);
    const auto bad_cfg = run_cli("run --set num-lps=0");
    CHECK(bad_cfg.exit_code == 1);
    CHECK(bad_cfg.output.find("error:") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-ftsim> [doctest args]\n");
        return 2;
    }
    g_ftsim = argv[1];
    std::vector<char*> rest;
    rest.push_back(argv[0]);
    for (int i = 2; i < argc; ++i) rest.push_back(argv[i]);
    doctest::Context ctx(static_cast<int>(rest.size()), rest.data());
    return ctx.run();
}
