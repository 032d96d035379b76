#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "csc/bench.hpp"
#include "csc/cli.hpp"
#include "csc/io.hpp"

using namespace csc;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const char *kTmp = "/tmp/csc_cli_test";

} // namespace

TEST_CASE("bound prints M^2 for alpha = 0") {
    const CliResult r = cli({"bound", "--alpha", "0", "--m", "4"});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "16\n");
}

TEST_CASE("bound table mode lists expansion values and hypothesis flags") {
    const CliResult r = cli({"bound", "--alpha", "0.05", "--m", "4", "--m", "8", "--table"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("expansion=") != std::string::npos);
    CHECK(r.out.find("hypothesis alpha*M < 1/4 violated") != std::string::npos);
}

TEST_CASE("unknown flags exit with code 1 and usage text") {
    const CliResult r = cli({"bound", "--frobnicate"});
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());
    const CliResult r2 = cli({"no-such-command"});
    CHECK(r2.exit_code == 1);
}

TEST_CASE("generate writes byte-identical files for a fixed seed") {
    const std::string p1 = std::string(kTmp) + "_a";
    const std::string p2 = std::string(kTmp) + "_b";
    const std::vector<std::string> base = {"generate", "--T",   "400", "--W",
                                           "10",       "--K",  "3",   "--P",
                                           "2",        "--seed", "7"};
    auto args1 = base;
    args1.push_back("--out");
    args1.push_back(p1);
    auto args2 = base;
    args2.push_back("--out");
    args2.push_back(p2);
    REQUIRE(cli(args1).exit_code == 0);
    REQUIRE(cli(args2).exit_code == 0);
    for (const char *suffix : {"_signal.csc1", "_dict.csc1", "_code.csc1"})
        CHECK(slurp(p1 + suffix) == slurp(p2 + suffix));
}

TEST_CASE("solve loads CSC1 files and emits trace and update-log CSVs") {
    const std::string prefix = std::string(kTmp) + "_solve";
    REQUIRE(cli({"generate", "--T", "400", "--W", "10", "--K", "3", "--P", "2", "--seed",
                 "3", "--out", prefix})
                .exit_code == 0);
    const std::string trace = prefix + "_trace.csv";
    const std::string log = prefix + "_log.csv";
    const std::string code = prefix + "_sol.csc1";
    const CliResult r =
        cli({"solve", "--signal", prefix + "_signal.csc1", "--dict", prefix + "_dict.csc1",
             "--solver-lambda-scale", "0.1", "--solver", "greedy", "--eps", "1e-6",
             "--trace", trace, "--update-log", log, "--code-out", code});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("converged=yes") != std::string::npos);

    std::ifstream tf(trace);
    std::string header;
    std::getline(tf, header);
    CHECK(header == "solver,updates,seconds,cost");

    std::ifstream lf(log);
    std::getline(lf, header);
    CHECK(header == "round,worker,k,t,old,new,interfering");

    const SparseCode sol = load_csc1_code(code);
    CHECK(sol.num_atoms() == 3);
}

TEST_CASE("solve with mismatched file flags exits 1") {
    const CliResult r = cli({"solve", "--signal", "/tmp/nope.csc1"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("configuration error") != std::string::npos);
}

TEST_CASE("dicod solve with an oversized M exits 1") {
    const std::string prefix = std::string(kTmp) + "_bigm";
    REQUIRE(cli({"generate", "--T", "200", "--W", "20", "--K", "2", "--P", "1", "--seed",
                 "5", "--out", prefix})
                .exit_code == 0);
    const CliResult r =
        cli({"solve", "--signal", prefix + "_signal.csc1", "--dict", prefix + "_dict.csc1",
             "--solver-lambda", "1.0", "--solver", "dicod", "--M", "50"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("segment") != std::string::npos);
}

TEST_CASE("check h1 reports the worst coherence") {
    const CliResult r = cli({"check", "h1", "--T", "300", "--W", "10", "--K", "3", "--P",
                             "2", "--seed", "11"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("H1 holds") != std::string::npos);
    CHECK(r.out.find("worst coherence=") != std::string::npos);
}

TEST_CASE("bench compare writes the pinned trajectory schema") {
    const std::string out_csv = std::string(kTmp) + "_cmp.csv";
    const CliResult r = cli({"bench", "compare", "--T", "400", "--W", "10", "--K", "3",
                             "--P", "2", "--seed", "2", "--eps", "1e-5", "--seq-M", "2",
                             "--dicod-M", "2", "--baseline-iters", "20000", "--out",
                             out_csv});
    CHECK(r.exit_code == 0);
    std::ifstream f(out_csv);
    std::string header;
    std::getline(f, header);
    CHECK(header == "solver,updates,seconds,cost");
    int64_t rows = 0;
    std::string line;
    while (std::getline(f, line)) rows += line.empty() ? 0 : 1;
    CHECK(rows > 4);
}

TEST_CASE("config files supply key=value options") {
    const std::string cfg = std::string(kTmp) + "_conf.ini";
    {
        std::ofstream f(cfg);
        f << "# tiny instance\n[generate]\nT=300\nW=10\nK=2\nP=1\nseed=21\n";
    }
    const std::string prefix = std::string(kTmp) + "_fromcfg";
    const CliResult r = cli({"--config", cfg, "generate", "--out", prefix});
    CHECK(r.exit_code == 0);
    const Signal x = load_csc1_signal(prefix + "_signal.csc1");
    CHECK(x.length() == 300);
    CHECK(x.channels() == 1);
}

TEST_CASE("help exits 0") {
    CHECK(cli({"--help"}).exit_code == 0);
    CHECK(cli({"solve", "--help"}).exit_code == 0);
}
