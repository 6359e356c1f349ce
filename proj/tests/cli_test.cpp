// End-to-end checks of the installed binary: exit codes, output
// schemas, and manifest replay. Each case works in its own scratch
// directory under the system temp path.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

fs::path scratch_dir(const std::string& name) {
    const fs::path dir =
        fs::temp_directory_path() / ("searchcap_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CmdResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "cli_output.txt";
    std::ostringstream cmd;
    cmd << "cd " << dir << " && " << SEARCHCAP_CLI_PATH << " " << args << " > "
        << out_file << " 2>&1";
    const int status = std::system(cmd.str().c_str());

    CmdResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// value of a named column in the second line of a CSV
double csv_field(const std::string& csv, const std::string& column) {
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::istringstream hs(header), rs(row);
    std::string name, value;
    while (std::getline(hs, name, ',') && std::getline(rs, value, ','))
        if (name == column) return std::stod(value);
    FAIL("column not found: " << column);
    return 0;
}

}  // namespace

TEST_CASE("analyze reports the reference operating point") {
    const fs::path dir = scratch_dir("analyze");
    const CmdResult res = run_cli(
        "analyze --preset table5-reference --lambda 4 --format csv --out .",
        dir);
    CHECK(res.code == 0);
    CHECK(res.output.find(
              "p,lambda,s_server_s,u_server,r_server_s,r_broker_s,h_p,"
              "r_lower_s,r_upper_s") == 0);
    CHECK(csv_field(res.output, "r_upper_s") ==
          doctest::Approx(0.8663018026576882).epsilon(1e-9));
    CHECK(csv_field(res.output, "u_server") ==
          doctest::Approx(0.3995112).epsilon(1e-6));
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("exit codes distinguish failure classes") {
    const fs::path dir = scratch_dir("codes");

    CHECK(run_cli("analyze --preset table4 --lambda 31", dir).code == 2);
    CHECK(run_cli("size --preset table5-reference --slo-ms 300 "
                  "--total-rate 200",
                  dir)
              .code == 3);
    CHECK(run_cli("analyze --preset no-such-preset --lambda 1", dir).code == 1);
    CHECK(run_cli("analyze --config missing.json --lambda 1", dir).code == 1);
    CHECK(run_cli("--version", dir).code == 0);
}

TEST_CASE("replay reproduces outputs byte for byte") {
    const fs::path dir = scratch_dir("replay");
    REQUIRE(run_cli("analyze --preset table5-4xmem --cpu-speedup 4 "
                    "--disk-speedup 4 --lambda 56 --out run",
                    dir)
                .code == 0);
    const std::string first = slurp(dir / "run" / "report.csv");
    fs::remove(dir / "run" / "report.csv");

    REQUIRE(run_cli("--replay run/manifest.json", dir).code == 0);
    CHECK(slurp(dir / "run" / "report.csv") == first);
}

TEST_CASE("scenario study emits the case table") {
    const fs::path dir = scratch_dir("study");
    const CmdResult res =
        run_cli("scenario --preset paper-case-study --out .", dir);
    CHECK(res.code == 0);
    CHECK(res.output.find("mem+cpu+disk") != std::string::npos);
    CHECK(res.output.find("result-cache") != std::string::npos);
    CHECK(res.output.find("infeasible") != std::string::npos);

    const std::string csv = slurp(dir / "case_study.csv");
    CHECK(csv.find("scenario,profile,cpu_speedup,disk_speedup,r_upper_ms,"
                   "gain,max_rate_qps,replicas") == 0);
    CHECK(csv.find("mem+cpu+disk,4x,4,4,") != std::string::npos);
    CHECK(csv.find(",56,4") != std::string::npos);
    CHECK(csv.find(",65,4") != std::string::npos);
}

TEST_CASE("scenario sweep emits the sweep schema") {
    const fs::path dir = scratch_dir("sweep");
    const CmdResult res = run_cli(
        "scenario --preset table5-reference --sweep-min 1 --sweep-max 11 "
        "--sweep-step 1 --format csv --out .",
        dir);
    CHECK(res.code == 0);
    CHECK(res.output.find("lambda,r_lower_s,r_upper_s,u_server,saturated") ==
          0);
    std::size_t data_rows = 0;
    std::istringstream lines(res.output);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        ++data_rows;
        CHECK(line.back() == '0');  // capacity is ~10.01, nothing saturates
    }
    CHECK(data_rows == 10);
    CHECK(slurp(dir / "sweep.csv") == res.output);
}

TEST_CASE("size command sizes the upgraded cluster") {
    const fs::path dir = scratch_dir("size");
    const CmdResult res = run_cli(
        "size --preset table5-4xmem --cpu-speedup 4 --disk-speedup 4 "
        "--slo-ms 300 --total-rate 200 --out .",
        dir);
    CHECK(res.code == 0);
    CHECK(res.output.find("max_rate_qps     56") != std::string::npos);
    CHECK(res.output.find("replicas         4") != std::string::npos);

    const CmdResult cached = run_cli(
        "size --preset table5-4xmem --cpu-speedup 4 --disk-speedup 4 "
        "--slo-ms 300 --total-rate 200 --cache-hit 0.5 --cache-s-ms 0.069 "
        "--out cached",
        dir);
    CHECK(cached.code == 0);
    CHECK(cached.output.find("max_rate_qps     65") != std::string::npos);
}

TEST_CASE("simulate emits one row per replication") {
    const fs::path dir = scratch_dir("simulate");
    const CmdResult res = run_cli(
        "simulate --p 2 --lambda 10 --s-server-ms 30 --s-broker-ms 0.3 "
        "--horizon 20000 --replications 3 --jobs 3 --seed 5 --out .",
        dir);
    CHECK(res.code == 0);
    CHECK(res.output.find("p,lambda,mode,seed,mean_s,ci_s,util,completed") ==
          0);
    std::size_t rows = 0;
    std::istringstream lines(res.output);
    for (std::string line; std::getline(lines, line);)
        if (line.rfind("2,10,independent,", 0) == 0) ++rows;
    CHECK(rows == 3);

    // seeds are reported in order and reproducible
    const CmdResult again = run_cli(
        "simulate --p 2 --lambda 10 --s-server-ms 30 --s-broker-ms 0.3 "
        "--horizon 20000 --replications 3 --jobs 1 --seed 5 --out again",
        dir);
    CHECK(again.output == res.output);
}

TEST_CASE("characterize writes the full bundle") {
    const fs::path dir = scratch_dir("characterize");
    {
        std::ofstream log(dir / "log.tsv");
        testsupport::Rng rng(21);
        double t = 1041897600000.0;  // a few days of synthetic arrivals
        for (int i = 0; i < 30000; ++i) {
            t += rng.exponential(1000.0 / 0.25);
            log << static_cast<long long>(t) << "\tterm"
                << rng.integer(40) << " term" << rng.integer(40) << "\n";
        }
    }

    const CmdResult res = run_cli(
        "characterize --log log.tsv --window 1d --max-rank 30 --out out",
        dir);
    CHECK(res.code == 0);
    for (const char* name :
         {"stats.txt", "load.csv", "folded.tsv", "zipf.csv",
          "interarrival_fits.csv", "interarrival_cdf.csv", "manifest.json"})
        CHECK(fs::exists(dir / "out" / name));

    CHECK(res.output.find("records                30000") != std::string::npos);
    CHECK(res.output.find("zipf_alpha") != std::string::npos);
    CHECK(res.output.find("busiest_hour_rate_qps") != std::string::npos);
    CHECK(slurp(dir / "out" / "interarrival_fits.csv")
              .find("family,param1,param2,ks,sse,rank") == 0);

    // malformed log: nothing parseable
    std::ofstream(dir / "bad.tsv") << "no tabs at all\n";
    CHECK(run_cli("characterize --log bad.tsv --out out2", dir).code == 1);
}
