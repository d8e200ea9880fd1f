#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const fs::path kDir = fs::temp_directory_path() / "bandtouch_cli_test";

RunResult run_cli(const std::string& args) {
    fs::create_directories(kDir);
    const fs::path out = kDir / "stdout.txt";
    const fs::path err = kDir / "stderr.txt";
    const std::string cmd = std::string(BANDTOUCH_CLI_PATH) + " " + args +
                            " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
#ifdef _WIN32
    r.exit_code = status;
#else
    r.exit_code = WEXITSTATUS(status);
#endif
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST_CASE("evolve prints the transition probability and echoes its config") {
    const RunResult r =
        run_cli("evolve --model gp --n 1 --delta2 0.5 --protocol pl2 --c 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("P = ", 0) == 0);
    CHECK(r.err.find("config:") != std::string::npos);
    CHECK(r.err.find("\"subcommand\":\"evolve\"") != std::string::npos);
}

TEST_CASE("invalid arguments exit with 2") {
    CHECK(run_cli("").exit_code == 2);                       // no subcommand
    CHECK(run_cli("evolve --model nope").exit_code == 2);    // unknown family
    CHECK(run_cli("sweep --model gp").exit_code == 2);       // missing --range
    CHECK(run_cli("evolve --model gl --n 0").exit_code == 2);
    CHECK(run_cli("fis --model gl --range 2:-2:100").exit_code == 2);
}

TEST_CASE("numerical failures exit with 3") {
    const RunResult r = run_cli(
        "evolve --model gl --n 2 --delta1 0.5 --protocol plpos "
        "--epsilon 1e-300 --c 1");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("degenerate") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("sweep --help").exit_code == 0);
}

TEST_CASE("fis writes the sampled profile") {
    const fs::path out = kDir / "fis.csv";
    const RunResult r = run_cli("fis --model gl --n 3 --delta1 1 --range "
                                "-2:2:41 --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("lambda,chi\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 42);
}

TEST_CASE("sweep output is byte-identical across thread counts") {
    const fs::path out1 = kDir / "sweep1.csv";
    const fs::path out4 = kDir / "sweep4.csv";
    const std::string base =
        "sweep --model gp --n 1 --protocol pl2 --c 1 --axis delta "
        "--range 0.2:1:4 ";
    CHECK(run_cli(base + "--threads 1 --out " + out1.string()).exit_code == 0);
    CHECK(run_cli(base + "--threads 4 --out " + out4.string()).exit_code == 0);
    const std::string csv1 = slurp(out1);
    CHECK(csv1 == slurp(out4));
    CHECK(csv1.rfind("axis_value,p\n", 0) == 0);
}

TEST_CASE("phase emits the decomposition as JSON") {
    const RunResult r =
        run_cli("phase --model gp --n 4 --delta2 0.5 --protocol pl2 --c 0.3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"delta_phi\"") != std::string::npos);
    CHECK(r.out.find("\"p_reconstructed\"") != std::string::npos);
}

TEST_CASE("model can be loaded from a JSON config file") {
    const fs::path cfg = kDir / "model.json";
    {
        std::ofstream f(cfg);
        f << R"({"family":"gp","n":1,"delta2":0.5})";
    }
    const RunResult from_cfg =
        run_cli("evolve --config " + cfg.string() + " --protocol pl2 --c 1");
    const RunResult from_flags =
        run_cli("evolve --model gp --n 1 --delta2 0.5 --protocol pl2 --c 1");
    CHECK(from_cfg.exit_code == 0);
    CHECK(from_cfg.out == from_flags.out);

    CHECK(run_cli("evolve --config " + (kDir / "missing.json").string())
              .exit_code == 2);
}

TEST_CASE("oracle-check reports both integrators") {
    const RunResult r = run_cli(
        "oracle-check --model gp --n 1 --delta2 0.5 --protocol pl1 --c 1 "
        "--dt-oracle 2e-4");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("P_cn = ") != std::string::npos);
    CHECK(r.out.find("P_rk4 = ") != std::string::npos);
}
