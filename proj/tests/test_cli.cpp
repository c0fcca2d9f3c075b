#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lqlab/ensembles.hpp"
#include "lqlab/io.hpp"

using namespace lqlab;

namespace {

std::string g_cli_path;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "lqlab_test" /
                     name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("RunConfig round-trips through the key=value format") {
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.set = "sparse_sphere";
    cfg.d = 17;
    cfg.radius = 2.5;
    cfg.sparsity = 3;
    cfg.q = 1.5;
    cfg.N = 333;
    cfg.trials = 12;
    cfg.net_eps = 0.034;
    cfg.seed = 987654321;
    cfg.n_grid = "32:1024:x4";
    cfg.q_grid = "1,2,3";
    cfg.R = "solve";
    cfg.matrix_path = "/tmp/m.csv";
    cfg.assert_mode = true;
    cfg.slope_min = -0.7071067811865476;

    const RunConfig back = RunConfig::parse(cfg.serialize());
    CHECK(back == cfg);

    // defaults also survive
    CHECK(RunConfig::parse(RunConfig{}.serialize()) == RunConfig{});
    CHECK_THROWS_AS(RunConfig::parse("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::parse("zzz=1"), std::invalid_argument);
}

TEST_CASE("n-grid and list parsing") {
    CHECK(parse_n_grid("64:256:x2") ==
          std::vector<std::uint64_t>{64, 128, 256});
    CHECK(parse_n_grid("10:30:+10") ==
          std::vector<std::uint64_t>{10, 20, 30});
    CHECK(parse_n_grid("5,9") == std::vector<std::uint64_t>{5, 9});
    CHECK_THROWS_AS(parse_n_grid("64:256:y2"), std::invalid_argument);
    CHECK(parse_double_list("0.5,1,2").size() == 3);
}

TEST_CASE("csv matrix reader") {
    const auto dir = temp_dir("matrix");
    {
        std::ofstream out(dir / "m.csv");
        out << "1.5,2\n-3,4.25\n0,1\n";
    }
    const Matrix m = read_matrix_csv((dir / "m.csv").string());
    REQUIRE(m.rows == 3);
    REQUIRE(m.cols == 2);
    CHECK(m.at(0, 0) == 1.5);
    CHECK(m.at(1, 1) == 4.25);
    {
        std::ofstream out(dir / "ragged.csv");
        out << "1,2\n3\n";
    }
    CHECK_THROWS(read_matrix_csv((dir / "ragged.csv").string()));
}

TEST_CASE("simulate: artifacts exist, schema holds, reruns are bit-identical") {
    const auto dir = temp_dir("sim");
    const std::string cmd =
        "simulate --set sphere --d 3 --q 2 --N 32 --trials 8 --seed 1 "
        "--steps 30 --net-eps 0.4 --out " + dir.string();
    REQUIRE(run_cli(cmd) == 0);
    const std::string csv1 = slurp(dir / "data.csv");
    const std::string report1 = slurp(dir / "report.json");
    CHECK(csv1.substr(0, csv1.find('\n')) == "trial,N,d,q,statistic,value,seed");

    REQUIRE(run_cli(cmd) == 0);
    CHECK(csv1 == slurp(dir / "data.csv"));
    CHECK(report1 == slurp(dir / "report.json"));
}

TEST_CASE("bound: the unit example evaluates to 4") {
    const auto dir = temp_dir("bound");
    REQUIRE(run_cli("bound --gamma2 1 --diam 1 --N 1 --u 1 --q 2 --C 1 --out " +
                    dir.string()) == 0);
    const std::string report = slurp(dir / "report.json");
    CHECK(report.find("\"value\": 4.0") != std::string::npos);
}

TEST_CASE("LQLAB_THREADS only changes scheduling, never the artifacts") {
    const auto dir = temp_dir("threads");
    const std::string cmd =
        "simulate --set sphere --d 3 --q 2 --N 24 --trials 12 --seed 8 "
        "--steps 20 --net-eps 0.4 --out " + dir.string();
    REQUIRE(run_cli(cmd) == 0);
    const std::string csv1 = slurp(dir / "data.csv");
    const std::string wrapped = "env LQLAB_THREADS=3 " + g_cli_path + " " +
                                cmd + " > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(wrapped.c_str())) == 0);
    CHECK(slurp(dir / "data.csv") == csv1);
}

TEST_CASE("config file values load and flags win") {
    const auto dir = temp_dir("cfg");
    {
        std::ofstream out(dir / "run.cfg");
        RunConfig cfg;
        cfg.command = "bound";
        cfg.gamma2 = 1.0;
        cfg.diam = 1.0;
        cfg.N = 1;
        cfg.q = 2.0;
        cfg.C = 1.0;
        cfg.out_dir = dir.string();
        out << cfg.serialize();
    }
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string()) == 0);
    CHECK(slurp(dir / "report.json").find("\"value\": 4.0") !=
          std::string::npos);

    // a flag overrides the config file value: C doubles the bound
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string() + " --C 2") == 0);
    CHECK(slurp(dir / "report.json").find("\"value\": 8.0") !=
          std::string::npos);
}

TEST_CASE("exit codes: usage errors are 2, failed assertions are 3") {
    CHECK(run_cli("--definitely-not-a-flag") == 2);
    CHECK(run_cli("") == 2);  // no command
    CHECK(run_cli("bound --q 0.2") == 2);

    const auto dir = temp_dir("assert");
    // tiny N: RIP audit reports a violation; --assert maps it to exit 3
    CHECK(run_cli("rip --set sparse_sphere --d 64 --s 3 --q 2 --N 5 "
                  "--audit 300 --window 0.5 --seed 4 --assert --out " +
                  dir.string()) == 3);
    CHECK(run_cli("rip --set sparse_sphere --d 64 --s 3 --q 2 --N 150 "
                  "--audit 300 --window 0.5 --seed 4 --assert --out " +
                  dir.string()) == 0);
}

TEST_CASE("external matrix ingestion matches the library path") {
    const auto dir = temp_dir("matrix_cli");
    const SampleBatch batch = sample_batch(EnsembleSpec::gaussian(6), 24, 77);
    {
        std::ofstream out(dir / "design.csv");
        out.precision(17);
        for (std::size_t i = 0; i < batch.n(); ++i) {
            for (std::size_t j = 0; j < batch.rows.cols; ++j) {
                if (j) out << ",";
                out << batch.rows.at(i, j);
            }
            out << "\n";
        }
    }
    REQUIRE(run_cli("rip --set sparse_sphere --d 6 --s 2 --q 2 --matrix " +
                    (dir / "design.csv").string() + " --audit 100 --seed 3 "
                    "--out " + dir.string()) == 0);
    CHECK(slurp(dir / "report.json").find("\"verdict\"") != std::string::npos);

    REQUIRE(run_cli("sections --set ball --d 6 --p 2 --matrix " +
                    (dir / "design.csv").string() + " --seed 3 --out " +
                    dir.string()) == 0);
    const std::string csv = slurp(dir / "data.csv");
    CHECK(csv.find("section_diameter") != std::string::npos);
    // the reported value parses back to the matrix's top singular value
    // within the search tolerance
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    const auto last_comma = line.rfind(',');
    const auto prev_comma = line.rfind(',', last_comma - 1);
    const double value =
        std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
    CHECK(value > 0.0);
}

TEST_CASE("diag and scaling commands produce reports") {
    const auto dir = temp_dir("diag");
    REQUIRE(run_cli("diag --set sphere --d 3 --points 40 --N 64 --seed 2 "
                    "--max-level 3 --out " +
                    dir.string()) == 0);
    CHECK(slurp(dir / "report.json").find("gamma2_dudley") !=
          std::string::npos);
    CHECK(run_cli("diag --set sphere --d 3 --points 40 --N 64 --seed 2 "
                  "--max-level 3 --assert --out " +
                  dir.string()) == 0);

    const auto dir2 = temp_dir("scaling");
    REQUIRE(run_cli("scaling --set sphere --d 2 --q 2 --N-grid 16:64:x2 "
                    "--trials 30 --steps 20 --restarts 2 --net-eps 0.2 "
                    "--seed 5 --out " +
                    dir2.string()) == 0);
    CHECK(slurp(dir2 / "report.json").find("slope") != std::string::npos);

    const auto dir3 = temp_dir("calibrate");
    REQUIRE(run_cli("calibrate --set sphere --d 2 --q-grid 1,2 "
                    "--N-grid 16:64:x2 --trials 20 --steps 20 --restarts 2 "
                    "--net-eps 0.2 --u 3 --seed 6 --assert --out " +
                    dir3.string()) == 0);
    CHECK(slurp(dir3 / "report.json").find("constants_ok") !=
          std::string::npos);

    const auto dir4 = temp_dir("thresholds");
    REQUIRE(run_cli("simulate --set sphere --d 2 --q 2 --N 16 --trials 10 "
                    "--steps 10 --net-eps 0.3 --thresholds 0,0.5,5 "
                    "--seed 7 --out " +
                    dir4.string()) == 0);
    CHECK(slurp(dir4 / "report.json").find("tail_curve") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[1][0] != '-') g_cli_path = argv[1];
    if (g_cli_path.empty()) {
        // fall back to the sibling binary in the build tree
        g_cli_path = (std::filesystem::path(argv[0]).parent_path().parent_path() /
                      "lqlab")
                         .string();
    }
    doctest::Context ctx;
    ctx.applyCommandLine(argc > 1 ? argc - 1 : argc,
                         argc > 1 ? argv + 1 : argv);
    return ctx.run();
}
