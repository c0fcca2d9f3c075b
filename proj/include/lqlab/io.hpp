#ifndef LQLAB_IO_HPP
#define LQLAB_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lqlab/linalg.hpp"

namespace lqlab {

// Flat configuration shared by every subcommand. Serializes to a flat
// key=value text file; parsing that text restores the struct losslessly.
// Command-line flags override file values.
struct RunConfig {
    std::string command;

    // geometry and ensemble
    std::string set = "sphere";
    int d = 2;
    double radius = 1.0;
    int sparsity = 1;
    std::string semiaxes;  // comma-separated for ellipsoids
    std::string ensemble = "gaussian";

    // process
    double q = 2.0;
    std::uint64_t N = 64;
    std::uint64_t trials = 1;
    double net_eps = 0.0;
    std::uint64_t net_budget = 2048;
    int restarts = 8;
    int steps = 200;
    std::string thresholds;  // comma-separated tail thresholds

    // bound evaluation
    std::string form = "tail";
    double gamma2 = 1.0;
    double diam = 1.0;
    double u = 1.0;
    double p_moment = 1.0;
    double C = 1.0;

    // sweeps
    std::string n_grid = "64:4096:x2";
    std::string q_grid = "2";
    double quantile = 0.95;
    double c_max = 100.0;
    double slope_min = -0.65;
    double slope_max = -0.35;

    // applications
    std::string R = "1";
    double theta = 1.0;
    double window = 0.5;
    std::uint64_t audit = 1000;
    std::uint64_t mc_budget = 4096;
    double p = 2.0;
    std::string matrix_path;

    // chaining diagnostics
    std::uint64_t points = 64;
    int max_level = 4;
    std::string metric = "l2";

    // run control
    std::uint64_t seed = 1;
    int threads = 0;  // 0: LQLAB_THREADS env var, else 1
    std::string out_dir = ".";
    bool assert_mode = false;

    std::string serialize() const;
    static RunConfig parse(const std::string& text);

    bool operator==(const RunConfig&) const = default;
};

// long-format experiment rows; header is fixed:
// trial,N,d,q,statistic,value,seed
struct CsvRow {
    long long trial = 0;
    std::uint64_t N = 0;
    int d = 0;
    double q = 0.0;
    std::string statistic;
    double value = 0.0;
    std::uint64_t seed = 0;
};

extern const char* kCsvHeader;

void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

// dense comma-separated matrix, rows = observations
Matrix read_matrix_csv(const std::string& path);

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::uint64_t> parse_n_grid(const std::string& text);

}  // namespace lqlab

#endif  // LQLAB_IO_HPP
