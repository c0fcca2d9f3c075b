#include "lqlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lqlab {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number '" + s + "'");
    }
}

std::uint64_t to_u64(const std::string& s) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer '" + s + "'");
    }
}

int to_int(const std::string& s) { return static_cast<int>(to_u64(s)); }

}  // namespace

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "command=" << command << "\n";
    out << "set=" << set << "\n";
    out << "d=" << d << "\n";
    out << "radius=" << fmt_double(radius) << "\n";
    out << "sparsity=" << sparsity << "\n";
    out << "semiaxes=" << semiaxes << "\n";
    out << "ensemble=" << ensemble << "\n";
    out << "q=" << fmt_double(q) << "\n";
    out << "N=" << N << "\n";
    out << "trials=" << trials << "\n";
    out << "net_eps=" << fmt_double(net_eps) << "\n";
    out << "net_budget=" << net_budget << "\n";
    out << "restarts=" << restarts << "\n";
    out << "steps=" << steps << "\n";
    out << "thresholds=" << thresholds << "\n";
    out << "form=" << form << "\n";
    out << "gamma2=" << fmt_double(gamma2) << "\n";
    out << "diam=" << fmt_double(diam) << "\n";
    out << "u=" << fmt_double(u) << "\n";
    out << "p_moment=" << fmt_double(p_moment) << "\n";
    out << "C=" << fmt_double(C) << "\n";
    out << "n_grid=" << n_grid << "\n";
    out << "q_grid=" << q_grid << "\n";
    out << "quantile=" << fmt_double(quantile) << "\n";
    out << "c_max=" << fmt_double(c_max) << "\n";
    out << "slope_min=" << fmt_double(slope_min) << "\n";
    out << "slope_max=" << fmt_double(slope_max) << "\n";
    out << "R=" << R << "\n";
    out << "theta=" << fmt_double(theta) << "\n";
    out << "window=" << fmt_double(window) << "\n";
    out << "audit=" << audit << "\n";
    out << "mc_budget=" << mc_budget << "\n";
    out << "p=" << fmt_double(p) << "\n";
    out << "matrix_path=" << matrix_path << "\n";
    out << "points=" << points << "\n";
    out << "max_level=" << max_level << "\n";
    out << "metric=" << metric << "\n";
    out << "seed=" << seed << "\n";
    out << "threads=" << threads << "\n";
    out << "out_dir=" << out_dir << "\n";
    out << "assert_mode=" << (assert_mode ? 1 : 0) << "\n";
    return out.str();
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" +
                                        line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "command") cfg.command = val;
        else if (key == "set") cfg.set = val;
        else if (key == "d") cfg.d = to_int(val);
        else if (key == "radius") cfg.radius = to_double(val);
        else if (key == "sparsity") cfg.sparsity = to_int(val);
        else if (key == "semiaxes") cfg.semiaxes = val;
        else if (key == "ensemble") cfg.ensemble = val;
        else if (key == "q") cfg.q = to_double(val);
        else if (key == "N") cfg.N = to_u64(val);
        else if (key == "trials") cfg.trials = to_u64(val);
        else if (key == "net_eps") cfg.net_eps = to_double(val);
        else if (key == "net_budget") cfg.net_budget = to_u64(val);
        else if (key == "restarts") cfg.restarts = to_int(val);
        else if (key == "steps") cfg.steps = to_int(val);
        else if (key == "thresholds") cfg.thresholds = val;
        else if (key == "form") cfg.form = val;
        else if (key == "gamma2") cfg.gamma2 = to_double(val);
        else if (key == "diam") cfg.diam = to_double(val);
        else if (key == "u") cfg.u = to_double(val);
        else if (key == "p_moment") cfg.p_moment = to_double(val);
        else if (key == "C") cfg.C = to_double(val);
        else if (key == "n_grid") cfg.n_grid = val;
        else if (key == "q_grid") cfg.q_grid = val;
        else if (key == "quantile") cfg.quantile = to_double(val);
        else if (key == "c_max") cfg.c_max = to_double(val);
        else if (key == "slope_min") cfg.slope_min = to_double(val);
        else if (key == "slope_max") cfg.slope_max = to_double(val);
        else if (key == "R") cfg.R = val;
        else if (key == "theta") cfg.theta = to_double(val);
        else if (key == "window") cfg.window = to_double(val);
        else if (key == "audit") cfg.audit = to_u64(val);
        else if (key == "mc_budget") cfg.mc_budget = to_u64(val);
        else if (key == "p") cfg.p = to_double(val);
        else if (key == "matrix_path") cfg.matrix_path = val;
        else if (key == "points") cfg.points = to_u64(val);
        else if (key == "max_level") cfg.max_level = to_int(val);
        else if (key == "metric") cfg.metric = val;
        else if (key == "seed") cfg.seed = to_u64(val);
        else if (key == "threads") cfg.threads = to_int(val);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "assert_mode") cfg.assert_mode = to_int(val) != 0;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

const char* kCsvHeader = "trial,N,d,q,statistic,value,seed";

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << kCsvHeader << "\n";
    for (const CsvRow& r : rows) {
        out << r.trial << "," << r.N << "," << r.d << "," << fmt_double(r.q)
            << "," << r.statistic << "," << fmt_double(r.value) << "," << r.seed
            << "\n";
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(to_double(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("matrix csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix csv: empty " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return m;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(to_double(cell));
    return out;
}

// "64:4096:x2" (geometric), "64:512:+64" (arithmetic), or "64,128,256"
std::vector<std::uint64_t> parse_n_grid(const std::string& text) {
    std::vector<std::uint64_t> out;
    if (text.find(':') == std::string::npos) {
        for (double v : parse_double_list(text))
            out.push_back(static_cast<std::uint64_t>(v));
        return out;
    }
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    const std::uint64_t start = to_u64(a);
    const std::uint64_t stop = to_u64(b);
    if (c.empty()) throw std::invalid_argument("n_grid: missing step");
    if (c[0] == 'x') {
        const std::uint64_t f = to_u64(c.substr(1));
        if (f < 2) throw std::invalid_argument("n_grid: factor must be >= 2");
        for (std::uint64_t n = start; n <= stop; n *= f) out.push_back(n);
    } else if (c[0] == '+') {
        const std::uint64_t s = to_u64(c.substr(1));
        if (s == 0) throw std::invalid_argument("n_grid: step must be > 0");
        for (std::uint64_t n = start; n <= stop; n += s) out.push_back(n);
    } else {
        throw std::invalid_argument("n_grid: step must look like x2 or +64");
    }
    if (out.empty()) throw std::invalid_argument("n_grid: empty grid");
    return out;
}

}  // namespace lqlab
