// lqlab: experiments on suprema of L^q empirical deviations over geometric
// index sets, with closed-form bound evaluation, scaling-law fits, RIP
// certification, and random-section diameters. Every artifact embeds the
// config and root seed that produced it.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqlab/applications.hpp"
#include "lqlab/bounds.hpp"
#include "lqlab/chaining.hpp"
#include "lqlab/common.hpp"
#include "lqlab/ensembles.hpp"
#include "lqlab/index_sets.hpp"
#include "lqlab/io.hpp"
#include "lqlab/process.hpp"

using json = nlohmann::ordered_json;
using namespace lqlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssert = 3;

IndexSetSpec build_set(const RunConfig& cfg) {
    if (cfg.set == "sphere") return IndexSetSpec::sphere(cfg.d, cfg.radius);
    if (cfg.set == "ball") return IndexSetSpec::ball(cfg.d, cfg.radius);
    if (cfg.set == "l1_ball") return IndexSetSpec::l1_ball(cfg.d, cfg.radius);
    if (cfg.set == "sparse_sphere")
        return IndexSetSpec::sparse_sphere(cfg.d, cfg.sparsity, cfg.radius);
    if (cfg.set == "ellipsoid") {
        std::vector<double> axes = parse_double_list(cfg.semiaxes);
        if (axes.empty())
            throw std::invalid_argument("ellipsoid needs --semiaxes a,b,...");
        return IndexSetSpec::ellipsoid(std::move(axes));
    }
    throw std::invalid_argument("unknown set kind: " + cfg.set);
}

EnsembleSpec build_ensemble(const RunConfig& cfg) {
    switch (family_from_name(cfg.ensemble)) {
        case Family::gaussian: return EnsembleSpec::gaussian(cfg.d);
        case Family::rademacher: return EnsembleSpec::rademacher(cfg.d);
        case Family::bounded_uniform:
            return EnsembleSpec::bounded_uniform(cfg.d);
    }
    throw std::invalid_argument("unknown ensemble: " + cfg.ensemble);
}

int resolve_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("LQLAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

json config_json(const RunConfig& cfg) {
    json out = json::object();
    std::istringstream in(cfg.serialize());
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq != std::string::npos)
            out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

void write_report(const RunConfig& cfg, json outputs) {
    json report;
    report["command"] = cfg.command;
    report["version"] = kVersion;
    report["seed"] = cfg.seed;
    report["config"] = config_json(cfg);
    report["outputs"] = std::move(outputs);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/report.json");
    if (!out) throw std::runtime_error("cannot write report.json");
    out << report.dump(2) << "\n";
}

void write_rows(const RunConfig& cfg, const std::vector<CsvRow>& rows) {
    std::filesystem::create_directories(cfg.out_dir);
    write_csv(cfg.out_dir + "/data.csv", rows);
}

ProcessConfig make_process_config(const RunConfig& cfg) {
    ProcessConfig pc;
    pc.set = build_set(cfg);
    pc.ensemble = build_ensemble(cfg);
    pc.q = cfg.q;
    pc.N = cfg.N;
    pc.trials = cfg.trials;
    pc.net_eps = cfg.net_eps;
    pc.net_budget = cfg.net_budget;
    pc.ascent_restarts = cfg.restarts;
    pc.ascent_steps = cfg.steps;
    pc.seed = cfg.seed;
    return pc;
}

int cmd_simulate(const RunConfig& cfg) {
    ProcessConfig pc = make_process_config(cfg);
    const TrialSummary summary = run_trials(pc, resolve_threads(cfg));

    std::vector<CsvRow> rows;
    rows.reserve(summary.values.size());
    for (std::size_t t = 0; t < summary.values.size(); ++t)
        rows.push_back({static_cast<long long>(t), cfg.N, cfg.d, cfg.q,
                        "sup_deviation", summary.values[t],
                        summary.trial_seeds[t]});
    write_rows(cfg, rows);

    json out;
    out["trials"] = summary.values.size();
    out["q50"] = summary.q50;
    out["q90"] = summary.q90;
    out["q99"] = summary.q99;
    double mn = summary.values[0], mx = summary.values[0], mean = 0.0;
    for (double v : summary.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        mean += v;
    }
    out["min"] = mn;
    out["max"] = mx;
    out["mean"] = mean / static_cast<double>(summary.values.size());
    bool tail_ok = true;
    if (!cfg.thresholds.empty()) {
        const auto curve = tail_curve(summary, parse_double_list(cfg.thresholds));
        json jc = json::array();
        double prev = 1.0;
        for (const auto& [thr, prob] : curve) {
            jc.push_back({{"threshold", thr}, {"probability", prob}});
            if (prob > prev + 1e-15) tail_ok = false;
            prev = prob;
        }
        out["tail_curve"] = std::move(jc);
    }
    const bool monotone =
        summary.q50 <= summary.q90 && summary.q90 <= summary.q99;
    out["invariants_ok"] = monotone && tail_ok;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !(monotone && tail_ok)) return kExitAssert;
    return kExitOk;
}

int cmd_bound(const RunConfig& cfg) {
    BoundInputs in;
    in.gamma2 = cfg.gamma2;
    in.diam = cfg.diam;
    in.N = cfg.N;
    in.q = cfg.q;
    in.constant = cfg.C;
    BoundReport rep;
    if (cfg.form == "tail") {
        in.u_or_p = cfg.u;
        rep = tail_bound_rhs(in);
    } else if (cfg.form == "moment") {
        in.u_or_p = cfg.p_moment;
        rep = moment_bound_rhs(in);
    } else {
        throw std::invalid_argument("bound: --form must be tail or moment");
    }
    write_rows(cfg, {{0, cfg.N, cfg.d, cfg.q, "bound_value", rep.value,
                      cfg.seed}});
    json out;
    out["form"] = cfg.form;
    out["value"] = rep.value;
    out["term_chaining"] = rep.term_chaining;
    out["term_mixed"] = rep.term_mixed;
    out["term_deviation"] = rep.term_deviation;
    write_report(cfg, std::move(out));
    return kExitOk;
}

int cmd_scaling(const RunConfig& cfg) {
    const std::vector<std::uint64_t> ns = parse_n_grid(cfg.n_grid);
    const std::vector<double> qs = parse_double_list(cfg.q_grid);
    if (ns.size() < 3)
        throw std::invalid_argument("scaling: need at least 3 N values");
    if (qs.empty()) throw std::invalid_argument("scaling: empty q grid");

    std::vector<CsvRow> rows;
    json fits = json::array();
    bool slopes_ok = true;
    for (double q : qs) {
        std::vector<std::pair<double, double>> medians;
        for (std::uint64_t n : ns) {
            RunConfig sub = cfg;
            sub.q = q;
            sub.N = n;
            ProcessConfig pc = make_process_config(sub);
            const TrialSummary s = run_trials(pc, resolve_threads(cfg));
            for (std::size_t t = 0; t < s.values.size(); ++t)
                rows.push_back({static_cast<long long>(t), n, cfg.d, q,
                                "sup_deviation", s.values[t],
                                s.trial_seeds[t]});
            rows.push_back({-1, n, cfg.d, q, "median_sup", s.q50, cfg.seed});
            medians.emplace_back(static_cast<double>(n), s.q50);
        }
        const ScalingFit fit = fit_scaling_exponent(medians);
        if (fit.slope < cfg.slope_min || fit.slope > cfg.slope_max)
            slopes_ok = false;
        json jf;
        jf["q"] = q;
        jf["slope"] = fit.slope;
        jf["intercept"] = fit.intercept;
        jf["r2"] = fit.r2;
        fits.push_back(std::move(jf));
    }
    write_rows(cfg, rows);
    json out;
    out["fits"] = std::move(fits);
    out["slope_window"] = {cfg.slope_min, cfg.slope_max};
    out["slopes_ok"] = slopes_ok;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !slopes_ok) return kExitAssert;
    return kExitOk;
}

int cmd_rip(const RunConfig& cfg) {
    RipQuery query;
    query.ensemble = build_ensemble(cfg);
    query.set = build_set(cfg);
    query.q = cfg.q;
    query.N = cfg.N;
    query.theta = cfg.theta;
    query.audit_vectors = cfg.audit;
    query.mc_budget = cfg.mc_budget;
    query.seed = cfg.seed;
    if (cfg.R == "solve") {
        query.solve_R = true;
    } else {
        query.R = std::stod(cfg.R);
    }

    Matrix external;
    const Matrix* ext = nullptr;
    if (!cfg.matrix_path.empty()) {
        external = read_matrix_csv(cfg.matrix_path);
        ext = &external;
        query.N = external.rows;
    }
    const RipCertificate cert = rip_certify(query, cfg.window, ext);

    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < cert.ratios.size(); ++i)
        rows.push_back({static_cast<long long>(i), query.N, cfg.d, cfg.q,
                        "rip_ratio", cert.ratios[i], cfg.seed});
    write_rows(cfg, rows);

    json out;
    out["verdict"] = cert.certified ? "certified" : "violated";
    out["vacuous"] = cert.vacuous;
    out["window"] = cert.window;
    out["worst_lower_ratio"] = cert.worst_lower;
    out["worst_upper_ratio"] = cert.worst_upper;
    out["radius_used"] = cert.radius_used;
    out["audited"] = cert.audited;
    if (cert.has_violation) out["violating_vector"] = cert.violating_vector;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !cert.certified) return kExitAssert;
    return kExitOk;
}

int cmd_sections(const RunConfig& cfg) {
    const IndexSetSpec K = build_set(cfg);
    std::vector<CsvRow> rows;
    json trials = json::array();
    bool duality_ok = true;

    auto run_one = [&](long long t, const Matrix& X, std::uint64_t seed) {
        SectionSearchParams params;
        params.seed = derive_seed(seed, streams::kAudit);
        const SectionEstimate est = section_diameter(X, K, cfg.p, params);
        rows.push_back({t, X.rows, cfg.d, est.q, "section_diameter", est.value,
                        seed});
        rows.push_back({t, X.rows, cfg.d, est.q, "section_diameter_dual",
                        est.lambda_side, seed});
        json jt;
        jt["trial"] = t;
        jt["value"] = est.value;
        jt["lambda_side"] = est.lambda_side;
        trials.push_back(std::move(jt));
        if (cfg.d <= 4) {
            const double gap = std::abs(est.value - est.lambda_side) /
                               std::max({est.value, est.lambda_side, 1e-12});
            if (gap > 0.05) duality_ok = false;
        }
    };

    if (!cfg.matrix_path.empty()) {
        const Matrix X = read_matrix_csv(cfg.matrix_path);
        run_one(0, X, cfg.seed);
    } else {
        const EnsembleSpec ens = build_ensemble(cfg);
        const std::uint64_t root = derive_seed(cfg.seed, streams::kTrial);
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            const std::uint64_t ts = derive_seed(root, t);
            const SampleBatch batch =
                sample_batch(ens, cfg.N, derive_seed(ts, streams::kBatch));
            run_one(static_cast<long long>(t), batch.rows, ts);
        }
    }
    write_rows(cfg, rows);
    json out;
    out["p"] = cfg.p;
    out["trials"] = std::move(trials);
    out["duality_ok"] = duality_ok;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !duality_ok) return kExitAssert;
    return kExitOk;
}

int cmd_diag(const RunConfig& cfg) {
    const IndexSetSpec set = build_set(cfg);
    const Metric metric =
        cfg.metric == "psi2" ? Metric::psi2(build_ensemble(cfg).psi2_constant)
                             : Metric::l2();
    SplitRng rng(derive_seed(cfg.seed, streams::kAudit));
    std::vector<Vec> pts;
    pts.reserve(cfg.points);
    for (std::uint64_t i = 0; i < cfg.points; ++i)
        pts.push_back(sample_point(set, rng));

    const AdmissibleSequence seq =
        build_admissible_sequence(pts, cfg.max_level, metric);
    const ChainingEstimate g_seq = gamma2_upper_from_sequence(seq, pts);
    const ChainingEstimate g_dud = gamma2_upper_dudley(set, metric);

    bool identities_ok = true;
    std::vector<CsvRow> rows;
    double max_total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const ChainDiagnostics d = chain_diagnostics(seq, pts, i, cfg.N);
        rows.push_back({static_cast<long long>(i), cfg.N, cfg.d, cfg.q,
                        "chain_initial_sum", d.initial_sum, cfg.seed});
        rows.push_back({static_cast<long long>(i), cfg.N, cfg.d, cfg.q,
                        "chain_terminal_sum", d.terminal_sum, cfg.seed});
        rows.push_back({static_cast<long long>(i), cfg.N, cfg.d, cfg.q,
                        "chain_total", d.total, cfg.seed});
        if (d.initial_sum + d.terminal_sum != d.total) identities_ok = false;
        max_total = std::max(max_total, d.total);
    }
    // admissibility re-check
    if (seq.levels.front().size() != 1) identities_ok = false;
    for (std::size_t lvl = 1; lvl < seq.levels.size(); ++lvl) {
        for (std::size_t k = 0; k < seq.levels[lvl - 1].size(); ++k)
            if (seq.levels[lvl - 1][k] != seq.levels[lvl][k])
                identities_ok = false;
    }
    write_rows(cfg, rows);

    json out;
    out["points"] = pts.size();
    out["critical_time"] = critical_time(cfg.N);
    out["gamma2_sequence"] = g_seq.value;
    out["gamma2_dudley"] = g_dud.value;
    out["max_chain_total"] = max_total;
    out["identities_ok"] = identities_ok;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !identities_ok) return kExitAssert;
    return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg) {
    const std::vector<std::uint64_t> ns = parse_n_grid(cfg.n_grid);
    const std::vector<double> qs = parse_double_list(cfg.q_grid);
    if (ns.empty() || qs.empty())
        throw std::invalid_argument("calibrate: empty sweep grid");

    const IndexSetSpec set = build_set(cfg);
    const EnsembleSpec ens = build_ensemble(cfg);
    const Metric psi2 = Metric::psi2(ens.psi2_constant);
    const double gamma2 = gamma2_upper_dudley(set, psi2).value;
    const double diam = ens.psi2_constant * l2_diameter(set);

    std::vector<CsvRow> rows;
    json per_q = json::array();
    bool ok = true;
    for (double q : qs) {
        std::vector<std::pair<BoundInputs, double>> observed;
        for (std::uint64_t n : ns) {
            RunConfig sub = cfg;
            sub.q = q;
            sub.N = n;
            ProcessConfig pc = make_process_config(sub);
            const TrialSummary s = run_trials(pc, resolve_threads(cfg));
            const double quant = quantile_nearest_rank(s.values, cfg.quantile);
            BoundInputs in;
            in.gamma2 = gamma2;
            in.diam = diam;
            in.N = n;
            in.q = q;
            in.u_or_p = cfg.u;
            observed.emplace_back(in, quant);
            rows.push_back({-1, n, cfg.d, q, "quantile_sup", quant, cfg.seed});
        }
        const Calibration cal = calibrate_constant(observed, BoundForm::tail);
        if (cal.infeasible || cal.constant > cfg.c_max) ok = false;
        json jq;
        jq["q"] = q;
        jq["constant"] = cal.constant;
        jq["infeasible"] = cal.infeasible;
        per_q.push_back(std::move(jq));
        rows.push_back({-1, 0, cfg.d, q, "calibrated_constant", cal.constant,
                        cfg.seed});
    }
    write_rows(cfg, rows);
    json out;
    out["gamma2_psi2"] = gamma2;
    out["diam_psi2"] = diam;
    out["u"] = cfg.u;
    out["quantile"] = cfg.quantile;
    out["per_q"] = std::move(per_q);
    out["constants_ok"] = ok;
    write_report(cfg, std::move(out));
    if (cfg.assert_mode && !ok) return kExitAssert;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // config file first, flags override
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) {
                std::cerr << "cannot open config file " << argv[i + 1] << "\n";
                return kExitConfig;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                cfg = RunConfig::parse(ss.str());
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kExitConfig;
            }
        }
    }

    CLI::App app{"experiments on L^q empirical deviations over geometric "
                 "index sets"};
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--set", cfg.set, "sphere|ball|l1_ball|sparse_sphere|ellipsoid");
    app.add_option("--d", cfg.d, "ambient dimension");
    app.add_option("--radius", cfg.radius, "set radius");
    app.add_option("--s,--sparsity", cfg.sparsity, "sparsity of sparse_sphere");
    app.add_option("--semiaxes", cfg.semiaxes, "ellipsoid semiaxes a,b,...");
    app.add_option("--ensemble", cfg.ensemble,
                   "gaussian|rademacher|bounded_uniform");
    app.add_option("--q", cfg.q, "power of the process");
    app.add_option("--N", cfg.N, "sample count");
    app.add_option("--trials", cfg.trials, "Monte Carlo trials");
    app.add_option("--net-eps", cfg.net_eps, "net resolution (0 = auto)");
    app.add_option("--net-budget", cfg.net_budget, "max net points");
    app.add_option("--restarts", cfg.restarts, "ascent restarts");
    app.add_option("--steps", cfg.steps, "ascent steps");
    app.add_option("--thresholds", cfg.thresholds, "tail thresholds t1,t2,...");
    app.add_option("--form", cfg.form, "bound form: tail|moment");
    app.add_option("--gamma2", cfg.gamma2, "chaining functional input");
    app.add_option("--diam", cfg.diam, "diameter input");
    app.add_option("--u", cfg.u, "tail parameter");
    app.add_option("--p-moment", cfg.p_moment, "moment order");
    app.add_option("--C", cfg.C, "bound constant");
    app.add_option("--N-grid", cfg.n_grid, "N sweep, e.g. 64:4096:x2");
    app.add_option("--q-grid", cfg.q_grid, "q sweep, e.g. 1,1.5,2,3");
    app.add_option("--quantile", cfg.quantile, "calibration quantile");
    app.add_option("--c-max", cfg.c_max, "assert ceiling for constants");
    app.add_option("--slope-min", cfg.slope_min, "assert floor for slopes");
    app.add_option("--slope-max", cfg.slope_max, "assert ceiling for slopes");
    app.add_option("--R", cfg.R, "L^q radius, or 'solve'");
    app.add_option("--theta", cfg.theta, "fixed-point slope");
    app.add_option("--window", cfg.window, "RIP ratio window c in (0,1)");
    app.add_option("--audit", cfg.audit, "audit vector count");
    app.add_option("--mc-budget", cfg.mc_budget, "Monte Carlo budget");
    app.add_option("--p", cfg.p, "dual exponent for sections (p > 1)");
    app.add_option("--matrix", cfg.matrix_path, "external design matrix CSV");
    app.add_option("--points", cfg.points, "working points for diag");
    app.add_option("--max-level", cfg.max_level, "admissible sequence depth");
    app.add_option("--metric", cfg.metric, "l2|psi2");
    app.add_option("--seed", cfg.seed, "root seed");
    app.add_option("--threads", cfg.threads, "worker threads (0 = env)");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_flag("--assert", cfg.assert_mode,
                 "turn run-level checks into the exit code");

    for (const char* name :
         {"simulate", "bound", "scaling", "rip", "sections", "diag",
          "calibrate"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    if (!app.get_subcommands().empty())
        cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command.empty()) {
        std::cerr << app.help() << "\n";
        return kExitConfig;
    }

    try {
        if (cfg.command == "simulate") return cmd_simulate(cfg);
        if (cfg.command == "bound") return cmd_bound(cfg);
        if (cfg.command == "scaling") return cmd_scaling(cfg);
        if (cfg.command == "rip") return cmd_rip(cfg);
        if (cfg.command == "sections") return cmd_sections(cfg);
        if (cfg.command == "diag") return cmd_diag(cfg);
        if (cfg.command == "calibrate") return cmd_calibrate(cfg);
        std::cerr << "unknown command: " << cfg.command << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
