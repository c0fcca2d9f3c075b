#include "lqlab/process.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lqlab/common.hpp"
#include "lqlab/rng.hpp"

namespace lqlab {

namespace {

double mean_abs_q_power(const Matrix& rows, const Vec& v, const PowQ& pw) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows.rows; ++i)
        s += pw.abs_pow(dot(rows.row_span(i), v));
    return s / static_cast<double>(rows.rows);
}

// grad of (1/N) sum |<x_i,v>|^q: (q/N) sum |<x_i,v>|^(q-1) sgn(<x_i,v>) x_i
void mean_abs_q_power_grad(const Matrix& rows, const Vec& v, double q,
                           Vec& grad) {
    const PowQ pw(q - 1.0);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const auto r = rows.row_span(i);
        const double c = pw.signed_pow(dot(r, v));
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < r.size(); ++j) grad[j] += c * r[j];
    }
    const double f = q / static_cast<double>(rows.rows);
    for (double& x : grad) x *= f;
}

void validate_config(const ProcessConfig& cfg) {
    if (cfg.q < 1.0) throw std::invalid_argument("process: q must be >= 1");
    if (cfg.trials < 1)
        throw std::invalid_argument("process: trials must be >= 1");
    if (cfg.N < 1) throw std::invalid_argument("process: N must be >= 1");
    if (cfg.set.dim != cfg.ensemble.dim)
        throw std::invalid_argument("process: set/ensemble dimension mismatch");
}

double effective_net_eps(const ProcessConfig& cfg) {
    if (cfg.net_eps > 0.0) return cfg.net_eps;
    const double d = l2_diameter(cfg.set);
    return d > 0.0 ? 0.05 * d : 1.0;
}

}  // namespace

PopulationEvaluator::PopulationEvaluator(const EnsembleSpec& spec, double q,
                                         std::size_t N, std::uint64_t seed)
    : spec_(spec), q_(q), exact_(spec.family == Family::gaussian) {
    if (!exact_) {
        // fixed common-random-numbers surrogate for E|<X,v>|^q
        const std::size_t budget = 64 * std::max<std::size_t>(N, 1);
        reference_ = sample_batch(spec, budget,
                                  derive_seed(seed, streams::kPopulation))
                         .rows;
    }
}

double PopulationEvaluator::q_power(const Vec& v) const {
    if (exact_) {
        const double n = norm2(v);
        return gaussian_abs_moment(q_) * std::pow(n, q_);
    }
    return mean_abs_q_power(reference_, v, PowQ(q_));
}

void PopulationEvaluator::q_power_grad(const Vec& v, Vec& grad) const {
    if (exact_) {
        const double n = norm2(v);
        grad.assign(v.size(), 0.0);
        if (n < 1e-15) return;
        const double c = gaussian_abs_moment(q_) * q_ * std::pow(n, q_ - 2.0);
        for (std::size_t i = 0; i < v.size(); ++i) grad[i] = c * v[i];
        return;
    }
    mean_abs_q_power_grad(reference_, v, q_, grad);
}

double PopulationEvaluator::q_power_std_error(const Vec& v) const {
    if (exact_) return 0.0;
    const PowQ pw(q_);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < reference_.rows; ++i) {
        const double t = pw.abs_pow(dot(reference_.row_span(i), v));
        sum += t;
        sum_sq += t * t;
    }
    const double n = static_cast<double>(reference_.rows);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return std::sqrt(var / n);
}

double empirical_lq_deviation(const SampleBatch& batch, const Vec& v, double q,
                              double pop_q_norm) {
    if (q < 1.0)
        throw std::invalid_argument("empirical_lq_deviation: q must be >= 1");
    if (v.size() != batch.rows.cols)
        throw std::invalid_argument(
            "empirical_lq_deviation: dimension mismatch");
    return mean_abs_q_power(batch.rows, v, PowQ(q)) - std::pow(pop_q_norm, q);
}

namespace {

struct Objective {
    const Matrix& rows;
    const PopulationEvaluator& pop;
    double q;

    // signed deviation and its absolute value at v
    double deviation(const Vec& v) const {
        return mean_abs_q_power(rows, v, PowQ(q)) - pop.q_power(v);
    }
};

SupEstimate search_sup(const SampleBatch& batch, const ProcessConfig& cfg,
                       const Net& net, const PopulationEvaluator& pop) {
    const Objective obj{batch.rows, pop, cfg.q};
    const bool finite = cfg.set.kind == SetKind::finite_points;

    // candidate list: net points, plus the origin when the class lacks it
    // (the deviation vanishes at 0, so this only normalizes the class)
    std::vector<const Vec*> candidates;
    candidates.reserve(net.points.size() + 1);
    for (const Vec& p : net.points) candidates.push_back(&p);
    Vec origin;
    if (!contains_origin(cfg.set)) {
        origin.assign(cfg.set.dim, 0.0);
        candidates.push_back(&origin);
    }

    SupEstimate best;
    std::vector<std::pair<double, const Vec*>> scored;
    scored.reserve(candidates.size());
    for (const Vec* c : candidates) {
        const double val = std::abs(obj.deviation(*c));
        scored.emplace_back(val, c);
        if (best.argmax.empty() || val > best.value) {
            best.value = val;
            best.argmax = *c;
        }
    }
    best.audit.net_size = net.points.size();
    best.audit.best_net_value = best.value;

    if (finite) {
        best.population_q_power = pop.q_power(best.argmax);
        best.audit.population_std_error = pop.q_power_std_error(best.argmax);
        return best;
    }

    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    const int restarts =
        std::min<int>(cfg.ascent_restarts, static_cast<int>(scored.size()));
    best.audit.restarts = restarts;

    const double step0 = 0.25 * std::max(l2_diameter(cfg.set), 1e-12);
    const int d = cfg.set.dim;
    Vec grad_emp(d), grad_pop(d), grad(d), v(d), v_next(d);

    for (int r = 0; r < restarts; ++r) {
        v = *scored[r].second;
        if (norm2(v) < 1e-15) continue;  // the origin is a stationary start
        double sign = obj.deviation(v) >= 0.0 ? 1.0 : -1.0;
        for (int k = 0; k < cfg.ascent_steps; ++k) {
            mean_abs_q_power_grad(batch.rows, v, cfg.q, grad_emp);
            pop.q_power_grad(v, grad_pop);
            for (int j = 0; j < d; ++j)
                grad[j] = sign * (grad_emp[j] - grad_pop[j]);
            const double gn = norm2(grad);
            if (gn < 1e-14) break;
            const double eta = step0 / std::sqrt(static_cast<double>(k + 1));
            for (int j = 0; j < d; ++j) v_next[j] = v[j] + eta * grad[j] / gn;
            v = project(cfg.set, v_next);
            const double val = std::abs(obj.deviation(v));
            if (val > best.value) {
                best.value = val;
                best.argmax = v;
            }
        }
    }
    best.audit.ascent_improvement = best.value - best.audit.best_net_value;
    best.population_q_power = pop.q_power(best.argmax);
    best.audit.population_std_error = pop.q_power_std_error(best.argmax);
    return best;
}

Net build_search_net(const ProcessConfig& cfg) {
    if (cfg.set.kind == SetKind::finite_points) {
        Net net;
        net.points = cfg.set.points;
        net.eps = 0.0;
        return net;
    }
    return epsilon_net(cfg.set, effective_net_eps(cfg),
                       derive_seed(cfg.seed, streams::kNet), Metric::l2(),
                       cfg.net_budget);
}

}  // namespace

SupEstimate sup_deviation_estimate(const SampleBatch& batch,
                                   const ProcessConfig& cfg) {
    validate_config(cfg);
    const Net net = build_search_net(cfg);
    const PopulationEvaluator pop(cfg.ensemble, cfg.q, cfg.N,
                                  derive_seed(cfg.seed, streams::kPopulation));
    return search_sup(batch, cfg, net, pop);
}

double quantile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty())
        throw std::invalid_argument("quantile: empty value list");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::size_t idx = 0;
    if (p > 0.0)
        idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
    idx = std::min(idx, values.size() - 1);
    return values[idx];
}

TrialSummary run_trials(const ProcessConfig& cfg, int threads) {
    validate_config(cfg);
    const Net net = build_search_net(cfg);

    TrialSummary summary;
    summary.config = cfg;
    summary.values.resize(cfg.trials);
    summary.trial_seeds.resize(cfg.trials);

    const std::uint64_t trial_root = derive_seed(cfg.seed, streams::kTrial);
    auto run_one = [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(trial_root, t);
        const SampleBatch batch = sample_batch(
            cfg.ensemble, cfg.N, derive_seed(trial_seed, streams::kBatch));
        const PopulationEvaluator pop(
            cfg.ensemble, cfg.q, cfg.N,
            derive_seed(trial_seed, streams::kPopulation));
        const SupEstimate est = search_sup(batch, cfg, net, pop);
        summary.values[t] = est.value;
        summary.trial_seeds[t] = trial_seed;
    };

    const int workers = std::max(1, threads);
    if (workers == 1 || cfg.trials < 2) {
        for (std::size_t t = 0; t < cfg.trials; ++t) run_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int count =
            std::min<int>(workers, static_cast<int>(cfg.trials));
        pool.reserve(count);
        for (int w = 0; w < count; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= cfg.trials) return;
                    run_one(t);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    summary.q50 = quantile_nearest_rank(summary.values, 0.5);
    summary.q90 = quantile_nearest_rank(summary.values, 0.9);
    summary.q99 = quantile_nearest_rank(summary.values, 0.99);
    return summary;
}

std::vector<std::pair<double, double>> tail_curve(
    const TrialSummary& summary, const std::vector<double>& thresholds) {
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] < thresholds[i - 1])
            throw std::invalid_argument(
                "tail_curve: thresholds must be sorted ascending");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(thresholds.size());
    const double n = static_cast<double>(summary.values.size());
    for (double thr : thresholds) {
        std::size_t count = 0;
        for (double v : summary.values)
            if (v > thr) ++count;
        curve.emplace_back(thr, static_cast<double>(count) / n);
    }
    return curve;
}

}  // namespace lqlab
