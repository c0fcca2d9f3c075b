#ifndef LQLAB_PROCESS_HPP
#define LQLAB_PROCESS_HPP

#include <cstdint>
#include <vector>

#include "lqlab/ensembles.hpp"
#include "lqlab/index_sets.hpp"
#include "lqlab/linalg.hpp"

namespace lqlab {

struct ProcessConfig {
    IndexSetSpec set;
    EnsembleSpec ensemble;
    double q = 2.0;
    std::size_t N = 64;
    std::size_t trials = 1;
    double net_eps = 0.0;  // <= 0: defaults to 0.05 * diam(set)
    // Net growth is additionally capped so high-dimensional spheres do not
    // defeat the packing; the estimate stays a valid lower bound.
    std::size_t net_budget = 2048;
    int ascent_restarts = 8;
    int ascent_steps = 200;
    std::uint64_t seed = 1;
};

// Population side of the deviation: exact m_q ||v||^q for the Gaussian
// family; otherwise a frozen reference batch of 64*N samples shared by all
// evaluations of one trial, so the search objective is deterministic.
class PopulationEvaluator {
public:
    PopulationEvaluator(const EnsembleSpec& spec, double q, std::size_t N,
                        std::uint64_t seed);

    double q_power(const Vec& v) const;       // ~ E|<X,v>|^q
    void q_power_grad(const Vec& v, Vec& grad) const;
    double q_power_std_error(const Vec& v) const;  // 0 for gaussian
    bool exact() const { return exact_; }

private:
    EnsembleSpec spec_;
    double q_;
    bool exact_;
    Matrix reference_;  // empty for gaussian
};

struct SearchAudit {
    std::size_t net_size = 0;
    int restarts = 0;
    double best_net_value = 0.0;
    double ascent_improvement = 0.0;
    double population_std_error = 0.0;
};

struct SupEstimate {
    double value = 0.0;
    Vec argmax;
    double population_q_power = 0.0;  // population term at the argmax
    SearchAudit audit;
};

// (1/N) sum_i |<X_i, v>|^q - pop_q_norm^q.
double empirical_lq_deviation(const SampleBatch& batch, const Vec& v, double q,
                              double pop_q_norm);

// Net evaluation followed by projected (sub)gradient ascent restarts from
// the best net points. A lower estimate of the true supremum; finite sets
// are enumerated exactly.
SupEstimate sup_deviation_estimate(const SampleBatch& batch,
                                   const ProcessConfig& config);

struct TrialSummary {
    std::vector<double> values;       // per-trial sup estimates, by trial
    std::vector<std::uint64_t> trial_seeds;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    ProcessConfig config;
};

// `trials` independent repetitions with derived per-trial seeds. Results
// are keyed by trial index, so the summary is bit-identical for any thread
// count.
TrialSummary run_trials(const ProcessConfig& config, int threads = 1);

// Fraction of trials with value strictly above each threshold.
std::vector<std::pair<double, double>> tail_curve(
    const TrialSummary& summary, const std::vector<double>& thresholds);

double quantile_nearest_rank(std::vector<double> values, double p);

}  // namespace lqlab

#endif  // LQLAB_PROCESS_HPP
