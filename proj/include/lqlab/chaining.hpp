#ifndef LQLAB_CHAINING_HPP
#define LQLAB_CHAINING_HPP

#include <cstdint>
#include <vector>

#include "lqlab/index_sets.hpp"
#include "lqlab/linalg.hpp"

namespace lqlab {

// The unique integer m with 2^m <= N < 2^(m+1); the chain level at which
// the Gaussian-tail regime hands over to the Weibull-tail regime.
int critical_time(std::uint64_t N);

// Nested finite subsets T_0 subset T_1 subset ... of a working point cloud,
// with |T_0| = 1 and |T_n| <= 2^(2^n), plus nearest-point projections
// pi_n for every working point (ties broken by lowest point index).
struct AdmissibleSequence {
    std::vector<std::vector<int>> levels;      // point indices per level
    std::vector<std::vector<int>> projection;  // projection[n][i] in levels[n]
    Metric metric;
    std::size_t point_count = 0;

    int max_level() const { return static_cast<int>(levels.size()) - 1; }
};

// Greedy farthest-point construction. T_0 is the centroid-nearest point;
// each extension repeatedly adds the point farthest from the current set
// until the level cap min(2^(2^n), #points) is reached.
AdmissibleSequence build_admissible_sequence(const std::vector<Vec>& points,
                                             int max_level,
                                             Metric metric = Metric::l2());

struct ChainingEstimate {
    enum class Method { dudley, sequence };
    double value = 0.0;
    Method method = Method::sequence;
    int levels = 0;
    Metric metric;
};

// sup over working points of sum_n 2^(n/2) d(v, T_n): any admissible
// sequence witnesses the infimum, so this is an upper estimate of gamma_2
// of the (finite) cloud.
ChainingEstimate gamma2_upper_from_sequence(const AdmissibleSequence& seq,
                                            const std::vector<Vec>& points);

// Entropy-integral estimate on a dyadic epsilon grid:
// diam * sum_k 2^(-k) sqrt(log N(set, diam 2^(-k))). An upper bound on
// gamma_2 up to an absolute constant.
ChainingEstimate gamma2_upper_dudley(const IndexSetSpec& set,
                                     Metric metric = Metric::l2(),
                                     int eps_levels = 20);

// Weighted chain-link sums for one working point, split at the critical
// time. Term n = 0 is the root distance d(v, T_0); term n >= 1 is
// 2^(n/2) d(pi_n v, pi_{n-1} v). The two sums partition the terms exactly.
struct ChainDiagnostics {
    int critical = 0;
    double initial_sum = 0.0;   // terms with n <= critical
    double terminal_sum = 0.0;  // terms with n > critical
    double total = 0.0;         // initial_sum + terminal_sum
};

ChainDiagnostics chain_diagnostics(const AdmissibleSequence& seq,
                                   const std::vector<Vec>& points,
                                   std::size_t point_index, std::uint64_t N);

}  // namespace lqlab

#endif  // LQLAB_CHAINING_HPP
