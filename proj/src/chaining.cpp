#include "lqlab/chaining.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lqlab/common.hpp"

namespace lqlab {

int critical_time(std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("critical_time: N must be >= 1");
    return std::bit_width(N) - 1;
}

namespace {

// level cap N_n = 2^(2^n), with |T_0| forced to 1
std::uint64_t level_cap(int n) {
    if (n == 0) return 1;
    if (n >= 6) return std::numeric_limits<std::uint64_t>::max();
    return std::uint64_t{1} << (std::uint64_t{1} << n);
}

}  // namespace

AdmissibleSequence build_admissible_sequence(const std::vector<Vec>& points,
                                             int max_level, Metric metric) {
    if (points.empty())
        throw std::invalid_argument(
            "build_admissible_sequence: empty point set");
    if (max_level < 0 || max_level > 5)
        throw std::invalid_argument(
            "build_admissible_sequence: max_level must be in [0, 5]");

    const std::size_t n = points.size();
    AdmissibleSequence seq;
    seq.metric = metric;
    seq.point_count = n;

    // T_0: the point nearest the centroid, lowest index on ties
    Vec centroid(points[0].size(), 0.0);
    for (const Vec& p : points) axpy(1.0, p, centroid);
    for (double& x : centroid) x /= static_cast<double>(n);
    std::size_t root = 0;
    double best = dist2(points[0], centroid);
    for (std::size_t i = 1; i < n; ++i) {
        const double t = dist2(points[i], centroid);
        if (t < best) {
            best = t;
            root = i;
        }
    }

    std::vector<int> members{static_cast<int>(root)};
    // distance from each point to the current member set
    std::vector<double> min_dist(n);
    for (std::size_t i = 0; i < n; ++i)
        min_dist[i] = dist2(points[i], points[root]);

    seq.levels.push_back(members);
    for (int lvl = 1; lvl <= max_level; ++lvl) {
        const std::uint64_t cap =
            std::min<std::uint64_t>(level_cap(lvl), n);
        while (members.size() < cap) {
            std::size_t arg = 0;
            double far = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (min_dist[i] > far) {
                    far = min_dist[i];
                    arg = i;
                }
            }
            if (far <= 0.0) break;  // every point already in the set
            members.push_back(static_cast<int>(arg));
            for (std::size_t i = 0; i < n; ++i)
                min_dist[i] = std::min(min_dist[i], dist2(points[i], points[arg]));
        }
        seq.levels.push_back(members);
    }

    // nearest-point projections per level, lowest index on ties
    seq.projection.resize(seq.levels.size());
    for (std::size_t lvl = 0; lvl < seq.levels.size(); ++lvl) {
        seq.projection[lvl].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            int arg = seq.levels[lvl][0];
            double d_best = dist2(points[i], points[arg]);
            for (int j : seq.levels[lvl]) {
                const double t = dist2(points[i], points[j]);
                if (t < d_best || (t == d_best && j < arg)) {
                    d_best = t;
                    arg = j;
                }
            }
            seq.projection[lvl][i] = arg;
        }
    }
    return seq;
}

ChainingEstimate gamma2_upper_from_sequence(const AdmissibleSequence& seq,
                                            const std::vector<Vec>& points) {
    if (points.size() != seq.point_count)
        throw std::invalid_argument(
            "gamma2_upper_from_sequence: sequence built over a different "
            "point set");
    double sup = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double s = 0.0;
        for (std::size_t lvl = 0; lvl < seq.levels.size(); ++lvl) {
            const int pi = seq.projection[lvl][i];
            s += std::exp2(0.5 * static_cast<double>(lvl)) *
                 dist2(points[i], points[pi]);
        }
        sup = std::max(sup, s);
    }
    ChainingEstimate est;
    est.value = seq.metric.scale * sup;
    est.method = ChainingEstimate::Method::sequence;
    est.levels = seq.max_level();
    est.metric = seq.metric;
    return est;
}

ChainingEstimate gamma2_upper_dudley(const IndexSetSpec& set, Metric metric,
                                     int eps_levels) {
    if (eps_levels < 2)
        throw std::invalid_argument(
            "gamma2_upper_dudley: eps_levels must be >= 2");
    const double diam = l2_diameter(set);
    ChainingEstimate est;
    est.method = ChainingEstimate::Method::dudley;
    est.levels = eps_levels;
    est.metric = metric;
    if (diam <= 0.0) return est;
    double sum = 0.0;
    for (int k = 0; k <= eps_levels; ++k) {
        const double eps = diam * std::exp2(-static_cast<double>(k));
        sum += std::exp2(-static_cast<double>(k)) *
               std::sqrt(covering_number_log_bound(set, eps));
    }
    est.value = metric.scale * diam * sum;
    return est;
}

ChainDiagnostics chain_diagnostics(const AdmissibleSequence& seq,
                                   const std::vector<Vec>& points,
                                   std::size_t point_index, std::uint64_t N) {
    if (points.size() != seq.point_count || point_index >= points.size())
        throw std::invalid_argument(
            "chain_diagnostics: point not among the sequence's working set");
    ChainDiagnostics diag;
    diag.critical = critical_time(N);
    const double scale = seq.metric.scale;
    const int levels = static_cast<int>(seq.levels.size());
    for (int n = 0; n < levels; ++n) {
        double term;
        if (n == 0) {
            const int p0 = seq.projection[0][point_index];
            term = scale * dist2(points[point_index], points[p0]);
        } else {
            const int pn = seq.projection[n][point_index];
            const int pm = seq.projection[n - 1][point_index];
            term = scale * std::exp2(0.5 * n) * dist2(points[pn], points[pm]);
        }
        if (n <= diag.critical)
            diag.initial_sum += term;
        else
            diag.terminal_sum += term;
    }
    diag.total = diag.initial_sum + diag.terminal_sum;
    return diag;
}

}  // namespace lqlab
