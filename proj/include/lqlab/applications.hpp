#ifndef LQLAB_APPLICATIONS_HPP
#define LQLAB_APPLICATIONS_HPP

#include <cstdint>
#include <vector>

#include "lqlab/ensembles.hpp"
#include "lqlab/index_sets.hpp"
#include "lqlab/linalg.hpp"

namespace lqlab {

struct RipQuery {
    EnsembleSpec ensemble;
    IndexSetSpec set;  // the body K
    double q = 2.0;
    std::size_t N = 64;
    double R = 1.0;        // L^q radius of the base set
    bool solve_R = false;  // derive R from the fixed-point condition
    double theta = 1.0;    // fixed-point slope when solving for R
    std::size_t audit_vectors = 1000;
    std::size_t mc_budget = 4096;  // population norms for non-Gaussian X
    std::uint64_t seed = 1;
};

// Empirical two-sided norm-equivalence certificate: for audited vectors w
// in the cone over K cap R S_{L^q}, the ratio
//   N^{-1/q} ||X w||_q / ||<X,w>||_{L^q}
// must stay within [c, 1/c].
struct RipCertificate {
    bool certified = false;
    bool vacuous = false;  // degenerate body, nothing to audit
    double window = 0.5;
    double worst_lower = 0.0;  // min ratio over the audit
    double worst_upper = 0.0;  // max ratio over the audit
    std::vector<double> ratios;
    bool has_violation = false;
    Vec violating_vector;
    double radius_used = 0.0;
    std::size_t audited = 0;
};

RipCertificate rip_certify(const RipQuery& query, double window_c,
                           const Matrix* external_design = nullptr);

struct FixedPointResult {
    double radius = 0.0;
    bool infeasible = false;  // no nonempty slice satisfies the condition
};

// Smallest R with ell_*(K cap (R/m_q^{1/q}) S) + 2 se <= theta R N^{min(1/2,1/q)}
// (Gaussian ensemble only). Feasibility is probed on a dyadic grid and the
// boundary refined by bisection; 0 means the condition holds down to R = 0.
FixedPointResult fixed_point_radius(const IndexSetSpec& K, double q,
                                    std::size_t N, double theta,
                                    std::size_t mc_budget, std::uint64_t seed);

struct SectionSearchParams {
    double net_eps = 0.0;  // <= 0: 0.1 * diam
    std::size_t net_budget = 256;
    int ascent_restarts = 8;
    int ascent_steps = 300;
    std::size_t lambda_candidates = 256;
    int lambda_ascent_steps = 200;
    std::uint64_t seed = 0;  // 0: derived from the batch seed
};

// sup{ ||X v||_q : v in K } with q = p/(p-1), which by duality equals
// sup{ ||X^T lambda||_{K°} : ||lambda||_p = 1 }. The v-side net+ascent
// estimate is returned as the value; the lambda-side search is carried as
// a cross-validation audit.
struct SectionEstimate {
    double value = 0.0;
    Vec argmax;
    double lambda_side = 0.0;
    std::size_t net_size = 0;
    double q = 0.0;
};

SectionEstimate section_diameter(const Matrix& design, const IndexSetSpec& K,
                                 double p, SectionSearchParams params = {});
SectionEstimate section_diameter(const SampleBatch& batch,
                                 const IndexSetSpec& K, double p,
                                 SectionSearchParams params = {});

// Closed-form diameter bound for random sections together with the
// critical dimension below which it applies:
//   p <= 2: C ell_*;   p > 2: C ell_*^{2(p-1)/p} diam^{(2-p)/p};
//   critical dimension C (ell_*/diam)^{min(2, p/(p-1))}.
struct SectionBound {
    double bound = 0.0;
    double critical_dimension = 0.0;
    bool within_critical_dimension = false;
};

SectionBound section_diameter_bound(double ellstar, double diam,
                                    std::size_t N, double p, double C);

// Empirical L^q / L^2 norm equivalence over a vector list.
struct EquivalenceReport {
    double max_l2_over_lq = 0.0;
    double max_lq_over_l2 = 0.0;  // populated when q >= 2
    std::vector<double> l2_over_lq;
};

EquivalenceReport lq_l2_equivalence_check(const EnsembleSpec& spec, double q,
                                          const std::vector<Vec>& vectors,
                                          std::size_t mc_budget,
                                          std::uint64_t seed);

}  // namespace lqlab

#endif  // LQLAB_APPLICATIONS_HPP
