#ifndef LQLAB_ENSEMBLES_HPP
#define LQLAB_ENSEMBLES_HPP

#include <cstdint>
#include <span>
#include <string>

#include "lqlab/linalg.hpp"

namespace lqlab {

enum class Family { gaussian, rademacher, bounded_uniform };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// psi_alpha(x) = 2^(x^alpha) - 1 is the Orlicz function used everywhere in
// this library; all psi_2 constants below are relative to that convention.
//
// For a standard Gaussian g, E psi_2(|g|/c) = 1 solves in closed form:
// E 2^(g^2/c^2) = (1 - 2 ln2 / c^2)^(-1/2) = 2  =>  c = sqrt(8 ln2 / 3).
double psi2_constant_gaussian();

// Isotropic product ensemble for the rows X_i. psi2_constant is the proxy
// constant kappa with ||<X,v>||_psi2 = kappa * ||v||_2; exact for the
// Gaussian family, a dominating upper proxy for the others (every even
// moment of a Rademacher/bounded-uniform marginal is at most the Gaussian
// one, so the Gaussian constant dominates in every direction).
struct EnsembleSpec {
    Family family = Family::gaussian;
    int dim = 1;
    double psi2_constant = 0.0;

    static EnsembleSpec gaussian(int d);
    static EnsembleSpec rademacher(int d);
    static EnsembleSpec bounded_uniform(int d);
};

// N x d block of independent rows. Row i is regenerated from
// derive_seed(seed, i), so the batch is a pure function of (spec, seed, N)
// and any prefix of rows is stable under enlarging N.
struct SampleBatch {
    Matrix rows;
    std::uint64_t seed = 0;
    EnsembleSpec spec;

    std::size_t n() const { return rows.rows; }
    int dim() const { return spec.dim; }
};

SampleBatch sample_batch(const EnsembleSpec& spec, std::size_t n,
                         std::uint64_t seed);

// m_q = E|g|^q for standard Gaussian g: 2^(q/2) Gamma((q+1)/2) / sqrt(pi).
double gaussian_abs_moment(double q);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

// (E |<X,v>|^q)^(1/q). Exact (zero standard error) for the Gaussian family;
// Monte Carlo with a delta-method standard error otherwise.
Estimate population_lq_norm(const EnsembleSpec& spec, const Vec& v, double q,
                            std::size_t mc_budget, std::uint64_t seed);

// kappa * ||v||_2; evaluates the psi_2 distance of <.,u> and <.,w> via
// v = u - w.
double psi2_norm_proxy(const EnsembleSpec& spec, const Vec& v);

// Moment-method proxy: sup over a p-grid in [1, log n] of
// (empirical L^p norm) / p^(1/alpha). A constant-factor estimator, exactly
// homogeneous in the samples; meant for ratio tests only.
double empirical_psi_norm(std::span<const double> samples, double alpha);

}  // namespace lqlab

#endif  // LQLAB_ENSEMBLES_HPP
