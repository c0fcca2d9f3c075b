#ifndef LQLAB_INDEX_SETS_HPP
#define LQLAB_INDEX_SETS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lqlab/ensembles.hpp"
#include "lqlab/linalg.hpp"
#include "lqlab/rng.hpp"

namespace lqlab {

enum class SetKind {
    euclidean_sphere,
    euclidean_ball,
    l1_ball,
    sparse_sphere,
    ellipsoid,
    finite_points,
    scaled,
    lq_sphere_slice,  // K intersected with a centered euclidean sphere
};

// Geometric index set T in R^d; the linear class under study is
// F = { <.,v> : v in T }.
struct IndexSetSpec {
    SetKind kind = SetKind::euclidean_sphere;
    int dim = 1;
    double radius = 1.0;                        // spheres, balls
    int sparsity = 0;                           // sparse_sphere
    std::vector<double> semiaxes;               // ellipsoid
    std::vector<Vec> points;                    // finite_points
    std::shared_ptr<const IndexSetSpec> inner;  // scaled, lq_sphere_slice
    double factor = 1.0;                        // scaled
    double slice_radius = 0.0;                  // lq_sphere_slice

    static IndexSetSpec sphere(int d, double r = 1.0);
    static IndexSetSpec ball(int d, double r = 1.0);
    static IndexSetSpec l1_ball(int d, double r = 1.0);
    static IndexSetSpec sparse_sphere(int d, int s, double r = 1.0);
    static IndexSetSpec ellipsoid(std::vector<double> semiaxes);
    static IndexSetSpec finite(int d, std::vector<Vec> pts);
    static IndexSetSpec scaled(IndexSetSpec base, double factor);
};

std::string set_kind_name(SetKind k);

// Distance used by nets and chaining. psi2_proxy is kappa times euclidean,
// so all geometry reduces to l2 with a scale factor.
struct Metric {
    enum class Kind { l2, psi2_proxy };
    Kind kind = Kind::l2;
    double scale = 1.0;

    static Metric l2() { return {Kind::l2, 1.0}; }
    static Metric psi2(double kappa) { return {Kind::psi2_proxy, kappa}; }
};

struct Net {
    std::vector<Vec> points;
    double eps = 0.0;
    Metric metric;
};

// --- membership / geometry primitives ---------------------------------

bool set_contains(const IndexSetSpec& set, const Vec& v, double tol = 1e-9);
bool contains_origin(const IndexSetSpec& set);
bool is_empty_set(const IndexSetSpec& set);
double max_l2_norm(const IndexSetSpec& set);

// Random point of the set (exactly feasible up to floating rounding).
Vec sample_point(const IndexSetSpec& set, SplitRng& rng);

// Support function h_K(w) = sup{ <v,w> : v in K } and a maximizer.
double support_value(const IndexSetSpec& set, const Vec& w);
Vec support_point(const IndexSetSpec& set, const Vec& w);

// Retraction into the set, used by the ascent searches.
Vec project(const IndexSetSpec& set, const Vec& v);

// --- spec operations ----------------------------------------------------

// Randomized greedy packing: candidates are sampled from the set and kept
// when at least eps away from every kept point, until `streak` consecutive
// rejections (or max_points, when nonzero). Finite sets are packed
// deterministically in point order. The origin is always included when the
// set contains it. A maximal eps-packing is an eps-net, which the audits
// check empirically.
Net epsilon_net(const IndexSetSpec& set, double eps, std::uint64_t seed,
                Metric metric = Metric::l2(), std::size_t max_points = 0,
                int streak = 200);

// Analytic upper bound on log N(set, eps, l2). Volumetric for spheres and
// balls, binomial * volumetric for sparse spheres, min(volumetric, Maurey)
// for l1 balls, log-cardinality for finite sets.
double covering_number_log_bound(const IndexSetSpec& set, double eps);

// Monte Carlo Gaussian mean width: average of h_K(G) over mc_budget draws,
// with the support function evaluated exactly per kind.
Estimate mean_width(const IndexSetSpec& set, std::size_t mc_budget,
                    std::uint64_t seed);

// Exact l2 diameter (max pairwise distance).
double l2_diameter(const IndexSetSpec& set);

// Gaussian family only: { v : ||<X,v>||_{L^q} = R } is the euclidean sphere
// of radius R / m_q^{1/q}, so the result is the slice of `set` at that
// radius. Use is_empty_set() to detect an infeasible radius.
IndexSetSpec intersect_lq_sphere(const IndexSetSpec& set, double R, double q,
                                 const EnsembleSpec& spec);

}  // namespace lqlab

#endif  // LQLAB_INDEX_SETS_HPP
