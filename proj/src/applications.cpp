#include "lqlab/applications.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "lqlab/common.hpp"
#include "lqlab/rng.hpp"

namespace lqlab {

namespace {

// N^{-1/q} ||X w||_q = (mean_i |<x_i, w>|^q)^{1/q}
double scaled_design_norm(const Matrix& X, const Vec& w, double q) {
    const PowQ pw(q);
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i)
        s += pw.abs_pow(dot(X.row_span(i), w));
    s /= static_cast<double>(X.rows);
    return s > 0.0 ? std::pow(s, 1.0 / q) : 0.0;
}

}  // namespace

RipCertificate rip_certify(const RipQuery& query, double window_c,
                           const Matrix* external_design) {
    if (window_c <= 0.0 || window_c >= 1.0)
        throw std::invalid_argument("rip_certify: window must be in (0,1)");
    if (query.audit_vectors < 1)
        throw std::invalid_argument("rip_certify: audit_vectors must be >= 1");
    if (query.q < 1.0)
        throw std::invalid_argument("rip_certify: q must be >= 1");

    RipCertificate cert;
    cert.window = window_c;

    // a degenerate body certifies vacuously: there is nothing to audit
    if (is_empty_set(query.set) || max_l2_norm(query.set) <= 0.0) {
        cert.certified = true;
        cert.vacuous = true;
        cert.worst_lower = 1.0;
        cert.worst_upper = 1.0;
        return cert;
    }

    Matrix design;
    if (external_design != nullptr) {
        if (external_design->cols != static_cast<std::size_t>(query.set.dim))
            throw std::invalid_argument(
                "rip_certify: external design dimension mismatch");
        design = *external_design;
    } else {
        design = sample_batch(query.ensemble, query.N,
                              derive_seed(query.seed, streams::kDesign))
                     .rows;
    }

    const bool gaussian = query.ensemble.family == Family::gaussian;
    SplitRng rng(derive_seed(query.seed, streams::kAudit));

    // base audit points: a coarse net of the L^q sphere slice for Gaussian
    // designs, padded with fresh samples; otherwise samples of K with
    // per-vector Monte Carlo population norms
    std::vector<Vec> base;
    if (gaussian) {
        double R = query.R;
        if (query.solve_R) {
            const FixedPointResult fp =
                fixed_point_radius(query.set, query.q, query.N, query.theta,
                                   query.mc_budget,
                                   derive_seed(query.seed, streams::kFixedPoint));
            R = fp.radius;
        }
        cert.radius_used = R;
        if (R <= 1e-12) {
            // the equivalence then holds on the whole space: audit random
            // unit directions instead of a slice
            for (std::size_t i = 0; i < query.audit_vectors; ++i)
                base.push_back(sample_point(
                    IndexSetSpec::sphere(query.set.dim, 1.0), rng));
        } else {
            const IndexSetSpec slice =
                intersect_lq_sphere(query.set, R, query.q, query.ensemble);
            if (is_empty_set(slice))
                throw invalid_query(
                    "rip_certify: K does not meet the L^q sphere of radius R");
            const double diam = l2_diameter(slice);
            // net points seed the audit; fresh slice samples pad it, so the
            // packing stays cheap for large audit counts
            const std::size_t net_cap =
                std::min<std::size_t>(query.audit_vectors, 256);
            const Net net =
                epsilon_net(slice, std::max(0.25 * diam, 1e-6),
                            derive_seed(query.seed, streams::kNet),
                            Metric::l2(), net_cap);
            for (const Vec& p : net.points)
                if (norm2(p) > 1e-12) base.push_back(p);
            while (base.size() < query.audit_vectors)
                base.push_back(sample_point(slice, rng));
        }
    } else {
        if (query.solve_R)
            throw unsupported_operation(
                "rip_certify: the fixed-point radius needs the Gaussian "
                "slice geometry; pass an explicit R for this family");
        cert.radius_used = query.R;
        for (std::size_t i = 0; i < query.audit_vectors; ++i) {
            Vec v = sample_point(query.set, rng);
            if (norm2(v) > 1e-12) base.push_back(std::move(v));
        }
        if (base.empty()) {
            cert.certified = true;
            cert.vacuous = true;
            cert.worst_lower = 1.0;
            cert.worst_upper = 1.0;
            return cert;
        }
    }

    // cone audit: scales alpha in {1, 2, 4}; the ratio is 0-homogeneous,
    // so the scales exercise cone membership rather than new directions
    static constexpr double kScales[3] = {1.0, 2.0, 4.0};
    cert.worst_lower = std::numeric_limits<double>::infinity();
    cert.worst_upper = 0.0;
    cert.ratios.reserve(base.size());
    const std::uint64_t pop_seed = derive_seed(query.seed, streams::kPopulation);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const Vec w = scaled_vec(base[i], kScales[i % 3]);
        const double emp = scaled_design_norm(design, w, query.q);
        const double pop =
            population_lq_norm(query.ensemble, w, query.q, query.mc_budget,
                               derive_seed(pop_seed, i))
                .value;
        if (pop <= 0.0) continue;
        const double ratio = emp / pop;
        cert.ratios.push_back(ratio);
        cert.worst_lower = std::min(cert.worst_lower, ratio);
        cert.worst_upper = std::max(cert.worst_upper, ratio);
        const bool violates = ratio < window_c || ratio > 1.0 / window_c;
        if (violates && !cert.has_violation) {
            cert.has_violation = true;
            cert.violating_vector = w;
        }
    }
    cert.audited = cert.ratios.size();
    if (cert.audited == 0) {
        cert.certified = true;
        cert.vacuous = true;
        cert.worst_lower = 1.0;
        cert.worst_upper = 1.0;
        return cert;
    }
    cert.certified = !cert.has_violation;
    return cert;
}

FixedPointResult fixed_point_radius(const IndexSetSpec& K, double q,
                                    std::size_t N, double theta,
                                    std::size_t mc_budget,
                                    std::uint64_t seed) {
    if (q < 1.0)
        throw std::invalid_argument("fixed_point_radius: q must be >= 1");
    if (theta <= 0.0)
        throw std::invalid_argument("fixed_point_radius: theta must be > 0");
    if (N < 1) throw std::invalid_argument("fixed_point_radius: N must be >= 1");
    if (mc_budget < 2)
        throw std::invalid_argument("fixed_point_radius: mc_budget too small");

    const EnsembleSpec gauss = EnsembleSpec::gaussian(K.dim);
    const double mq_root = std::pow(gaussian_abs_moment(q), 1.0 / q);
    const double r_hi = mq_root * l2_diameter(K);
    if (r_hi <= 0.0) return {0.0, false};

    const double n_expo =
        std::pow(static_cast<double>(N), std::min(0.5, 1.0 / q));

    auto feasible = [&](double R) {
        const IndexSetSpec slice = intersect_lq_sphere(K, R, q, gauss);
        if (is_empty_set(slice)) return false;
        // deterministic per R: the probe seed is derived from the R bits
        std::uint64_t rbits;
        static_assert(sizeof(double) == sizeof(std::uint64_t));
        std::memcpy(&rbits, &R, sizeof(double));
        const Estimate w = mean_width(slice, mc_budget, derive_seed(seed, rbits));
        return w.value + 2.0 * w.std_error <= theta * R * n_expo;
    };

    // Slices above m_q^{1/q} * max||v|| are empty, so probe downward from
    // the largest nonempty radius. Feasibility is an upper ray in R for
    // star-shaped bodies; the dyadic probes locate the boundary and a
    // bisection refines it.
    const double r_top = mq_root * max_l2_norm(K);
    constexpr int kProbes = 48;
    int last_feasible = -1;  // deepest probe (smallest R) still feasible
    int first_infeasible = -1;
    for (int k = 0; k <= kProbes; ++k) {
        const double R = r_top * std::exp2(-static_cast<double>(k));
        if (feasible(R)) {
            last_feasible = k;
        } else {
            first_infeasible = k;
            break;
        }
    }
    if (first_infeasible < 0) return {0.0, false};  // feasible down to ~0
    if (last_feasible < 0) return {r_hi, true};     // nothing feasible

    double lo = r_top * std::exp2(-static_cast<double>(first_infeasible));
    double hi = r_top * std::exp2(-static_cast<double>(last_feasible));
    for (int it = 0; it < 40 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, false};
}

namespace {

// candidates on the unit p-sphere of R^N for the dual-side audit
std::vector<Vec> lambda_candidates(std::size_t N, double p, std::size_t count,
                                   SplitRng& rng) {
    std::vector<Vec> out;
    const std::size_t axes = std::min<std::size_t>(N, count / 4 + 1);
    for (std::size_t i = 0; i < axes; ++i) {
        Vec e(N, 0.0);
        e[i] = 1.0;
        out.push_back(e);
        Vec m(N, 0.0);
        m[i] = -1.0;
        out.push_back(std::move(m));
    }
    while (out.size() < count) {
        Vec g(N);
        const bool signs = (out.size() % 2) == 0;
        for (std::size_t i = 0; i < N; ++i)
            g[i] = signs ? rng.next_sign() : rng.next_gaussian();
        const double n = norm_p(g, p);
        if (n < 1e-14) continue;
        for (double& x : g) x /= n;
        out.push_back(std::move(g));
    }
    return out;
}

void design_transpose_apply(const Matrix& X, const Vec& lambda, Vec& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double c = lambda[i];
        if (c == 0.0) continue;
        const auto r = X.row_span(i);
        for (std::size_t j = 0; j < r.size(); ++j) out[j] += c * r[j];
    }
}

}  // namespace

SectionEstimate section_diameter(const Matrix& design, const IndexSetSpec& K,
                                 double p, SectionSearchParams params) {
    if (!(p > 1.0))
        throw std::invalid_argument("section_diameter: p must be > 1");
    if (design.cols != static_cast<std::size_t>(K.dim))
        throw std::invalid_argument("section_diameter: dimension mismatch");

    SectionEstimate est;
    est.q = std::isinf(p) ? 1.0 : p / (p - 1.0);
    const double q = est.q;
    if (max_l2_norm(K) <= 0.0) {
        est.argmax.assign(K.dim, 0.0);
        return est;
    }

    // v-side: maximize ||X v||_q over K
    const PowQ pw(q);
    auto norm_q_of = [&](const Vec& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < design.rows; ++i)
            s += pw.abs_pow(dot(design.row_span(i), v));
        return s > 0.0 ? std::pow(s, 1.0 / q) : 0.0;
    };

    std::vector<Vec> candidates;
    if (K.kind == SetKind::finite_points) {
        candidates = K.points;
    } else {
        const double eps = params.net_eps > 0.0 ? params.net_eps
                                                : 0.1 * l2_diameter(K);
        Net net = epsilon_net(K, eps, derive_seed(params.seed, streams::kNet),
                              Metric::l2(), params.net_budget);
        candidates = std::move(net.points);
    }
    est.net_size = candidates.size();

    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double val = norm_q_of(candidates[i]);
        scored.emplace_back(val, i);
        if (val > est.value) {
            est.value = val;
            est.argmax = candidates[i];
        }
    }
    if (est.argmax.empty() && !candidates.empty()) est.argmax = candidates[0];

    if (K.kind != SetKind::finite_points) {
        std::sort(scored.begin(), scored.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        const int restarts = std::min<int>(params.ascent_restarts,
                                           static_cast<int>(scored.size()));
        const double step0 = 0.25 * std::max(l2_diameter(K), 1e-12);
        const int d = K.dim;
        Vec grad(d), v(d), v_next(d);
        const PowQ pw1(q - 1.0);
        for (int r = 0; r < restarts; ++r) {
            v = candidates[scored[r].second];
            if (norm2(v) < 1e-15) continue;
            for (int k = 0; k < params.ascent_steps; ++k) {
                // grad ||Xv||_q = ||Xv||_q^{1-q} sum |<x_i,v>|^{q-1} sgn x_i
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t i = 0; i < design.rows; ++i) {
                    const auto row = design.row_span(i);
                    const double c = pw1.signed_pow(dot(row, v));
                    if (c == 0.0) continue;
                    for (int j = 0; j < d; ++j) grad[j] += c * row[j];
                }
                const double gn = norm2(grad);
                if (gn < 1e-14) break;
                const double eta =
                    step0 / std::sqrt(static_cast<double>(k + 1));
                for (int j = 0; j < d; ++j)
                    v_next[j] = v[j] + eta * grad[j] / gn;
                v = project(K, v_next);
                const double val = norm_q_of(v);
                if (val > est.value) {
                    est.value = val;
                    est.argmax = v;
                }
            }
        }
    }

    // lambda-side audit: sup over a candidate net of S_p^N of h_K(X^T lambda),
    // refined by projected ascent onto the p-sphere
    SplitRng rng(derive_seed(params.seed, streams::kAudit));
    std::vector<Vec> lams =
        lambda_candidates(design.rows, p, params.lambda_candidates, rng);
    Vec xtl(K.dim);
    Vec best_lam;
    for (const Vec& lam : lams) {
        design_transpose_apply(design, lam, xtl);
        const double h = support_value(K, xtl);
        if (h > est.lambda_side) {
            est.lambda_side = h;
            best_lam = lam;
        }
    }
    if (!best_lam.empty()) {
        Vec lam = best_lam;
        Vec glam(design.rows), lam_next(design.rows);
        for (int k = 0; k < params.lambda_ascent_steps; ++k) {
            design_transpose_apply(design, lam, xtl);
            const Vec sp = support_point(K, xtl);
            // grad_lambda h_K(X^T lambda) = X * argmax point
            for (std::size_t i = 0; i < design.rows; ++i)
                glam[i] = dot(design.row_span(i), sp);
            const double gn = norm2(glam);
            if (gn < 1e-14) break;
            const double eta = 0.5 / std::sqrt(static_cast<double>(k + 1));
            for (std::size_t i = 0; i < design.rows; ++i)
                lam_next[i] = lam[i] + eta * glam[i] / gn;
            const double n = norm_p(lam_next, p);
            if (n < 1e-14) break;
            for (std::size_t i = 0; i < design.rows; ++i)
                lam[i] = lam_next[i] / n;
            design_transpose_apply(design, lam, xtl);
            est.lambda_side = std::max(est.lambda_side, support_value(K, xtl));
        }
    }
    return est;
}

SectionEstimate section_diameter(const SampleBatch& batch,
                                 const IndexSetSpec& K, double p,
                                 SectionSearchParams params) {
    if (params.seed == 0) params.seed = derive_seed(batch.seed, streams::kAudit);
    return section_diameter(batch.rows, K, p, params);
}

SectionBound section_diameter_bound(double ellstar, double diam,
                                    std::size_t N, double p, double C) {
    if (!(p > 1.0))
        throw std::invalid_argument("section_diameter_bound: p must be > 1");
    if (ellstar < 0.0 || diam <= 0.0 || C <= 0.0)
        throw std::invalid_argument("section_diameter_bound: bad inputs");
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    SectionBound out;
    if (p <= 2.0) {
        out.bound = C * ellstar;
    } else {
        const double e1 = 2.0 - 2.0 * inv_p;  // 2(p-1)/p
        const double e2 = 2.0 * inv_p - 1.0;  // (2-p)/p
        out.bound = C * std::pow(ellstar, e1) * std::pow(diam, e2);
    }
    const double dual = 1.0 / (1.0 - inv_p);  // p/(p-1)
    out.critical_dimension =
        C * std::pow(ellstar / diam, std::min(2.0, dual));
    out.within_critical_dimension =
        static_cast<double>(N) <= out.critical_dimension;
    return out;
}

EquivalenceReport lq_l2_equivalence_check(const EnsembleSpec& spec, double q,
                                          const std::vector<Vec>& vectors,
                                          std::size_t mc_budget,
                                          std::uint64_t seed) {
    if (q < 1.0)
        throw std::invalid_argument("lq_l2_equivalence_check: q must be >= 1");
    EquivalenceReport rep;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const Vec& v = vectors[i];
        if (norm2(v) <= 0.0) continue;
        const double l2 =
            population_lq_norm(spec, v, 2.0, mc_budget, derive_seed(seed, 2 * i))
                .value;
        const double lq =
            population_lq_norm(spec, v, q, mc_budget,
                               derive_seed(seed, 2 * i + 1))
                .value;
        if (lq <= 0.0 || l2 <= 0.0) continue;
        const double r = l2 / lq;
        rep.l2_over_lq.push_back(r);
        rep.max_l2_over_lq = std::max(rep.max_l2_over_lq, r);
        if (q >= 2.0)
            rep.max_lq_over_l2 = std::max(rep.max_lq_over_l2, lq / l2);
    }
    return rep;
}

}  // namespace lqlab
