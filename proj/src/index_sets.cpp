#include "lqlab/index_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lqlab/common.hpp"

namespace lqlab {

namespace {

constexpr double kFeasTol = 1e-12;

void require_dim(int d) {
    if (d <= 0) throw std::invalid_argument("index set: dimension must be >= 1");
}

double top_s_sumsq(const Vec& w, int s) {
    // sum of the s largest squared entries
    std::vector<double> sq(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) sq[i] = w[i] * w[i];
    const std::size_t k = std::min<std::size_t>(s, sq.size());
    std::partial_sort(sq.begin(), sq.begin() + k, sq.end(),
                      std::greater<double>());
    return std::accumulate(sq.begin(), sq.begin() + k, 0.0);
}

std::vector<int> top_s_indices(const Vec& w, int s) {
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t k = std::min<std::size_t>(s, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int a, int b) {
                          const double ma = std::abs(w[a]), mb = std::abs(w[b]);
                          if (ma != mb) return ma > mb;
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

}  // namespace

std::string set_kind_name(SetKind k) {
    switch (k) {
        case SetKind::euclidean_sphere: return "sphere";
        case SetKind::euclidean_ball: return "ball";
        case SetKind::l1_ball: return "l1_ball";
        case SetKind::sparse_sphere: return "sparse_sphere";
        case SetKind::ellipsoid: return "ellipsoid";
        case SetKind::finite_points: return "finite";
        case SetKind::scaled: return "scaled";
        case SetKind::lq_sphere_slice: return "lq_sphere_slice";
    }
    return "unknown";
}

IndexSetSpec IndexSetSpec::sphere(int d, double r) {
    require_dim(d);
    if (r <= 0.0) throw std::invalid_argument("sphere: radius must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::euclidean_sphere;
    s.dim = d;
    s.radius = r;
    return s;
}

IndexSetSpec IndexSetSpec::ball(int d, double r) {
    require_dim(d);
    if (r <= 0.0) throw std::invalid_argument("ball: radius must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::euclidean_ball;
    s.dim = d;
    s.radius = r;
    return s;
}

IndexSetSpec IndexSetSpec::l1_ball(int d, double r) {
    require_dim(d);
    if (r <= 0.0) throw std::invalid_argument("l1_ball: radius must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::l1_ball;
    s.dim = d;
    s.radius = r;
    return s;
}

IndexSetSpec IndexSetSpec::sparse_sphere(int d, int sp, double r) {
    require_dim(d);
    if (sp < 1 || sp > d)
        throw std::invalid_argument("sparse_sphere: need 1 <= s <= d");
    if (r <= 0.0)
        throw std::invalid_argument("sparse_sphere: radius must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::sparse_sphere;
    s.dim = d;
    s.sparsity = sp;
    s.radius = r;
    return s;
}

IndexSetSpec IndexSetSpec::ellipsoid(std::vector<double> semiaxes) {
    if (semiaxes.empty())
        throw std::invalid_argument("ellipsoid: semiaxes must be nonempty");
    for (double a : semiaxes)
        if (a <= 0.0)
            throw std::invalid_argument("ellipsoid: semiaxes must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::ellipsoid;
    s.dim = static_cast<int>(semiaxes.size());
    s.semiaxes = std::move(semiaxes);
    return s;
}

IndexSetSpec IndexSetSpec::finite(int d, std::vector<Vec> pts) {
    require_dim(d);
    for (const Vec& p : pts)
        if (static_cast<int>(p.size()) != d)
            throw std::invalid_argument("finite: point dimension mismatch");
    IndexSetSpec s;
    s.kind = SetKind::finite_points;
    s.dim = d;
    s.points = std::move(pts);
    return s;
}

IndexSetSpec IndexSetSpec::scaled(IndexSetSpec base, double f) {
    if (f <= 0.0) throw std::invalid_argument("scaled: factor must be > 0");
    IndexSetSpec s;
    s.kind = SetKind::scaled;
    s.dim = base.dim;
    s.factor = f;
    s.inner = std::make_shared<IndexSetSpec>(std::move(base));
    return s;
}

bool set_contains(const IndexSetSpec& set, const Vec& v, double tol) {
    if (static_cast<int>(v.size()) != set.dim) return false;
    const double atol = tol * std::max(1.0, max_l2_norm(set));
    switch (set.kind) {
        case SetKind::euclidean_sphere:
            return std::abs(norm2(v) - set.radius) <= atol;
        case SetKind::euclidean_ball:
            return norm2(v) <= set.radius + atol;
        case SetKind::l1_ball:
            return norm1(v) <= set.radius + atol;
        case SetKind::sparse_sphere: {
            int nz = 0;
            for (double x : v)
                if (std::abs(x) > 1e-12 * set.radius) ++nz;
            return nz <= set.sparsity &&
                   std::abs(norm2(v) - set.radius) <= atol;
        }
        case SetKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < set.dim; ++i) {
                const double t = v[i] / set.semiaxes[i];
                s += t * t;
            }
            return s <= 1.0 + tol;
        }
        case SetKind::finite_points: {
            for (const Vec& p : set.points)
                if (dist2(v, p) <= atol) return true;
            return false;
        }
        case SetKind::scaled:
            return set_contains(*set.inner, scaled_vec(v, 1.0 / set.factor),
                                tol);
        case SetKind::lq_sphere_slice:
            return set_contains(*set.inner, v, tol) &&
                   std::abs(norm2(v) - set.slice_radius) <= atol;
    }
    return false;
}

bool contains_origin(const IndexSetSpec& set) {
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::sparse_sphere:
            return false;  // radius > 0 by construction
        case SetKind::euclidean_ball:
        case SetKind::l1_ball:
        case SetKind::ellipsoid:
            return true;
        case SetKind::finite_points:
            for (const Vec& p : set.points)
                if (norm2(p) <= kFeasTol) return true;
            return false;
        case SetKind::scaled:
            return contains_origin(*set.inner);
        case SetKind::lq_sphere_slice:
            return set.slice_radius <= kFeasTol && contains_origin(*set.inner);
    }
    return false;
}

bool is_empty_set(const IndexSetSpec& set) {
    switch (set.kind) {
        case SetKind::finite_points:
            return set.points.empty();
        case SetKind::scaled:
            return is_empty_set(*set.inner);
        case SetKind::lq_sphere_slice: {
            const IndexSetSpec& in = *set.inner;
            const double rho = set.slice_radius;
            const double reach = max_l2_norm(in);
            switch (in.kind) {
                case SetKind::euclidean_sphere:
                case SetKind::sparse_sphere:
                    return std::abs(rho - in.radius) >
                           1e-9 * std::max(1.0, in.radius);
                case SetKind::euclidean_ball:
                case SetKind::l1_ball:
                case SetKind::ellipsoid:
                    // solid bodies containing 0 reach every norm up to the max
                    return rho > reach * (1.0 + 1e-12);
                case SetKind::finite_points: {
                    for (const Vec& p : in.points)
                        if (std::abs(norm2(p) - rho) <=
                            1e-9 * std::max(1.0, rho))
                            return false;
                    return true;
                }
                default:
                    return rho > reach * (1.0 + 1e-12);
            }
        }
        default:
            return false;
    }
}

double max_l2_norm(const IndexSetSpec& set) {
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::euclidean_ball:
            return set.radius;
        case SetKind::l1_ball:
            return set.radius;  // attained at the vertices
        case SetKind::sparse_sphere:
            return set.radius;
        case SetKind::ellipsoid:
            return *std::max_element(set.semiaxes.begin(), set.semiaxes.end());
        case SetKind::finite_points: {
            double m = 0.0;
            for (const Vec& p : set.points) m = std::max(m, norm2(p));
            return m;
        }
        case SetKind::scaled:
            return set.factor * max_l2_norm(*set.inner);
        case SetKind::lq_sphere_slice:
            return is_empty_set(set) ? 0.0 : set.slice_radius;
    }
    return 0.0;
}

Vec sample_point(const IndexSetSpec& set, SplitRng& rng) {
    const int d = set.dim;
    switch (set.kind) {
        case SetKind::euclidean_sphere: {
            for (;;) {
                Vec v(d);
                for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
                const double n = norm2(v);
                if (n < 1e-14) continue;
                for (double& x : v) x *= set.radius / n;
                return v;
            }
        }
        case SetKind::euclidean_ball: {
            IndexSetSpec sph = IndexSetSpec::sphere(d, set.radius);
            Vec v = sample_point(sph, rng);
            const double t = std::pow(rng.next_unit(), 1.0 / d);
            for (double& x : v) x *= t;
            return v;
        }
        case SetKind::l1_ball: {
            // cone-measure direction on the l1 sphere, then radial factor
            for (;;) {
                Vec v(d);
                for (int i = 0; i < d; ++i)
                    v[i] = rng.next_sign() * (-std::log(rng.next_unit_pos()));
                const double n = norm1(v);
                if (n < 1e-14) continue;
                const double t =
                    set.radius * std::pow(rng.next_unit(), 1.0 / d) / n;
                for (double& x : v) x *= t;
                return v;
            }
        }
        case SetKind::sparse_sphere: {
            for (;;) {
                Vec v(d, 0.0);
                // partial Fisher-Yates for s distinct coordinates
                std::vector<int> idx(d);
                std::iota(idx.begin(), idx.end(), 0);
                for (int k = 0; k < set.sparsity; ++k) {
                    const int j = k + static_cast<int>(rng.next_below(
                                          static_cast<std::uint64_t>(d - k)));
                    std::swap(idx[k], idx[j]);
                    v[idx[k]] = rng.next_gaussian();
                }
                double ssq = 0.0;
                for (int k = 0; k < set.sparsity; ++k)
                    ssq += v[idx[k]] * v[idx[k]];
                if (ssq < 1e-28) continue;
                const double c = set.radius / std::sqrt(ssq);
                for (int k = 0; k < set.sparsity; ++k) v[idx[k]] *= c;
                return v;
            }
        }
        case SetKind::ellipsoid: {
            IndexSetSpec b = IndexSetSpec::ball(d, 1.0);
            Vec v = sample_point(b, rng);
            for (int i = 0; i < d; ++i) v[i] *= set.semiaxes[i];
            return v;
        }
        case SetKind::finite_points: {
            if (set.points.empty())
                throw invalid_query("sample_point: empty finite set");
            return set.points[rng.next_below(set.points.size())];
        }
        case SetKind::scaled: {
            Vec v = sample_point(*set.inner, rng);
            for (double& x : v) x *= set.factor;
            return v;
        }
        case SetKind::lq_sphere_slice: {
            if (is_empty_set(set))
                throw invalid_query("sample_point: empty slice");
            const double rho = set.slice_radius;
            for (int attempt = 0; attempt < 100000; ++attempt) {
                Vec v = sample_point(*set.inner, rng);
                const double n = norm2(v);
                if (n < 1e-14) continue;
                for (double& x : v) x *= rho / n;
                if (set_contains(*set.inner, v)) return v;
            }
            throw invalid_query("sample_point: slice sampling failed");
        }
    }
    throw unsupported_operation("sample_point: unknown set kind");
}

double support_value(const IndexSetSpec& set, const Vec& w) {
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::euclidean_ball:
            return set.radius * norm2(w);
        case SetKind::l1_ball:
            return set.radius * norm_inf(w);
        case SetKind::sparse_sphere:
            return set.radius * std::sqrt(top_s_sumsq(w, set.sparsity));
        case SetKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < set.dim; ++i) {
                const double t = set.semiaxes[i] * w[i];
                s += t * t;
            }
            return std::sqrt(s);
        }
        case SetKind::finite_points: {
            if (set.points.empty())
                throw invalid_query("support_value: empty finite set");
            double best = -std::numeric_limits<double>::infinity();
            for (const Vec& p : set.points) best = std::max(best, dot(p, w));
            return best;
        }
        case SetKind::scaled:
            return set.factor * support_value(*set.inner, w);
        case SetKind::lq_sphere_slice: {
            const IndexSetSpec& in = *set.inner;
            const double rho = set.slice_radius;
            if (is_empty_set(set))
                throw invalid_query("support_value: empty slice");
            switch (in.kind) {
                case SetKind::euclidean_ball:
                case SetKind::euclidean_sphere:
                    return rho * norm2(w);  // slice is the sphere of radius rho
                case SetKind::sparse_sphere:
                    return support_value(in, w);  // slice equals the set
                case SetKind::finite_points: {
                    double best = -std::numeric_limits<double>::infinity();
                    bool any = false;
                    for (const Vec& p : in.points) {
                        if (std::abs(norm2(p) - rho) <=
                            1e-9 * std::max(1.0, rho)) {
                            best = std::max(best, dot(p, w));
                            any = true;
                        }
                    }
                    if (!any)
                        throw invalid_query("support_value: empty slice");
                    return best;
                }
                default:
                    throw unsupported_operation(
                        "support_value: no closed form for slices of " +
                        set_kind_name(in.kind));
            }
        }
    }
    throw unsupported_operation("support_value: unknown set kind");
}

Vec support_point(const IndexSetSpec& set, const Vec& w) {
    const int d = set.dim;
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::euclidean_ball: {
            const double n = norm2(w);
            Vec v(d, 0.0);
            if (n < 1e-14) {
                v[0] = set.radius;
                return v;
            }
            for (int i = 0; i < d; ++i) v[i] = set.radius * w[i] / n;
            return v;
        }
        case SetKind::l1_ball: {
            int arg = 0;
            for (int i = 1; i < d; ++i)
                if (std::abs(w[i]) > std::abs(w[arg])) arg = i;
            Vec v(d, 0.0);
            v[arg] = w[arg] >= 0.0 ? set.radius : -set.radius;
            return v;
        }
        case SetKind::sparse_sphere: {
            const std::vector<int> idx = top_s_indices(w, set.sparsity);
            double ssq = 0.0;
            for (int i : idx) ssq += w[i] * w[i];
            Vec v(d, 0.0);
            if (ssq < 1e-28) {
                v[idx.empty() ? 0 : idx[0]] = set.radius;
                return v;
            }
            const double c = set.radius / std::sqrt(ssq);
            for (int i : idx) v[i] = c * w[i];
            return v;
        }
        case SetKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const double t = set.semiaxes[i] * w[i];
                s += t * t;
            }
            Vec v(d, 0.0);
            if (s < 1e-28) {
                v[0] = set.semiaxes[0];
                return v;
            }
            const double c = 1.0 / std::sqrt(s);
            for (int i = 0; i < d; ++i)
                v[i] = c * set.semiaxes[i] * set.semiaxes[i] * w[i];
            return v;
        }
        case SetKind::finite_points: {
            if (set.points.empty())
                throw invalid_query("support_point: empty finite set");
            std::size_t arg = 0;
            double best = dot(set.points[0], w);
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                const double t = dot(set.points[i], w);
                if (t > best) {
                    best = t;
                    arg = i;
                }
            }
            return set.points[arg];
        }
        case SetKind::scaled: {
            Vec v = support_point(*set.inner, w);
            for (double& x : v) x *= set.factor;
            return v;
        }
        case SetKind::lq_sphere_slice: {
            const IndexSetSpec& in = *set.inner;
            const double rho = set.slice_radius;
            switch (in.kind) {
                case SetKind::euclidean_ball:
                case SetKind::euclidean_sphere:
                    return support_point(IndexSetSpec::sphere(d, rho), w);
                case SetKind::sparse_sphere:
                    return support_point(in, w);
                default:
                    throw unsupported_operation(
                        "support_point: no closed form for slices of " +
                        set_kind_name(in.kind));
            }
        }
    }
    throw unsupported_operation("support_point: unknown set kind");
}

namespace {

// euclidean projection onto the l1 ball of radius r (sort-based)
Vec project_l1(const Vec& v, double r) {
    if (norm1(v) <= r) return v;
    const std::size_t d = v.size();
    std::vector<double> u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = std::abs(v[i]);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        css += u[k];
        const double t = (css - r) / static_cast<double>(k + 1);
        if (k + 1 == d || u[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    Vec out(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double m = std::max(0.0, std::abs(v[i]) - theta);
        out[i] = v[i] >= 0.0 ? m : -m;
    }
    return out;
}

}  // namespace

Vec project(const IndexSetSpec& set, const Vec& v) {
    const int d = set.dim;
    switch (set.kind) {
        case SetKind::euclidean_sphere: {
            const double n = norm2(v);
            if (n < 1e-14) {
                Vec e(d, 0.0);
                e[0] = set.radius;
                return e;
            }
            return scaled_vec(v, set.radius / n);
        }
        case SetKind::euclidean_ball: {
            const double n = norm2(v);
            if (n <= set.radius) return v;
            return scaled_vec(v, set.radius / n);
        }
        case SetKind::l1_ball:
            return project_l1(v, set.radius);
        case SetKind::sparse_sphere: {
            const std::vector<int> idx = top_s_indices(v, set.sparsity);
            Vec out(d, 0.0);
            double ssq = 0.0;
            for (int i : idx) ssq += v[i] * v[i];
            if (ssq < 1e-28) {
                out[0] = set.radius;
                return out;
            }
            const double c = set.radius / std::sqrt(ssq);
            for (int i : idx) out[i] = c * v[i];
            return out;
        }
        case SetKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const double t = v[i] / set.semiaxes[i];
                s += t * t;
            }
            if (s <= 1.0) return v;
            return scaled_vec(v, 1.0 / std::sqrt(s));  // radial retraction
        }
        case SetKind::finite_points: {
            if (set.points.empty())
                throw invalid_query("project: empty finite set");
            std::size_t arg = 0;
            double best = dist2(v, set.points[0]);
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                const double t = dist2(v, set.points[i]);
                if (t < best) {
                    best = t;
                    arg = i;
                }
            }
            return set.points[arg];
        }
        case SetKind::scaled: {
            Vec w = project(*set.inner, scaled_vec(v, 1.0 / set.factor));
            for (double& x : w) x *= set.factor;
            return w;
        }
        case SetKind::lq_sphere_slice: {
            Vec w = project(*set.inner, v);
            const double n = norm2(w);
            if (n < 1e-14) return w;
            Vec out = scaled_vec(w, set.slice_radius / n);
            // one more pass keeps ball/sphere/sparse slices exactly feasible
            return project(*set.inner, out);
        }
    }
    throw unsupported_operation("project: unknown set kind");
}

Net epsilon_net(const IndexSetSpec& set, double eps, std::uint64_t seed,
                Metric metric, std::size_t max_points, int streak) {
    if (eps <= 0.0) throw std::invalid_argument("epsilon_net: eps must be > 0");
    Net net;
    net.eps = eps;
    net.metric = metric;
    if (is_empty_set(set)) return net;

    const double eff_eps = eps / metric.scale;
    auto far_from_all = [&](const Vec& c) {
        for (const Vec& p : net.points)
            if (dist2(c, p) < eff_eps) return false;
        return true;
    };

    if (contains_origin(set)) net.points.emplace_back(set.dim, 0.0);

    if (set.kind == SetKind::finite_points) {
        for (const Vec& p : set.points)
            if (far_from_all(p)) net.points.push_back(p);
        if (net.points.empty() && !set.points.empty())
            net.points.push_back(set.points.front());
        return net;
    }

    SplitRng rng(derive_seed(seed, streams::kNet));
    auto under_cap = [&] {
        return max_points == 0 || net.points.size() < max_points;
    };
    int failures = 0;
    while (failures < streak && under_cap()) {
        Vec c = sample_point(set, rng);
        if (far_from_all(c)) {
            net.points.push_back(std::move(c));
            failures = 0;
        } else {
            ++failures;
        }
    }

    // Covering repair: the raw streak rule leaves uncovered pockets of
    // measure ~1/streak, enough to fail a thousand-point audit. Probe
    // rounds add any point beyond 0.9 eps until a full round is covered.
    auto dist_to_net = [&](const Vec& c) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec& p : net.points) best = std::min(best, dist2(c, p));
        return best;
    };
    constexpr std::size_t kRepairProbes = 4000;
    for (int round = 0; round < 64 && under_cap(); ++round) {
        std::size_t added = 0;
        for (std::size_t i = 0; i < kRepairProbes && under_cap(); ++i) {
            Vec c = sample_point(set, rng);
            if (dist_to_net(c) > 0.9 * eff_eps) {
                net.points.push_back(std::move(c));
                ++added;
            }
        }
        if (added == 0) break;
    }
    if (net.points.empty()) net.points.push_back(sample_point(set, rng));
    return net;
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
           std::lgamma(n - k + 1.0);
}

double volumetric_log_bound(int d, double r, double eps) {
    if (eps >= 2.0 * r) return 0.0;
    return d * std::log1p(2.0 * r / eps);
}

}  // namespace

double covering_number_log_bound(const IndexSetSpec& set, double eps) {
    if (eps <= 0.0)
        throw std::invalid_argument(
            "covering_number_log_bound: eps must be > 0");
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::euclidean_ball:
            return volumetric_log_bound(set.dim, set.radius, eps);
        case SetKind::sparse_sphere: {
            if (eps >= 2.0 * set.radius) return 0.0;
            return log_choose(set.dim, set.sparsity) +
                   set.sparsity * std::log1p(2.0 * set.radius / eps);
        }
        case SetKind::l1_ball: {
            if (eps >= 2.0 * set.radius) return 0.0;
            const double vol = volumetric_log_bound(set.dim, set.radius, eps);
            const double ratio = set.radius / eps;
            const double maurey =
                std::ceil(ratio * ratio) * std::log(2.0 * set.dim + 1.0);
            return std::min(vol, maurey);
        }
        case SetKind::ellipsoid: {
            const double rmax =
                *std::max_element(set.semiaxes.begin(), set.semiaxes.end());
            return volumetric_log_bound(set.dim, rmax, eps);
        }
        case SetKind::finite_points: {
            if (set.points.size() <= 1 || eps >= l2_diameter(set)) return 0.0;
            return std::log(static_cast<double>(set.points.size()));
        }
        case SetKind::scaled:
            return covering_number_log_bound(*set.inner, eps / set.factor);
        case SetKind::lq_sphere_slice: {
            if (is_empty_set(set)) return 0.0;
            // subset of the rho-sphere: cover the sphere at half resolution
            const double rho = set.slice_radius;
            if (eps >= 2.0 * rho) return 0.0;
            return volumetric_log_bound(set.dim, rho, 0.5 * eps);
        }
    }
    throw unsupported_operation("covering_number_log_bound: unknown kind");
}

Estimate mean_width(const IndexSetSpec& set, std::size_t mc_budget,
                    std::uint64_t seed) {
    if (mc_budget < 2)
        throw std::invalid_argument("mean_width: mc_budget must be >= 2");
    if (is_empty_set(set)) throw invalid_query("mean_width: empty set");
    SplitRng rng(derive_seed(seed, streams::kWidth));
    Vec g(set.dim);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t m = 0; m < mc_budget; ++m) {
        for (int i = 0; i < set.dim; ++i) g[i] = rng.next_gaussian();
        const double h = support_value(set, g);
        sum += h;
        sum_sq += h * h;
    }
    const double n = static_cast<double>(mc_budget);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

double l2_diameter(const IndexSetSpec& set) {
    switch (set.kind) {
        case SetKind::euclidean_sphere:
        case SetKind::euclidean_ball:
        case SetKind::l1_ball:
        case SetKind::sparse_sphere:
            return 2.0 * set.radius;
        case SetKind::ellipsoid:
            return 2.0 *
                   *std::max_element(set.semiaxes.begin(), set.semiaxes.end());
        case SetKind::finite_points: {
            double best = 0.0;
            for (std::size_t i = 0; i < set.points.size(); ++i)
                for (std::size_t j = i + 1; j < set.points.size(); ++j)
                    best = std::max(best, dist2(set.points[i], set.points[j]));
            return best;
        }
        case SetKind::scaled:
            return set.factor * l2_diameter(*set.inner);
        case SetKind::lq_sphere_slice: {
            if (is_empty_set(set)) return 0.0;
            const IndexSetSpec& in = *set.inner;
            if (in.kind == SetKind::finite_points) {
                double best = 0.0;
                const double rho = set.slice_radius;
                for (std::size_t i = 0; i < in.points.size(); ++i) {
                    if (std::abs(norm2(in.points[i]) - rho) >
                        1e-9 * std::max(1.0, rho))
                        continue;
                    for (std::size_t j = i + 1; j < in.points.size(); ++j) {
                        if (std::abs(norm2(in.points[j]) - rho) >
                            1e-9 * std::max(1.0, rho))
                            continue;
                        best = std::max(best,
                                        dist2(in.points[i], in.points[j]));
                    }
                }
                return best;
            }
            // symmetric bodies: the slice contains antipodal pairs
            return 2.0 * set.slice_radius;
        }
    }
    return 0.0;
}

IndexSetSpec intersect_lq_sphere(const IndexSetSpec& set, double R, double q,
                                 const EnsembleSpec& spec) {
    if (spec.family != Family::gaussian)
        throw unsupported_operation(
            "intersect_lq_sphere: closed-form L^q spheres are available "
            "only for the Gaussian family; use per-vector Monte Carlo "
            "norms instead");
    if (R <= 0.0)
        throw std::invalid_argument("intersect_lq_sphere: R must be > 0");
    if (q < 1.0)
        throw std::invalid_argument("intersect_lq_sphere: q must be >= 1");
    const double rho = R / std::pow(gaussian_abs_moment(q), 1.0 / q);

    // normalize scale wrappers so slices sit directly over base kinds
    if (set.kind == SetKind::scaled) {
        IndexSetSpec inner_slice;
        inner_slice.kind = SetKind::lq_sphere_slice;
        inner_slice.dim = set.dim;
        inner_slice.slice_radius = rho / set.factor;
        inner_slice.inner = set.inner;
        return IndexSetSpec::scaled(std::move(inner_slice), set.factor);
    }

    IndexSetSpec out;
    out.kind = SetKind::lq_sphere_slice;
    out.dim = set.dim;
    out.slice_radius = rho;
    out.inner = std::make_shared<IndexSetSpec>(set);
    return out;
}

}  // namespace lqlab
