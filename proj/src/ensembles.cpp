#include "lqlab/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lqlab/common.hpp"
#include "lqlab/rng.hpp"

namespace lqlab {

std::string family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::rademacher: return "rademacher";
        case Family::bounded_uniform: return "bounded_uniform";
    }
    return "gaussian";
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "rademacher") return Family::rademacher;
    if (name == "bounded_uniform") return Family::bounded_uniform;
    throw std::invalid_argument("unknown ensemble family: " + name);
}

double psi2_constant_gaussian() {
    static const double kappa = std::sqrt(8.0 * std::log(2.0) / 3.0);
    return kappa;
}

EnsembleSpec EnsembleSpec::gaussian(int d) {
    return {Family::gaussian, d, psi2_constant_gaussian()};
}

EnsembleSpec EnsembleSpec::rademacher(int d) {
    return {Family::rademacher, d, psi2_constant_gaussian()};
}

EnsembleSpec EnsembleSpec::bounded_uniform(int d) {
    return {Family::bounded_uniform, d, psi2_constant_gaussian()};
}

namespace {

// sqrt(3) half-width makes the uniform marginal variance exactly one
constexpr double kUniformHalfWidth = 1.7320508075688772;

void fill_row(const EnsembleSpec& spec, SplitRng& rng, double* out, int d) {
    switch (spec.family) {
        case Family::gaussian:
            for (int j = 0; j < d; ++j) out[j] = rng.next_gaussian();
            break;
        case Family::rademacher:
            for (int j = 0; j < d; ++j) out[j] = rng.next_sign();
            break;
        case Family::bounded_uniform:
            for (int j = 0; j < d; ++j)
                out[j] = kUniformHalfWidth * (2.0 * rng.next_unit() - 1.0);
            break;
    }
}

}  // namespace

SampleBatch sample_batch(const EnsembleSpec& spec, std::size_t n,
                         std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_batch: n must be >= 1");
    if (spec.dim <= 0)
        throw std::invalid_argument("sample_batch: dimension must be >= 1");
    SampleBatch batch;
    batch.rows = Matrix(n, static_cast<std::size_t>(spec.dim));
    batch.seed = seed;
    batch.spec = spec;
    for (std::size_t i = 0; i < n; ++i) {
        SplitRng rng(derive_seed(seed, i));
        fill_row(spec, rng, batch.rows.row(i), spec.dim);
    }
    return batch;
}

double gaussian_abs_moment(double q) {
    if (q < 1.0)
        throw std::invalid_argument("gaussian_abs_moment: q must be >= 1");
    return std::exp(0.5 * q * std::log(2.0) + std::lgamma(0.5 * (q + 1.0)) -
                    0.5 * std::log(std::numbers::pi));
}

Estimate population_lq_norm(const EnsembleSpec& spec, const Vec& v, double q,
                            std::size_t mc_budget, std::uint64_t seed) {
    if (q < 1.0)
        throw std::invalid_argument("population_lq_norm: q must be >= 1");
    if (static_cast<int>(v.size()) != spec.dim)
        throw std::invalid_argument("population_lq_norm: dimension mismatch");

    if (spec.family == Family::gaussian) {
        // <X,v> ~ ||v||_2 * g, so the L^q norm is exact.
        const double mq = gaussian_abs_moment(q);
        return {norm2(v) * std::pow(mq, 1.0 / q), 0.0};
    }

    if (mc_budget == 0)
        throw std::invalid_argument(
            "population_lq_norm: mc_budget must be positive for "
            "non-Gaussian families");

    SplitRng rng(derive_seed(seed, streams::kPopulation));
    const PowQ pw(q);
    const int d = spec.dim;
    Vec x(static_cast<std::size_t>(d));
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t m = 0; m < mc_budget; ++m) {
        switch (spec.family) {
            case Family::rademacher:
                for (int j = 0; j < d; ++j) x[j] = rng.next_sign();
                break;
            case Family::bounded_uniform:
                for (int j = 0; j < d; ++j)
                    x[j] = kUniformHalfWidth * (2.0 * rng.next_unit() - 1.0);
                break;
            case Family::gaussian: break;  // unreachable
        }
        const double t = pw.abs_pow(dot(x, v));
        sum += t;
        sum_sq += t * t;
    }
    const double mean = sum / static_cast<double>(mc_budget);
    if (mean <= 0.0) return {0.0, 0.0};
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(mc_budget) - mean * mean);
    const double se_mean = std::sqrt(var / static_cast<double>(mc_budget));
    const double value = std::pow(mean, 1.0 / q);
    // delta method for mean^(1/q)
    const double se = (1.0 / q) * std::pow(mean, 1.0 / q - 1.0) * se_mean;
    return {value, se};
}

double psi2_norm_proxy(const EnsembleSpec& spec, const Vec& v) {
    if (static_cast<int>(v.size()) != spec.dim)
        throw std::invalid_argument("psi2_norm_proxy: dimension mismatch");
    return spec.psi2_constant * norm2(v);
}

double empirical_psi_norm(std::span<const double> samples, double alpha) {
    if (samples.size() < 2)
        throw std::invalid_argument(
            "empirical_psi_norm: need at least 2 samples");
    if (alpha <= 0.0)
        throw std::invalid_argument("empirical_psi_norm: alpha must be > 0");

    const double n = static_cast<double>(samples.size());
    const double p_max = std::max(1.0, std::log(n));
    double best = 0.0;
    double p = 1.0;
    for (;;) {
        const PowQ pw(p);
        double sum = 0.0;
        for (double x : samples) sum += pw.abs_pow(x);
        const double mean = sum / n;
        if (mean > 0.0) {
            const double lp_norm = std::pow(mean, 1.0 / p);
            best = std::max(best, lp_norm / std::pow(p, 1.0 / alpha));
        }
        if (p >= p_max) break;
        p = std::min(p + 0.5, p_max);
    }
    return best;
}

}  // namespace lqlab
