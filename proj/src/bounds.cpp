#include "lqlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lqlab/common.hpp"
#include "lqlab/linalg.hpp"

namespace lqlab {

namespace {

void validate_inputs(const BoundInputs& in) {
    if (in.gamma2 < 0.0 || in.diam < 0.0)
        throw std::invalid_argument("bound inputs must be nonnegative");
    if (in.N < 1) throw std::invalid_argument("bound inputs: N must be >= 1");
    if (in.q < 1.0) throw std::invalid_argument("bound inputs: q must be >= 1");
    if (in.u_or_p < 1.0)
        throw std::invalid_argument("bound inputs: u (or p) must be >= 1");
    if (in.constant <= 0.0)
        throw std::invalid_argument("bound inputs: constant must be > 0");
}

BoundReport assemble(const BoundInputs& in) {
    const double N = static_cast<double>(in.N);
    const double expo = std::min(1.0, 0.5 * in.q);
    const double u = in.u_or_p;
    BoundReport rep;
    rep.inputs = in;
    rep.term_chaining =
        in.constant * std::pow(in.gamma2, in.q) / std::pow(N, expo);
    rep.term_mixed = in.constant * std::pow(in.diam, in.q - 1.0) * in.gamma2 /
                     std::sqrt(N);
    rep.term_deviation =
        in.constant * std::pow(in.diam, in.q) *
        (std::sqrt(u / N) + std::pow(u, 0.5 * in.q) / std::pow(N, expo));
    rep.value = rep.term_chaining + rep.term_mixed + rep.term_deviation;
    return rep;
}

}  // namespace

BoundReport tail_bound_rhs(const BoundInputs& in) {
    validate_inputs(in);
    return assemble(in);
}

BoundReport moment_bound_rhs(const BoundInputs& in) {
    validate_inputs(in);
    if (in.q > 2.0)
        throw unsupported_operation(
            "moment_bound_rhs covers 1 <= q <= 2 only; use tail_bound_rhs "
            "for larger q");
    return assemble(in);  // min{1, q/2} = q/2 on [1, 2]
}

double bernstein_subweibull_threshold(std::span<const double> b, double alpha,
                                      double t, double c1, double c2) {
    if (alpha <= 0.0)
        throw std::invalid_argument("bernstein: alpha must be > 0");
    if (t < 0.0) throw std::invalid_argument("bernstein: t must be >= 0");
    double sum_sq = 0.0;
    for (double x : b) {
        if (x < 0.0)
            throw std::invalid_argument("bernstein: norms must be >= 0");
        sum_sq += x * x;
    }
    const double b_beta =
        alpha <= 1.0 ? norm_inf(b) : norm_p(b, alpha / (alpha - 1.0));
    return c1 * std::sqrt(sum_sq) * std::sqrt(t) +
           c2 * std::pow(t, 1.0 / alpha) * b_beta;
}

double single_function_tail_prob(double x, std::uint64_t N, double q,
                                 double c4) {
    if (x < 0.0)
        throw std::invalid_argument("single_function_tail_prob: x >= 0");
    if (q < 1.0)
        throw std::invalid_argument("single_function_tail_prob: q >= 1");
    if (c4 <= 0.0)
        throw std::invalid_argument("single_function_tail_prob: C4 > 0");
    const double expo = std::min(x * x, std::pow(x, 2.0 / q));
    return std::min(1.0, 2.0 * std::exp(-static_cast<double>(N) * expo / c4));
}

double single_function_moment(double psi2_q, std::uint64_t N, double q,
                              double r, double c5) {
    if (psi2_q < 0.0)
        throw std::invalid_argument("single_function_moment: psi2_q >= 0");
    if (q < 1.0) throw std::invalid_argument("single_function_moment: q >= 1");
    if (r < 1.0) throw std::invalid_argument("single_function_moment: r >= 1");
    if (c5 <= 0.0) throw std::invalid_argument("single_function_moment: C5 > 0");
    const double ratio = r / static_cast<double>(N);
    return c5 * psi2_q * (std::sqrt(ratio) + std::pow(ratio, 0.5 * q));
}

double moments_to_tail(double a0, double a1, double a2, double q, double x) {
    if (x < 1.0) throw std::invalid_argument("moments_to_tail: x must be >= 1");
    if (q < 1.0) throw std::invalid_argument("moments_to_tail: q must be >= 1");
    if (a0 < 0.0 || a1 < 0.0 || a2 < 0.0)
        throw std::invalid_argument("moments_to_tail: coefficients >= 0");
    const double c = std::max(std::sqrt(2.0), std::pow(2.0, 1.0 / q));
    return std::numbers::e * c *
           (a0 + a1 * std::sqrt(x) + a2 * std::pow(x, 1.0 / q));
}

ScalingFit fit_scaling_exponent(
    const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3)
        throw std::invalid_argument("fit_scaling_exponent: need >= 3 pairs");
    for (const auto& [n, y] : pairs)
        if (n <= 0.0 || y <= 0.0)
            throw std::invalid_argument(
                "fit_scaling_exponent: values must be positive");

    const double m = static_cast<double>(pairs.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [n, y] : pairs) {
        mx += std::log(n);
        my += std::log(y);
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, y] : pairs) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0)
        throw std::invalid_argument(
            "fit_scaling_exponent: need at least two distinct N");

    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [n, y] : pairs) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(n));
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.pairs = pairs;
    return fit;
}

Calibration calibrate_constant(
    const std::vector<std::pair<BoundInputs, double>>& observed,
    BoundForm form) {
    if (observed.empty())
        throw std::invalid_argument("calibrate_constant: no observations");

    auto rhs = [&](const BoundInputs& in, double c) {
        BoundInputs scaled = in;
        scaled.constant = c;
        return form == BoundForm::tail ? tail_bound_rhs(scaled).value
                                       : moment_bound_rhs(scaled).value;
    };
    auto dominates = [&](double c) {
        for (const auto& [in, obs] : observed)
            if (rhs(in, c) < obs) return false;
        return true;
    };

    // structure-check: a bound that is identically zero cannot dominate
    for (const auto& [in, obs] : observed) {
        if (obs > 0.0 && rhs(in, 1.0) == 0.0) {
            Calibration cal;
            cal.constant = std::numeric_limits<double>::infinity();
            cal.infeasible = true;
            return cal;
        }
    }

    // all observations already dominated by C -> 0
    bool all_nonpositive = true;
    for (const auto& [in, obs] : observed)
        if (obs > 0.0) all_nonpositive = false;
    if (all_nonpositive) return {0.0, false};

    double hi = 1.0;
    int guard = 0;
    while (!dominates(hi)) {
        hi *= 2.0;
        if (++guard > 200) {
            Calibration cal;
            cal.constant = std::numeric_limits<double>::infinity();
            cal.infeasible = true;
            return cal;
        }
    }
    double lo = 0.0;
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (dominates(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, false};
}

}  // namespace lqlab
