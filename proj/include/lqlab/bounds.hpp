#ifndef LQLAB_BOUNDS_HPP
#define LQLAB_BOUNDS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lqlab {

// Inputs of the deviation bounds: chaining functional and diameter of the
// class in the psi_2 metric, sample count, power q, and either the tail
// parameter u or the moment order p. The multiplicative constant is an
// explicit input (default 1) and is calibrated empirically, never assumed.
struct BoundInputs {
    double gamma2 = 0.0;
    double diam = 0.0;
    std::uint64_t N = 1;
    double q = 1.0;
    double u_or_p = 1.0;
    double constant = 1.0;
};

struct BoundReport {
    double value = 0.0;
    double term_chaining = 0.0;   // C gamma2^q / N^min{1,q/2}
    double term_mixed = 0.0;      // C diam^{q-1} gamma2 / sqrt(N)
    double term_deviation = 0.0;  // C diam^q (sqrt(u/N) + u^{q/2}/N^min{1,q/2})
    BoundInputs inputs;
};

// High-probability bound: with probability >= 1 - exp(-u), the sup of the
// L^q deviation is at most
//   C ( gamma2^q / N^min{1,q/2} + diam^{q-1} gamma2 / sqrt(N)
//       + diam^q ( sqrt(u/N) + u^{q/2} / N^min{1,q/2} ) ).
BoundReport tail_bound_rhs(const BoundInputs& in);

// L^p-moment form of the same bound; stated for 1 <= q <= 2 only (the
// q > 2 moment bounds come from prior work and are out of scope here).
BoundReport moment_bound_rhs(const BoundInputs& in);

// Generalized Bernstein threshold for sums of independent mean-zero
// psi_alpha variables with norms b_i:
//   C1 (sum b_i^2)^{1/2} sqrt(t) + C2 t^{1/alpha} ||b||_{beta(alpha)},
// where beta(alpha) = inf when alpha <= 1 and alpha/(alpha-1) otherwise.
double bernstein_subweibull_threshold(std::span<const double> b, double alpha,
                                      double t, double c1, double c2);

// min(1, 2 exp(-N min{x^2, x^{2/q}} / C4)): tail probability of the
// deviation of a single function, in units of ||f||_psi2^q.
double single_function_tail_prob(double x, std::uint64_t N, double q,
                                 double c4);

// C5 ||f||_psi2^q ( sqrt(r/N) + (r/N)^{q/2} ): L^r moment of the single
// function deviation.
double single_function_moment(double psi2_q, std::uint64_t N, double q,
                              double r, double c5);

// Level at which the tail drops below exp(-x), given the moment growth
// ||zeta||_{L^p} <= a0 + a1 sqrt(p) + a2 p^{1/q}:
//   e * max{sqrt 2, 2^{1/q}} * (a0 + a1 sqrt(x) + a2 x^{1/q}), x >= 1.
double moments_to_tail(double a0, double a1, double a2, double q, double x);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> pairs;
};

// Least squares of log(statistic) against log(N).
ScalingFit fit_scaling_exponent(
    const std::vector<std::pair<double, double>>& pairs);

enum class BoundForm { tail, moment };

struct Calibration {
    double constant = 0.0;
    bool infeasible = false;
};

// Smallest C such that the chosen bound form with that constant dominates
// every observed quantile; bisection to relative 1e-6, returning the
// dominating end of the bracket.
Calibration calibrate_constant(
    const std::vector<std::pair<BoundInputs, double>>& observed,
    BoundForm form);

}  // namespace lqlab

#endif  // LQLAB_BOUNDS_HPP
