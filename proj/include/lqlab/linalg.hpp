#ifndef LQLAB_LINALG_HPP
#define LQLAB_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lqlab {

using Vec = std::vector<double>;

// Dense row-major matrix; rows are observations throughout the library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    std::span<const double> row_span(std::size_t i) const {
        return {row(i), cols};
    }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2_sq(std::span<const double> v) { return dot(v, v); }
inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double norm1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double norm_p(std::span<const double> v, double p) {
    if (std::isinf(p)) return norm_inf(v);
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec scaled_vec(const Vec& v, double c) {
    Vec out(v);
    for (double& x : out) x *= c;
    return out;
}

// out += c * v
inline void axpy(double c, const Vec& v, Vec& out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += c * v[i];
}

// |t|^q with fast paths for the exponents used throughout the experiments.
// Dispatch is resolved once per batch sweep, not per sample.
struct PowQ {
    explicit PowQ(double q_) : q(q_) {
        if (q == 1.0) mode = Mode::one;
        else if (q == 2.0) mode = Mode::two;
        else if (q == 3.0) mode = Mode::three;
        else if (q == 1.5) mode = Mode::three_halves;
        else if (q == 0.5) mode = Mode::half;
        else if (q == 0.0) mode = Mode::zero;
        else mode = Mode::general;
    }

    double abs_pow(double t) const {
        const double a = std::abs(t);
        switch (mode) {
            case Mode::zero: return 1.0;
            case Mode::half: return std::sqrt(a);
            case Mode::one: return a;
            case Mode::three_halves: return a * std::sqrt(a);
            case Mode::two: return t * t;
            case Mode::three: return a * t * t;
            case Mode::general: return std::pow(a, q);
        }
        return std::pow(a, q);
    }

    // |t|^q * sign(t), with sign(0) = 0; the subgradient convention at 0.
    double signed_pow(double t) const {
        if (t == 0.0) return 0.0;
        const double m = abs_pow(t);
        return t > 0.0 ? m : -m;
    }

    double q;

private:
    enum class Mode { zero, half, one, three_halves, two, three, general };
    Mode mode;
};

}  // namespace lqlab

#endif  // LQLAB_LINALG_HPP
