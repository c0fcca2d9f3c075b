#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqlab/ensembles.hpp"
#include "lqlab/rng.hpp"
#include "oracles.hpp"

using namespace lqlab;

TEST_CASE("sample_batch is deterministic and order independent") {
    const EnsembleSpec spec = EnsembleSpec::gaussian(2);
    const SampleBatch a = sample_batch(spec, 3, 7);
    const SampleBatch b = sample_batch(spec, 3, 7);
    REQUIRE(a.rows.rows == 3);
    REQUIRE(a.rows.cols == 2);
    CHECK(a.rows.data == b.rows.data);

    // per-row substreams: a longer batch shares its prefix
    const SampleBatch c = sample_batch(spec, 5, 7);
    for (std::size_t i = 0; i < 3 * 2; ++i)
        CHECK(c.rows.data[i] == a.rows.data[i]);
}

TEST_CASE("sample_batch input validation") {
    CHECK_THROWS_AS(sample_batch(EnsembleSpec::gaussian(2), 0, 1),
                    std::invalid_argument);
    EnsembleSpec bad = EnsembleSpec::gaussian(2);
    bad.dim = 0;
    CHECK_THROWS_AS(sample_batch(bad, 3, 1), std::invalid_argument);
}

TEST_CASE("rademacher entries live on {-1, +1}") {
    const SampleBatch b = sample_batch(EnsembleSpec::rademacher(4), 100, 1);
    for (double x : b.rows.data) CHECK(std::abs(x) == 1.0);
}

TEST_CASE("gaussian sample variance matches the CLT band") {
    const SampleBatch b = sample_batch(EnsembleSpec::gaussian(1), 100000, 3);
    std::vector<double> xs(b.rows.data);
    const double var = oracles::variance(xs);
    CHECK(var > 0.97);
    CHECK(var < 1.03);
}

TEST_CASE("isotropy and mean-zero invariants at M = 1e5") {
    for (const EnsembleSpec& spec :
         {EnsembleSpec::gaussian(4), EnsembleSpec::rademacher(4),
          EnsembleSpec::bounded_uniform(4)}) {
        const SampleBatch b = sample_batch(spec, 100000, 11);
        const double n = static_cast<double>(b.n());
        for (int i = 0; i < 4; ++i) {
            double m = 0.0;
            for (std::size_t r = 0; r < b.n(); ++r) m += b.rows.at(r, i);
            CHECK(std::abs(m / n) < 0.02);
            for (int j = i; j < 4; ++j) {
                double c = 0.0;
                for (std::size_t r = 0; r < b.n(); ++r)
                    c += b.rows.at(r, i) * b.rows.at(r, j);
                c /= n;
                const double target = i == j ? 1.0 : 0.0;
                CHECK(std::abs(c - target) < 0.05);
            }
        }
    }
}

TEST_CASE("gaussian_abs_moment against quadrature oracle") {
    // frozen oracle values: sqrt(2/pi) and the fourth moment 3
    CHECK(gaussian_abs_moment(1.0) ==
          doctest::Approx(0.7978845608028654).epsilon(1e-10));
    CHECK(gaussian_abs_moment(4.0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-12));

    for (double q : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 7.0}) {
        const double oracle = oracles::gaussian_abs_moment_quadrature(q);
        CHECK(gaussian_abs_moment(q) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK_THROWS_AS(gaussian_abs_moment(0.5), std::invalid_argument);
}

TEST_CASE("population_lq_norm closed forms and Monte Carlo") {
    const EnsembleSpec g = EnsembleSpec::gaussian(3);
    Vec e1{1.0, 0.0, 0.0};

    SUBCASE("gaussian e1, q=2 is exactly 1") {
        const Estimate est = population_lq_norm(g, e1, 2.0, 0, 1);
        CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(est.std_error == 0.0);
    }
    SUBCASE("gaussian 2 e1, q=4 is 2 * 3^(1/4)") {
        Vec v{2.0, 0.0, 0.0};
        const Estimate est = population_lq_norm(g, v, 4.0, 0, 1);
        CHECK(est.value ==
              doctest::Approx(2.6321480259049848).epsilon(1e-12));
    }
    SUBCASE("rademacher e1 has unit L^q norm for every q") {
        const EnsembleSpec r = EnsembleSpec::rademacher(3);
        for (double q : {1.0, 2.0, 3.7}) {
            const Estimate est = population_lq_norm(r, e1, q, 2000, 5);
            CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(
            population_lq_norm(EnsembleSpec::rademacher(3), e1, 2.0, 0, 1),
            std::invalid_argument);
        CHECK_THROWS_AS(population_lq_norm(g, e1, 0.5, 0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("population_lq_norm is nondecreasing in q (Lyapunov)") {
    const EnsembleSpec r = EnsembleSpec::rademacher(4);
    Vec v{0.5, -0.3, 0.8, 0.1};
    double prev = 0.0;
    // same seed reuses the sample set, so monotonicity is exact
    for (double q : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const double cur = population_lq_norm(r, v, q, 20000, 9).value;
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
    const EnsembleSpec g = EnsembleSpec::gaussian(4);
    prev = 0.0;
    for (double q : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const double cur = population_lq_norm(g, v, q, 0, 9).value;
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("psi2_norm_proxy: convention constant and homogeneity") {
    const EnsembleSpec g = EnsembleSpec::gaussian(2);
    CHECK(psi2_norm_proxy(g, Vec{0.0, 0.0}) == 0.0);

    // oracle: bisection + quadrature for E psi2(|g|/c) = 1
    const double kappa = oracles::gaussian_psi2_constant_bisect();
    CHECK(psi2_norm_proxy(g, Vec{1.0, 0.0}) ==
          doctest::Approx(kappa).epsilon(1e-8));
    CHECK(psi2_constant_gaussian() == doctest::Approx(kappa).epsilon(1e-8));

    Vec v{0.3, -0.4};
    CHECK(psi2_norm_proxy(g, scaled_vec(v, 3.0)) ==
          doctest::Approx(3.0 * psi2_norm_proxy(g, v)).epsilon(1e-14));
}

TEST_CASE("empirical_psi_norm basics") {
    std::vector<double> zeros(100, 0.0);
    CHECK(empirical_psi_norm(zeros, 2.0) == 0.0);

    SplitRng rng(21);
    std::vector<double> xs(5000);
    for (double& x : xs) x = rng.next_gaussian();

    SUBCASE("exact homogeneity") {
        const double base = empirical_psi_norm(xs, 2.0);
        std::vector<double> scaled(xs);
        for (double& x : scaled) x *= 2.0;
        CHECK(empirical_psi_norm(scaled, 2.0) ==
              doctest::Approx(2.0 * base).epsilon(1e-12));
    }
    SUBCASE("errors") {
        std::vector<double> one{1.0};
        CHECK_THROWS_AS(empirical_psi_norm(one, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(empirical_psi_norm(xs, 0.0), std::invalid_argument);
    }
}

TEST_CASE("empirical_psi_norm tracks the analytic constant within 3x") {
    SplitRng rng(33);
    std::vector<double> xs(100000);
    for (double& x : xs) x = rng.next_gaussian();
    const double est = empirical_psi_norm(xs, 2.0);
    const double kappa = psi2_constant_gaussian();
    CHECK(est > kappa / 3.0);
    CHECK(est < kappa * 3.0);
}

TEST_CASE("product rule: psi_1 of a product vs product of psi_2 norms") {
    SplitRng rng(47);
    const std::size_t n = 100000;
    std::vector<double> a(n), b(n), prod(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.next_gaussian();
        b[i] = 1.5 * rng.next_gaussian();
        prod[i] = a[i] * b[i];
    }
    const double lhs = empirical_psi_norm(prod, 1.0);
    const double rhs =
        4.0 * empirical_psi_norm(a, 2.0) * empirical_psi_norm(b, 2.0);
    CHECK(lhs <= rhs);
}

TEST_CASE("centering at most triples the empirical psi norm") {
    SplitRng rng(59);
    for (double shift : {0.0, 0.5, 2.0, -3.0}) {
        std::vector<double> xs(20000);
        for (double& x : xs) x = rng.next_gaussian() + shift;
        const double raw = empirical_psi_norm(xs, 2.0);
        const double m = oracles::mean(xs);
        std::vector<double> centered(xs);
        for (double& x : centered) x -= m;
        CHECK(empirical_psi_norm(centered, 2.0) <= 3.0 * raw + 1e-12);
    }
}
