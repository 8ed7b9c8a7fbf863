#include "coxsim/distributions.hpp"
#include "coxsim/special_functions.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace coxsim;

TEST_CASE("normal cdf is symmetric and matches erfc") {
    for (int i = 0; i <= 1000; ++i) {
        const double x = -10.0 + 0.02 * i;
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-14);
        CHECK(normal_cdf(x) == doctest::Approx(oracle::phi_cdf(x)).epsilon(1e-13));
        if (i > 0) CHECK(normal_cdf(x) >= normal_cdf(x - 0.02));
    }
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("log_gamma agrees with lgamma") {
    for (double x : {0.01, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 171.5, 1e5})
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
}

TEST_CASE("bessel_k matches half-integer closed forms") {
    for (int n : {0, 1, 2}) {
        for (double z : {0.1, 1.0, 10.0, 100.0}) {
            const double expected = oracle::bessel_k_half(n, z);
            CAPTURE(n);
            CAPTURE(z);
            CHECK(std::abs(bessel_k(n + 0.5, z) / expected - 1.0) <= 1e-8);
            CHECK(std::abs(bessel_k(-(n + 0.5), z) / expected - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("bessel_k agrees with a Simpson-rule evaluation") {
    CHECK(bessel_k(1.0, 1.0) == doctest::Approx(0.6019072301972346).epsilon(1e-10));
    for (double nu : {0.0, 0.3, 1.0, 2.7})
        for (double z : {0.2, 1.0, 5.0}) CHECK(bessel_k(nu, z) == doctest::Approx(oracle::bessel_k_simpson(nu, z)).epsilon(1e-9));
    CHECK(log_bessel_k(0.5, 600.0) == doctest::Approx(std::log(std::sqrt(std::numbers::pi / 1200.0)) - 600.0).epsilon(1e-10));
    CHECK_THROWS_AS(bessel_k(1.0, 0.0), std::domain_error);
}

TEST_CASE("integrate handles finite and infinite ranges") {
    CHECK(integrate([](double x) { return x; }, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(integrate(normal_pdf, -kInf, kInf) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate([](double x) { return 3 * x * x * x * x - x + 2; }, -1.0, 2.0) ==
          doctest::Approx(3.0 * 33.0 / 5.0 - 1.5 + 6.0).epsilon(1e-12));
    const double k_half = integrate([](double y) { return 0.5 * std::pow(y, -0.5) * std::exp(-(y + 1.0 / y) / 2.0); },
                                    0.0, kInf);
    CHECK(k_half == doctest::Approx(oracle::bessel_k_half(0, 1.0)).epsilon(1e-9));
}

TEST_CASE("integrate reports non-convergence with its best estimate") {
    QuadratureSpec tight;
    tight.max_subdivisions = 4;
    try {
        integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, tight);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(std::isfinite(e.estimate()));
        CHECK(e.error_bound() > 0.0);
    }
}

TEST_CASE("cdf_from_cf reproduces closed forms") {
    const auto cauchy = stable_characteristic_fn(StableParams(1.0, 0.0));
    const auto levy = stable_characteristic_fn(StableParams(0.5, 1.0));
    const auto normal2 = stable_characteristic_fn(StableParams(2.0, 0.0));
    for (int i = 0; i <= 20; ++i) {
        const double x = -5.0 + 0.5 * i;
        CHECK(std::abs(cdf_from_cf(cauchy, x) - oracle::cauchy_cdf(x)) <= 1e-6);
        CHECK(std::abs(cdf_from_cf(normal2, x) - oracle::phi_cdf(x / std::numbers::sqrt2)) <= 1e-6);
        const double y = 0.25 * (i + 1);
        CHECK(std::abs(cdf_from_cf(levy, y) - oracle::levy_cdf(y)) <= 1e-6);
    }
    CHECK(cdf_from_cf(cauchy, 1.0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(cdf_from_cf(levy, 1.0) == doctest::Approx(0.4795001221869535).epsilon(1e-6));
    for (double a : {0.3, 0.7, 1.3, 1.9})
        CHECK(std::abs(cdf_from_cf(stable_characteristic_fn(StableParams(a, 0.0)), 0.0) - 0.5) <= 1e-6);
}
