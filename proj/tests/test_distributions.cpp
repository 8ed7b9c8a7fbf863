#include "coxsim/distributions.hpp"
#include "coxsim/stats.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

using namespace coxsim;

namespace {

std::vector<double> draw(std::size_t n, std::uint64_t stream, const std::function<double(Rng&)>& f) {
    Rng rng(2024, stream);
    std::vector<double> x(n);
    for (auto& v : x) v = f(rng);
    return x;
}

double gg_reference_density(double nu, double kappa, double delta, double x) {
    return std::abs(nu) * std::pow(x, nu * kappa - 1.0) * std::exp(-std::pow(x / delta, nu)) /
           (std::pow(delta, nu * kappa) * std::tgamma(kappa));
}

double gig_reference_density(double nu, double mu, double lambda, double x) {
    const double norm = std::pow(lambda / mu, nu / 2.0) / (2.0 * oracle::bessel_k_simpson(nu, std::sqrt(mu * lambda)));
    return norm * std::pow(x, nu - 1.0) * std::exp(-(mu / x + lambda * x) / 2.0);
}

const double kN = 100000;

}  // namespace

TEST_CASE("parameter validation names the violated invariant") {
    auto message = [](auto f) {
        try {
            f();
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message([] { StableParams(3.0, 0.0); }).find("alpha must lie in (0,2]") != std::string::npos);
    CHECK(message([] { StableParams(1.5, 0.9); }).find("theta") != std::string::npos);
    CHECK_THROWS_AS(StableParams(0.0, 0.0), std::invalid_argument);
    CHECK_NOTHROW(StableParams(1.5, 1.0 / 3.0));
    CHECK_THROWS(GigParams(0.0, 1.0, 0.0));
    CHECK_THROWS(GigParams(-1.0, 0.0, 1.0));
    CHECK_THROWS(GigParams(1.0, 0.0, 0.0));
    CHECK_NOTHROW(GigParams(1.0, 0.0, 2.0));
    CHECK_NOTHROW(GigParams(-1.0, 2.0, 0.0));
    CHECK_THROWS(GgParams(0.0, 1.0, 1.0));
    CHECK_THROWS(GgParams(1.0, 0.0, 1.0));
    CHECK_THROWS(GgParams(1.0, 1.0, -1.0));
    CHECK_THROWS(gig_density(GigParams(1.0, 1.0, 1.0), 0.0));
    CHECK_THROWS(gg_density(GgParams(2.0, 1.0, 1.0), -1.0));
}

TEST_CASE("stable characteristic function") {
    for (double s : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
        CHECK(std::abs(stable_cf(StableParams(2.0, 0.0), s) - std::exp(-s * s)) < 1e-15);
        CHECK(std::abs(stable_cf(StableParams(1.0, 0.0), s) - std::exp(-std::abs(s))) < 1e-15);
        const StableParams p(1.3, 0.4);
        CHECK(std::abs(stable_cf(p, s)) ==
              doctest::Approx(std::exp(-std::pow(std::abs(s), 1.3) * std::cos(std::numbers::pi * 0.4 * 1.3 / 2))));
    }
    const std::complex<double> expected = std::exp(-std::exp(std::complex<double>(0.0, -std::numbers::pi / 4)));
    CHECK(std::abs(stable_cf(StableParams(0.5, 1.0), 1.0) - expected) < 1e-15);
}

TEST_CASE("stable samplers") {
    const auto normal = draw(kN, 1, [](Rng& r) { return stable_sample(StableParams(2.0, 0.0), r) / std::numbers::sqrt2; });
    CHECK(oracle::ks(normal, oracle::phi_cdf) <= 0.01);
    const auto levy = draw(kN, 2, [](Rng& r) { return stable_sample(StableParams(0.5, 1.0), r); });
    for (double v : levy) REQUIRE(v > 0.0);
    CHECK(oracle::ks(levy, oracle::levy_cdf) <= 0.01);
    const auto cauchy = draw(kN, 3, [](Rng& r) { return stable_sample(StableParams(1.0, 0.0), r); });
    CHECK(oracle::ks(cauchy, [](double x) { return oracle::cauchy_cdf(x); }) <= 0.01);
    Rng rng(1, 1);
    CHECK_THROWS(stable_sample(StableParams(1.0, 0.5), rng));
}

TEST_CASE("skewed stable sampler against inversion") {
    const StableParams p(1.5, 0.2);
    const auto x = draw(20000, 4, [&](Rng& r) { return stable_sample(p, r); });
    CHECK(ks_test(x, [&](double v) { return stable_cdf(p, v); }, "G").statistic <= oracle::dkw99(20000));
}

TEST_CASE("scale mixture route is symmetric and matches the direct route") {
    for (double a : {1.0, 1.5}) {
        const auto mix = draw(kN, 5, [&](Rng& r) { return stable_sample_via_mixture(a, r); });
        const auto direct = draw(kN, 6, [&](Rng& r) { return stable_sample(StableParams(a, 0.0), r); });
        CHECK(ks_two_sample(mix, direct, "direct").statistic <= 0.01);
        std::size_t positive = 0;
        for (double v : mix) positive += v > 0.0;
        CHECK(std::abs(double(positive) / kN - 0.5) <= 3.0 / std::sqrt(kN));
    }
}

TEST_CASE("one-sided stable fractional moments") {
    const double alpha = 0.5, rho = 0.25;
    CHECK(one_sided_stable_moment(alpha, rho) == doctest::Approx(std::tgamma(0.5) / std::tgamma(0.75)));
    const auto x = draw(kN, 7, [&](Rng& r) { return std::pow(stable_sample(StableParams(alpha, 1.0), r), rho); });
    const auto m = estimate_mean(x);
    CHECK(std::abs(m.mean - one_sided_stable_moment(alpha, rho)) < 4.0 * m.standard_error);
    CHECK_THROWS(one_sided_stable_moment(0.5, 0.5));
}

TEST_CASE("gig density") {
    // Gamma boundary: shape nu, rate lambda / 2.
    for (double x : {0.1, 1.0, 3.0})
        CHECK(gig_density(GigParams(1.5, 0.0, 2.0), x) ==
              doctest::Approx(std::pow(x, 0.5) * std::exp(-x) / std::tgamma(1.5)).epsilon(1e-12));
    // Inverse Gaussian: mean sqrt(mu/lambda), shape mu.
    for (double x : {0.2, 1.0, 4.0}) {
        const double mu = 2.0, lambda = 0.5, m = 2.0;
        const double ig = std::sqrt(mu / (2 * std::numbers::pi * x * x * x)) * std::exp(-mu * (x - m) * (x - m) / (2 * m * m * x));
        CHECK(gig_density(GigParams(-0.5, mu, lambda), x) == doctest::Approx(ig).epsilon(1e-10));
    }
    for (double x : {0.3, 1.0, 2.5})
        CHECK(gig_density(GigParams(0.7, 0.9, 1.3), x) ==
              doctest::Approx(gig_reference_density(0.7, 0.9, 1.3, x)).epsilon(1e-8));
    for (const GigParams p : {GigParams(-0.5, 1, 1), GigParams(0.7, 0.9, 1.3), GigParams(1, 0, 2), GigParams(-2, 3, 0),
                              GigParams(5, 0.1, 4), GigParams(-0.5, 0.01, 10)}) {
        const double total = integrate([&](double x) { return gig_density(p, x); }, 0.0, kInf);
        CHECK(std::abs(total - 1.0) <= 1e-6);
    }
}

TEST_CASE("gig sampler") {
    const GigDistribution ig(GigParams(-0.5, 1.0, 1.0));
    CHECK(oracle::ks(draw(kN, 8, [&](Rng& r) { return ig.sample(r); }),
                     [](double x) { return oracle::inverse_gaussian_cdf(x, 1.0, 1.0); }) <= 0.01);
    const GigDistribution gen(GigParams(0.7, 0.9, 1.3));
    CHECK(ks_test(draw(kN, 9, [&](Rng& r) { return gen.sample(r); }), [&](double x) { return gen.cdf(x); }, "gig")
              .statistic <= 0.01);
    const auto e = draw(kN, 10, [](Rng& r) { return gig_sample(GigParams(1.0, 0.0, 2.0), r); });
    CHECK(std::abs(estimate_mean(e).mean - 1.0) <= 3.0 / std::sqrt(kN));
    CHECK(gen.cdf(0.0) == 0.0);
    CHECK(gen.cdf(1e6) == doctest::Approx(1.0));
}

TEST_CASE("gg density") {
    for (double x : {0.1, 1.0, 5.0}) {
        CHECK(gg_density(GgParams(1.0, 1.0, 2.0), x) == doctest::Approx(0.5 * std::exp(-x / 2.0)));
        CHECK(gg_density(GgParams(2.0, 1.0, 1.5), x) == doctest::Approx(2 * x / 2.25 * std::exp(-x * x / 2.25)));
        CHECK(gg_density(GgParams(-1.3, 2.2, 0.7), x) == doctest::Approx(gg_reference_density(-1.3, 2.2, 0.7, x)));
    }
    CHECK(gg_density(GgParams(1.0, 1.0, 2.0), 0.0) == doctest::Approx(0.5));
    const double mean = integrate([](double x) { return x * gg_density(GgParams(0.5, 1.0, 1.0), x); }, 0.0, kInf);
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-8));
    for (const GgParams p : {GgParams(0.5, 1, 1), GgParams(2, 3, 0.5), GgParams(-1, 2, 1), GgParams(1, 0.3, 4)})
        CHECK(std::abs(integrate([&](double x) { return gg_density(p, x); }, 0.0, kInf) - 1.0) <= 1e-6);
}

TEST_CASE("gg sampler") {
    const auto erlang = draw(kN, 11, [](Rng& r) { return gg_sample(GgParams(1.0, 2.0, 1.0), r); });
    const auto m = estimate_mean(erlang);
    CHECK(std::abs(m.mean - 2.0) < 4.0 * m.standard_error);
    const auto weibull = draw(kN, 12, [](Rng& r) { return gg_sample(GgParams(0.5, 1.0, 1.0), r); });
    CHECK(oracle::ks(weibull, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-std::sqrt(x)); }) <= 0.01);
    auto inv = draw(kN, 13, [](Rng& r) { return 1.0 / gg_sample(GgParams(-1.0, 2.0, 1.0), r); });
    CHECK(oracle::ks(inv, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x) * (1.0 + x); }) <= 0.01);
    const GgDistribution d(GgParams(2.0, 3.0, 0.5));
    CHECK(d.cdf(0.5) == doctest::Approx(oracle::gamma_p(3.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("mixing laws") {
    const auto levy = MixingLaw::one_sided_stable(0.5);
    for (double u : {0.2, 1.0, 7.0}) CHECK(levy.cdf(u) == doctest::Approx(oracle::levy_cdf(u)).epsilon(1e-6));
    const auto point = MixingLaw::degenerate(2.0);
    CHECK(point.cdf(1.999) == 0.0);
    CHECK(point.cdf(2.0) == 1.0);
    Rng rng(1, 0);
    CHECK(point.sample(rng) == 2.0);
    const auto emp = MixingLaw::empirical({3.0, 1.0, 2.0, 4.0});
    CHECK(emp.cdf(2.5) == doctest::Approx(0.5));
    CHECK_THROWS(MixingLaw::degenerate(-1.0));
    CHECK_THROWS(MixingLaw::one_sided_stable(1.5));
}

TEST_CASE("nvmm cdf") {
    for (double x : {-2.0, -0.3, 0.0, 1.1})
        CHECK(nvmm_cdf(NvmmSpec(0.0, 1.0, MixingLaw::degenerate(1.0)), x) == doctest::Approx(oracle::phi_cdf(x)).epsilon(1e-9));
    CHECK(std::abs(nvmm_cdf(NvmmSpec(0.0, std::numbers::sqrt2, MixingLaw::one_sided_stable(0.5)), 1.0) - 0.75) <= 1e-6);
    CHECK(std::abs(nvmm_cdf(NvmmSpec(0.0, 1.0, MixingLaw::gig(GigParams(-0.5, 1, 1))), 0.0) - 0.5) <= 1e-6);
    CHECK(std::abs(nvmm_cdf(NvmmSpec(0.0, 1.0, MixingLaw::gg(GgParams(0.5, 1, 1))), 0.0) - 0.5) <= 1e-6);
    const NvmmSpec gh(1.0, 1.0, MixingLaw::gig(GigParams(-0.5, 1, 1)));
    double prev = 0.0;
    for (double x = -4.0; x <= 6.0; x += 0.5) {
        const double f = nvmm_cdf(gh, x);
        CHECK(f >= prev - 1e-9);
        prev = f;
    }
    const double mass = integrate([&](double x) { return nvmm_density(gh, x); }, -kInf, kInf);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
}

TEST_CASE("nvmm sampler matches its cdf") {
    const auto normal4 = draw(kN, 14, [](Rng& r) { return nvmm_sample(NvmmSpec(0.0, 1.0, MixingLaw::degenerate(4.0)), r); });
    CHECK(oracle::ks(normal4, [](double x) { return oracle::phi_cdf(x / 2.0); }) <= 0.01);
    for (const NvmmSpec& spec : {NvmmSpec(1.0, 1.0, MixingLaw::gig(GigParams(-0.5, 1, 1))),
                                 NvmmSpec(0.0, 1.0, MixingLaw::gg(GgParams(0.5, 1, 1)))}) {
        const auto x = draw(kN, 15, [&](Rng& r) { return nvmm_sample(spec, r); });
        CHECK(ks_test(x, [&](double v) { return nvmm_cdf(spec, v); }, "nvmm").statistic <= 0.01);
    }
}

TEST_CASE("product and mixed-exponential identities") {
    Rng rng(77, 0);
    CHECK(stable_product_check(2.0, 0.5, 100000, rng).statistic <= 0.01);
    CHECK(stable_product_check(1.0, 0.5, 100000, rng).statistic <= 0.015);
    CHECK(stable_product_check(2.0, 0.99, 100000, rng).statistic <= 0.015);
    for (double nu : {1.0, 0.5, 0.8}) CHECK(weibull_mixed_exponential_check(nu, 100000, rng).statistic <= 0.01);
    CHECK_THROWS(weibull_mixed_exponential_check(1.5, 10, rng));
}

TEST_CASE("oracles") {
    const auto c = cauchy_oracle(2.0);
    CHECK(c.cdf(2.0) == doctest::Approx(0.75));
    CHECK(c.density(0.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
    const auto n = normal_oracle(1.0, 2.0);
    CHECK(n.cdf(1.0) == doctest::Approx(0.5));
    const auto s = stable_oracle(StableParams(1.0, 0.0));
    CHECK(s.cdf(1.0) == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("symmetric mixtures are symmetric") {
    for (const NvmmSpec& spec : {NvmmSpec(0.0, 1.0, MixingLaw::gig(GigParams(-0.5, 1, 1))),
                                 NvmmSpec(0.0, 2.0, MixingLaw::gg(GgParams(0.5, 1, 1))),
                                 NvmmSpec(0.0, 1.0, MixingLaw::gig(GigParams(1.5, 0.5, 2)))})
        for (double x : {0.1, 0.7, 2.0, 5.0}) CHECK(std::abs(nvmm_cdf(spec, -x) + nvmm_cdf(spec, x) - 1.0) <= 1e-6);
}

TEST_CASE("moments of order alpha do not settle") {
    // Median of block means of Z^rho: stable in the block size for rho < alpha,
    // growing like log(size) at rho = alpha.
    Rng rng(31, 0);
    auto median_block_mean = [&](double rho, std::size_t size) {
        std::vector<double> means(201);
        for (auto& m : means) {
            double s = 0.0;
            for (std::size_t i = 0; i < size; ++i) s += std::pow(stable_sample(StableParams(0.5, 1.0), rng), rho);
            m = s / double(size);
        }
        std::nth_element(means.begin(), means.begin() + 100, means.end());
        return means[100];
    };
    const double finite_small = median_block_mean(0.25, 100), finite_large = median_block_mean(0.25, 10000);
    const double infinite_small = median_block_mean(0.5, 100), infinite_large = median_block_mean(0.5, 10000);
    CHECK(std::abs(finite_large - finite_small) < 0.1 * finite_large);
    CHECK(infinite_large - infinite_small > 2.0);
}
