#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace coxsim {

/// 99% Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/0.01) / (2n)).
double dkw_99(double n);

// Empirical-vs-reference comparison. For two-sample comparisons n_samples is
// the effective size n1*n2/(n1+n2), which is what the DKW width scales with.
struct KsReport {
    double statistic = 0.0;
    double n_samples = 0.0;
    double dkw_99 = 0.0;
    std::string reference;

    bool within(double tolerance) const { return statistic <= tolerance; }
};

/// sup_x |F_n(x) - F(x)| for a sorted sample; ties are handled.
double ks_statistic_sorted(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// KS against a reference CDF. When the sample is larger than `knots`, the
/// reference is evaluated only at `knots` sample quantiles (including both
/// extremes) and linearly interpolated in between; useful when the CDF is a
/// quadrature or a transform inversion.
KsReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 std::string reference, std::size_t knots = 2001);

/// Two-sample KS statistic sup_x |F_n(x) - G_m(x)|.
KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, std::string reference);

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

/// Bernoulli proportion with its binomial standard error.
MeanEstimate estimate_proportion(std::size_t hits, std::size_t n);

}  // namespace coxsim
