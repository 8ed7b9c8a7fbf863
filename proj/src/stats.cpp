#include "coxsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coxsim {

double dkw_99(double n) {
    if (!(n > 0.0)) return 1.0;
    return std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
}

double ks_statistic_sorted(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    const double n = double(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, (double(i) + 1.0) / n - f, f - double(i) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

KsReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 std::string reference, std::size_t knots) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    KsReport report;
    report.n_samples = double(n);
    report.dkw_99 = dkw_99(double(n));
    report.reference = std::move(reference);
    if (knots < 2 || n <= knots) {
        report.statistic = ks_statistic_sorted(sample, cdf);
        return report;
    }
    std::vector<std::size_t> ranks(knots);
    std::vector<double> values(knots);
    for (std::size_t j = 0; j < knots; ++j) {
        ranks[j] = static_cast<std::size_t>(std::llround(double(j) * double(n - 1) / double(knots - 1)));
        values[j] = cdf(sample[ranks[j]]);
    }
    // Running maximum guards against small non-monotone wiggles in numerical CDFs.
    for (std::size_t j = 1; j < knots; ++j) values[j] = std::max(values[j], values[j - 1]);

    double d = 0.0;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < knots - 1 && ranks[seg + 1] < i) ++seg;
        double f;
        const double x0 = sample[ranks[seg]];
        const double x1 = sample[ranks[seg + 1]];
        if (i == ranks[seg]) {
            f = values[seg];
        } else if (i == ranks[seg + 1]) {
            f = values[seg + 1];
        } else if (x1 > x0) {
            const double w = (sample[i] - x0) / (x1 - x0);
            f = values[seg] + w * (values[seg + 1] - values[seg]);
        } else {
            f = values[seg];
        }
        d = std::max({d, (double(i) + 1.0) / double(n) - f, f - double(i) / double(n)});
    }
    report.statistic = std::clamp(d, 0.0, 1.0);
    return report;
}

KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, std::string reference) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size());
    const double nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    KsReport report;
    report.statistic = d;
    report.n_samples = na * nb / (na + nb);
    report.dkw_99 = dkw_99(report.n_samples);
    report.reference = std::move(reference);
    return report;
}

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate est;
    est.n = values.size();
    if (values.empty()) return est;
    // Welford's update keeps the variance accurate for large means.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / double(k);
        m2 += delta * (v - mean);
    }
    est.mean = mean;
    if (k > 1) est.standard_error = std::sqrt(m2 / double(k - 1) / double(k));
    return est;
}

MeanEstimate estimate_proportion(std::size_t hits, std::size_t n) {
    MeanEstimate est;
    est.n = n;
    if (n == 0) return est;
    est.mean = double(hits) / double(n);
    est.standard_error = std::sqrt(est.mean * (1.0 - est.mean) / double(n));
    return est;
}

}  // namespace coxsim
