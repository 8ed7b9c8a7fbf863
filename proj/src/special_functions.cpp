#include "coxsim/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

namespace coxsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]; the Gauss nodes are
// the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    double err = std::abs(kronrod - gauss);
    if (!std::isfinite(kronrod)) err = kInf;
    return {a, b, kronrod, err};
}

IntegrationResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                                   const QuadratureSpec& spec) {
    if (a == b) return {};
    std::priority_queue<Segment> queue;
    Segment first = gauss_kronrod(f, a, b);
    double total = first.value;
    double total_err = first.error;
    queue.push(first);
    int splits = 0;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (splits >= spec.max_subdivisions) break;
        Segment worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted
        queue.pop();
        Segment left = gauss_kronrod(f, worst.a, mid);
        Segment right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++splits;
        // Re-sum periodically so cancellation in the running totals does not
        // accumulate.
        if (splits % 64 == 0) {
            auto copy = queue;
            total = 0.0;
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, total_err, splits};
}

// log cosh(y) without overflow.
double log_cosh(double y) {
    const double ay = std::abs(y);
    return ay + std::log1p(std::exp(-2.0 * ay)) - std::numbers::ln2;
}

// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
// last two even-column estimates so the caller can judge convergence.
std::pair<double, double> wynn_epsilon(const std::vector<double>& sums) {
    const std::size_t n = sums.size();
    std::vector<double> prev(n + 1, 0.0);  // column j - 1
    std::vector<double> cur(sums.begin(), sums.end());
    double best = sums.back();
    double second = sums.size() > 1 ? sums[n - 2] : best;
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<double> next(n - col);
        bool ok = true;
        for (std::size_t k = 0; k + col < n; ++k) {
            const double diff = cur[k + 1] - cur[k];
            if (diff == 0.0 || !std::isfinite(diff)) {
                ok = false;
                break;
            }
            next[k] = prev[k + 1] + 1.0 / diff;
        }
        if (!ok) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0 && cur.size() >= 2) {
            best = cur.back();
            second = cur[cur.size() - 2];
        }
    }
    return {best, second};
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
    if (max_subdivisions < 1)
        throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma: x must be > 0");
    if (x == 1.0 || x == 2.0) return 0.0;
    if (x < 0.5) {
        // Reflection keeps the Lanczos sum away from its poles.
        return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    }
    static constexpr std::array<double, 9> coeff = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double g = 7.0;
    const double xm1 = x - 1.0;
    double series = coeff[0];
    for (std::size_t i = 1; i < coeff.size(); ++i) series += coeff[i] / (xm1 + double(i));
    const double t = xm1 + g + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

double log_bessel_k(double nu, double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("bessel_k: z must be > 0");
    if (!std::isfinite(nu)) throw std::domain_error("bessel_k: order must be finite");
    nu = std::abs(nu);

    // Scaled log-integrand: K_nu(z) = e^{-z} int_0^inf exp(g(u)) du.
    auto g = [nu, z](double u) {
        const double half_sinh = std::sinh(0.5 * u);
        return -2.0 * z * half_sinh * half_sinh + log_cosh(nu * u);
    };
    auto slope = [nu, z](double u) { return -z * std::sinh(u) + nu * std::tanh(nu * u); };

    // Peak of g: at zero when nu^2 <= z, else the unique positive root of g'.
    double peak = 0.0;
    if (nu * nu > z) {
        double lo = 0.0;
        double hi = std::asinh(nu / z) + 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope(mid) > 0.0 ? lo : hi) = mid;
        }
        peak = 0.5 * (lo + hi);
    }
    const double g_peak = g(peak);
    const double curvature =
        z * std::cosh(peak) - nu * nu / std::pow(std::cosh(nu * peak), 2);
    double h = 0.5;
    if (curvature > 0.0) h = std::min(h, 0.5 / std::sqrt(curvature));

    constexpr double kCutoff = -60.0;  // e^-60 relative to the peak is negligible
    // Trapezoid sum over u = offset + j*step for j >= 0 (offset is 0 or step/2).
    auto sweep = [&](double step, double offset) {
        double sum = 0.0;
        for (long j = 0;; ++j) {
            const double u = offset + double(j) * step;
            const double v = g(u) - g_peak;
            if (u > peak && v < kCutoff) break;
            if (v > kCutoff) sum += std::exp(v);
            if (j > 50'000'000) break;
        }
        return sum;
    };
    // Half weight at u = 0 (the integrand is even).
    double trap = h * (sweep(h, 0.0) - 0.5 * std::exp(g(0.0) - g_peak));
    for (int level = 0; level < 30; ++level) {
        const double mid_sum = sweep(h, 0.5 * h);
        const double refined = 0.5 * trap + 0.5 * h * mid_sum;
        h *= 0.5;
        const bool done = std::abs(refined - trap) <= 1e-15 * refined;
        trap = refined;
        if (done && level >= 1) break;
    }
    return -z + g_peak + std::log(trap);
}

double bessel_k(double nu, double z) {
    const double lk = log_bessel_k(nu, z);
    if (lk > std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("bessel_k: K_nu(z) overflows a double; use log_bessel_k");
    return std::exp(lk);
}

IntegrationResult integrate_detailed(const std::function<double(double)>& f, double lower,
                                     double upper, const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(lower) || std::isnan(upper)) throw std::invalid_argument("integrate: NaN limit");
    if (lower == upper) return {};
    if (lower > upper) {
        auto r = integrate_detailed(f, upper, lower, spec);
        r.value = -r.value;
        return r;
    }
    const bool lower_inf = std::isinf(lower);
    const bool upper_inf = std::isinf(upper);
    if (lower_inf && upper_inf) {
        auto left = integrate_detailed(f, -kInf, 0.0, spec);
        auto right = integrate_detailed(f, 0.0, kInf, spec);
        return {left.value + right.value, left.error + right.error,
                left.subdivisions + right.subdivisions};
    }
    if (upper_inf) {
        auto g = [&f, lower](double t) {
            const double om = 1.0 - t;
            return f(lower + t / om) / (om * om);
        };
        return integrate_finite(g, 0.0, 1.0, spec);
    }
    if (lower_inf) {
        auto g = [&f, upper](double t) {
            const double om = 1.0 - t;
            return f(upper - t / om) / (om * om);
        };
        return integrate_finite(g, 0.0, 1.0, spec);
    }
    return integrate_finite(f, lower, upper, spec);
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec) {
    auto r = integrate_detailed(f, lower, upper, spec);
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
    if (!(r.error <= target)) {
        throw IntegrationError("integrate: tolerance not reached after " +
                                   std::to_string(r.subdivisions) + " subdivisions",
                               r.value, r.error);
    }
    return r.value;
}

double cdf_from_cf(const CharacteristicFn& cf, double x, const QuadratureSpec& spec) {
    spec.validate();
    if (!std::isfinite(x)) return x > 0 ? 1.0 : 0.0;

    auto integrand = [&cf, x](double s) {
        const std::complex<double> v = std::polar(1.0, -s * x) * cf(s);
        return v.imag() / s;
    };

    constexpr double kEnvelopeStop = 1e-12;
    constexpr int kDirectSections = 200;
    constexpr int kMaxSections = 6400;
    constexpr std::size_t kWynnTerms = 41;

    QuadratureSpec piece_spec = spec;
    piece_spec.abs_tol = std::min(spec.abs_tol, 1e-13);

    const double half_period = x != 0.0 ? kPi / std::abs(x) : kInf;
    double total = 0.0;
    double a = 0.0;
    double width = std::min(1.0, half_period);
    std::vector<double> alternating_sums;
    int next_extrapolation = kDirectSections;
    double last_estimate = std::numeric_limits<double>::quiet_NaN();

    for (int section = 0;; ++section) {
        double b = a + width;
        if (width < half_period && b >= half_period) b = half_period;
        auto piece = integrate_detailed(integrand, a, b, piece_spec);
        total += piece.value;
        a = b;
        if (a < half_period) {
            width = std::min(2.0 * width, half_period - a);
        } else {
            width = half_period;
            alternating_sums.push_back(total);
        }
        if (cf.bound(a) / a < kEnvelopeStop) break;

        if (static_cast<int>(alternating_sums.size()) >= next_extrapolation) {
            std::vector<double> tail(alternating_sums.end() - kWynnTerms, alternating_sums.end());
            auto [best, second] = wynn_epsilon(tail);
            const double err = std::abs(best - second);
            if (err < 1e-9 || (std::isfinite(last_estimate) && std::abs(best - last_estimate) < 1e-9)) {
                total = best;
                break;
            }
            last_estimate = best;
            next_extrapolation *= 2;
            if (next_extrapolation > kMaxSections) {
                if (err < 1e-7) {
                    total = best;
                    break;
                }
                throw IntegrationError("cdf_from_cf: oscillatory tail did not converge",
                                       std::clamp(0.5 - best / kPi, 0.0, 1.0), err / kPi);
            }
        }
        if (section > 100'000) {
            throw IntegrationError("cdf_from_cf: characteristic function decays too slowly",
                                   std::clamp(0.5 - total / kPi, 0.0, 1.0), kInf);
        }
    }
    return std::clamp(0.5 - total / kPi, 0.0, 1.0);
}

}  // namespace coxsim
