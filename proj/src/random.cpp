#include "coxsim/random.hpp"

#include "coxsim/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coxsim {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

void RandomStream::refill() {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(counter, key);
    buffer_[0] = (std::uint64_t(out[1]) << 32) | out[0];
    buffer_[1] = (std::uint64_t(out[3]) << 32) | out[2];
    available_ = 2;
    ++position_;
}

RandomStream::result_type RandomStream::operator()() {
    if (available_ == 0) refill();
    return buffer_[2 - available_--];
}

double RandomStream::uniform() {
    return (double((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    return r * std::cos(2.0 * std::numbers::pi * rng.uniform());
}

double standard_exponential(Rng& rng) { return -std::log(rng.uniform()); }

double gamma_sample(double shape, Rng& rng) {
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw std::domain_error("gamma_sample: shape must be > 0");
    if (shape < 1.0) {
        const double boost = std::exp(std::log(rng.uniform()) / shape);
        return gamma_sample(shape + 1.0, rng) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

namespace detail {

double stirling_tail(double k) {
    if (k < 10.0) {
        return log_gamma(k + 1.0) - ((k + 0.5) * std::log(k + 1.0) - (k + 1.0) +
                                     0.5 * std::log(2.0 * std::numbers::pi));
    }
    const double z = k + 1.0;
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / z2) / z2) / z;
}

}  // namespace detail

namespace {

std::uint64_t binomial_inversion(std::uint64_t n, double p, Rng& rng) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = (double(n) + 1.0) * s;
    const double r0 = std::exp(double(n) * std::log1p(-p));
    for (;;) {
        double r = r0;
        double u = rng.uniform();
        std::uint64_t k = 0;
        bool overflow = false;
        while (u > r) {
            u -= r;
            ++k;
            if (k > n) {
                overflow = true;
                break;
            }
            r *= a / double(k) - s;
        }
        if (!overflow) return k;
    }
}

std::uint64_t binomial_btrs(std::uint64_t n_int, double p, Rng& rng) {
    const double n = double(n_int);
    const double spq = std::sqrt(n * p * (1.0 - p));
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double r = p / (1.0 - p);
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((n + 1.0) * p);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (k < 0.0 || k > n) continue;
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        v = std::log(v * alpha / (a / (us * us) + b));
        const double u1 = k + 1.0;
        const double v1 = n - k + 1.0;
        const double bound = (m + 0.5) * std::log1p((m - k) / u1) +
                             (n - m + 0.5) * std::log1p((k - m) / v1) +
                             (k - m) * (std::log(r) - std::log(u1 / v1)) +
                             detail::stirling_tail(m) + detail::stirling_tail(n - m) -
                             detail::stirling_tail(k) - detail::stirling_tail(n - k);
        if (v <= bound) return static_cast<std::uint64_t>(k);
    }
}

}  // namespace

std::uint64_t binomial_sample(std::uint64_t n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_sample: p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial_sample(n, 1.0 - p, rng);
    if (double(n) * p < 10.0) return binomial_inversion(n, p, rng);
    return binomial_btrs(n, p, rng);
}

}  // namespace coxsim
