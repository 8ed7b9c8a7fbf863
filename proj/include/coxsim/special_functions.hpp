#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace coxsim {

// Tolerances for adaptive quadrature. Every numerical routine that integrates
// takes one of these so callers can trade accuracy for speed.
struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 1000;

    void validate() const;
};

// Raised when an integral does not reach its tolerance. Carries the best
// estimate so callers can decide whether it is usable anyway.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

struct IntegrationResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Standard normal distribution function, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// ln Gamma(x) for x > 0 (Lanczos, g = 7). Throws std::domain_error otherwise.
double log_gamma(double x);

/// Modified Bessel function of the third kind K_nu(z), z > 0.
///
/// Evaluated from K_nu(z) = int_0^inf cosh(nu u) exp(-z cosh u) du, which is
/// the integral representation y^(nu-1) exp(-z/2 (y + 1/y)) after y = e^u.
/// The integrand is even, entire and decays double-exponentially, so the
/// trapezoidal rule converges geometrically; the step is halved until two
/// successive sums agree to machine precision. Throws std::overflow_error
/// when K_nu(z) exceeds the double range (use log_bessel_k there).
double bessel_k(double nu, double z);

/// ln K_nu(z); finite wherever K_nu(z) is positive and finite in log space.
double log_bessel_k(double nu, double z);

/// Adaptive Gauss-Kronrod (7/15) quadrature with a global error queue.
///
/// Infinite endpoints are mapped onto finite ones: [a, inf) through
/// x = a + t / (1 - t), (-inf, b] through x = b - t / (1 - t), and
/// (-inf, inf) is split at zero. Nodes never touch interval endpoints, so
/// integrable endpoint singularities are fine.
///
/// Throws IntegrationError if the tolerance is not met within
/// spec.max_subdivisions bisections.
double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec = {});

/// Same as integrate() but returns the error estimate instead of throwing.
IntegrationResult integrate_detailed(const std::function<double(double)>& f, double lower,
                                     double upper, const QuadratureSpec& spec = {});

// Characteristic function s -> E exp(isX). The optional envelope is a
// nonincreasing upper bound on |cf(s)| for s > 0; when absent |cf(s)| is used.
struct CharacteristicFn {
    std::function<std::complex<double>(double)> eval;
    std::function<double(double)> envelope;

    std::complex<double> operator()(double s) const { return eval(s); }
    double bound(double s) const { return envelope ? envelope(s) : std::abs(eval(s)); }
};

/// Distribution function recovered from a characteristic function by
/// Gil-Pelaez inversion, F(x) = 1/2 - (1/pi) int_0^inf Im[e^{-isx} cf(s)] / s ds.
///
/// The half-line is cut into sections: doubling widths up to the
/// half-period pi/|x| of e^{-isx}, then sections of exactly that half-period.
/// Summation stops once the envelope bound |cf(s)|/s falls below 1e-12; if
/// that takes more than a few hundred half-periods the remaining alternating
/// tail is summed by Wynn's epsilon algorithm. The result is clamped to [0, 1].
double cdf_from_cf(const CharacteristicFn& cf, double x, const QuadratureSpec& spec = {});

}  // namespace coxsim
