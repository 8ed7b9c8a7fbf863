#pragma once

#include "coxsim/random.hpp"
#include "coxsim/special_functions.hpp"
#include "coxsim/stats.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace coxsim {

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

/// Strictly stable law G_{alpha,theta} with characteristic function
///   g(s) = exp{-|s|^alpha exp{-(i/2) pi theta alpha sign s}},
/// 0 < alpha <= 2, |theta| <= min(1, 2/alpha - 1). theta = 0 is symmetric;
/// theta = 1 with alpha <= 1 is concentrated on the positive half-line.
struct StableParams {
    double alpha;
    double theta;

    StableParams(double alpha, double theta);

    static double theta_bound(double alpha);
    bool symmetric() const { return theta == 0.0; }
    bool one_sided() const { return theta == 1.0 && alpha <= 1.0; }
};

/// Generalized inverse Gaussian: density proportional to
/// x^(nu-1) exp{-(mu/x + lambda x)/2}. Domain: mu > 0, lambda >= 0 if nu < 0;
/// mu > 0, lambda > 0 if nu = 0; mu >= 0, lambda > 0 if nu > 0.
struct GigParams {
    double nu;
    double mu;
    double lambda;

    GigParams(double nu, double mu, double lambda);
};

/// Generalized gamma: power nu != 0, shape kappa > 0, scale delta > 0.
struct GgParams {
    double nu;
    double kappa;
    double delta;

    GgParams(double nu, double kappa, double delta);
};

// ---------------------------------------------------------------------------
// Stable laws
// ---------------------------------------------------------------------------

std::complex<double> stable_cf(const StableParams& p, double s);

/// g_{alpha,theta} packaged for cdf_from_cf, with the exact envelope
/// exp(-|s|^alpha cos(pi theta alpha / 2)).
CharacteristicFn stable_characteristic_fn(const StableParams& p);

/// G_{alpha,theta}(x) by characteristic-function inversion.
double stable_cdf(const StableParams& p, double x, const QuadratureSpec& spec = {});

/// Exact draw from G_{alpha,theta} (Chambers-Mallows-Stuck).
///
/// In Samorodnitsky-Taqqu form S(alpha, beta, c) the same law has
///   beta = tan(pi alpha theta / 2) / tan(pi alpha / 2),
///   c    = cos(pi alpha theta / 2)^(1/alpha),
/// and with that bijection the CMS shift and scale collapse to B = pi theta/2
/// and unit scale, so for U ~ Uniform(-pi/2, pi/2), W ~ Exp(1):
///   X = sin(alpha (U + B)) / cos(U)^(1/alpha)
///       * (cos(U - alpha (U + B)) / W)^((1 - alpha)/alpha).
/// For alpha = 1 only theta = 0 (Cauchy, X = tan U) is supported.
double stable_sample(const StableParams& p, Rng& rng);

/// Symmetric stable draw through the normal scale mixture: sqrt(V) * Z_{2,0}
/// with V ~ G_{alpha/2,1} and Z_{2,0} ~ N(0, 2), i.e. sqrt(2V) * N(0,1).
double stable_sample_via_mixture(double alpha, Rng& rng);

/// E Z^rho for Z ~ G_{alpha,1}, alpha < 1, 0 <= rho < alpha:
/// Gamma(1 - rho/alpha) / Gamma(1 - rho).
double one_sided_stable_moment(double alpha, double rho);

// ---------------------------------------------------------------------------
// GIG and GG laws
// ---------------------------------------------------------------------------

double gig_density(const GigParams& p, double x);
double gig_sample(const GigParams& p, Rng& rng);

double gg_density(const GgParams& p, double x);
double gg_sample(const GgParams& p, Rng& rng);

// Precomputed GIG law: normalizing constant and the ratio-of-uniforms box are
// computed once, which matters inside quadratures and sampling loops.
class GigDistribution {
public:
    explicit GigDistribution(GigParams params);

    const GigParams& params() const { return params_; }
    double density(double x) const;
    double log_density(double x) const;
    double cdf(double x, const QuadratureSpec& spec = {}) const;
    double sample(Rng& rng) const;
    double mode() const;

private:
    enum class Kind { Gamma, InverseGamma, General };

    GigParams params_;
    Kind kind_;
    double log_norm_ = 0.0;
    // Ratio-of-uniforms with mode shift for y^(p-1) exp(-omega/2 (y + 1/y)).
    double p_ = 0.0, omega_ = 0.0, eta_ = 1.0;
    double rou_mode_ = 0.0, rou_nc_ = 0.0, u_minus_ = 0.0, u_plus_ = 0.0;
};

class GgDistribution {
public:
    explicit GgDistribution(GgParams params);

    const GgParams& params() const { return params_; }
    double density(double x) const;
    double cdf(double x, const QuadratureSpec& spec = {}) const;
    double sample(Rng& rng) const;

private:
    GgParams params_;
    double log_norm_;
};

// ---------------------------------------------------------------------------
// Mixing laws and normal variance-mean mixtures
// ---------------------------------------------------------------------------

struct OneSidedStableLaw {
    StableParams params;  // theta = 1, alpha < 1
};

struct DegenerateLaw {
    double value;
};

struct EmpiricalLaw {
    std::shared_ptr<const std::vector<double>> sorted;
};

/// Law of the nonnegative mixing variable U.
class MixingLaw {
public:
    using Variant =
        std::variant<GigDistribution, GgDistribution, OneSidedStableLaw, DegenerateLaw, EmpiricalLaw>;

    static MixingLaw gig(GigParams p);
    static MixingLaw gg(GgParams p);
    static MixingLaw one_sided_stable(double alpha);
    static MixingLaw degenerate(double value);
    static MixingLaw empirical(std::vector<double> sample);

    const Variant& law() const { return law_; }
    bool has_density() const;
    double density(double u) const;
    double cdf(double u, const QuadratureSpec& spec = {}) const;
    double sample(Rng& rng) const;
    std::string describe() const;

private:
    explicit MixingLaw(Variant v) : law_(std::move(v)) {}
    Variant law_;
};

/// Law of a U + sigma sqrt(U) N with U ~ mixing, N ~ N(0,1) independent.
/// GIG mixing gives the generalized hyperbolic law, GG mixing the generalized
/// variance gamma law.
struct NvmmSpec {
    double a;
    double sigma;
    MixingLaw mixing;

    NvmmSpec(double a, double sigma, MixingLaw mixing);
};

/// F(x) = int_0^inf Phi((x - a u) / (sigma sqrt u)) dP(U < u).
/// One-sided stable mixing goes through the characteristic function
/// exp{-(sigma^2 s^2 / 2 - i a s)^alpha'} instead, since its density is not
/// available in closed form.
double nvmm_cdf(const NvmmSpec& spec, double x, const QuadratureSpec& qspec = {});
double nvmm_density(const NvmmSpec& spec, double x, const QuadratureSpec& qspec = {});
double nvmm_sample(const NvmmSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

struct DistributionOracle {
    std::string name;
    std::function<double(double)> cdf;
    std::function<double(double)> density;  // may be empty
    std::function<double(Rng&)> sampler;    // may be empty
};

DistributionOracle normal_oracle(double mean, double sd);
DistributionOracle cauchy_oracle(double scale);
DistributionOracle stable_oracle(const StableParams& p);
DistributionOracle nvmm_oracle(const NvmmSpec& spec);

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

/// KS distance between Z_{alpha,0} * Z_{alpha',1}^(1/alpha) and G_{alpha alpha',0}.
KsReport stable_product_check(double alpha, double alpha_prime, std::size_t n_samples, Rng& rng);

/// Two-route check of the mixed-exponential form of the Weibull law with
/// survival exp(-x^nu), 0 < nu <= 1: since exp(-x^nu) = E exp(-x V) for
/// V ~ G_{nu,1}, the Weibull variable equals E / V in law with E ~ Exp(1)
/// independent of V (V = 1 when nu = 1). Returns the two-sample KS distance
/// between gg_sample(nu, 1, 1) draws and E / V draws.
KsReport weibull_mixed_exponential_check(double nu, std::size_t n_samples, Rng& rng);

}  // namespace coxsim
