#include "coxsim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace coxsim {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo);
    double x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

double mixture_point(double x, double a, double sigma, double u) {
    return normal_cdf((x - a * u) / (sigma * std::sqrt(u)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

double StableParams::theta_bound(double alpha) { return std::min(1.0, 2.0 / alpha - 1.0); }

StableParams::StableParams(double alpha_, double theta_) : alpha(alpha_), theta(theta_) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0,2]");
    if (!std::isfinite(theta) || std::abs(theta) > theta_bound(alpha) + 1e-12)
        throw std::invalid_argument("theta must satisfy |theta| <= min(1, 2/alpha - 1)");
}

GigParams::GigParams(double nu_, double mu_, double lambda_) : nu(nu_), mu(mu_), lambda(lambda_) {
    if (!std::isfinite(nu) || !std::isfinite(mu) || !std::isfinite(lambda))
        throw std::invalid_argument("GIG parameters must be finite");
    if (nu < 0.0 && !(mu > 0.0 && lambda >= 0.0))
        throw std::invalid_argument("GIG with nu < 0 requires mu > 0 and lambda >= 0");
    if (nu == 0.0 && !(mu > 0.0 && lambda > 0.0))
        throw std::invalid_argument("GIG with nu = 0 requires mu > 0 and lambda > 0");
    if (nu > 0.0 && !(mu >= 0.0 && lambda > 0.0))
        throw std::invalid_argument("GIG with nu > 0 requires mu >= 0 and lambda > 0");
}

GgParams::GgParams(double nu_, double kappa_, double delta_) : nu(nu_), kappa(kappa_), delta(delta_) {
    if (!std::isfinite(nu) || nu == 0.0) throw std::invalid_argument("GG power nu must be nonzero");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("GG shape kappa must be > 0");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("GG scale delta must be > 0");
}

// ---------------------------------------------------------------------------
// Stable laws
// ---------------------------------------------------------------------------

std::complex<double> stable_cf(const StableParams& p, double s) {
    if (s == 0.0) return 1.0;
    const double sign = s > 0.0 ? 1.0 : -1.0;
    const double phase = -0.5 * kPi * p.theta * p.alpha * sign;
    const double mag = std::pow(std::abs(s), p.alpha);
    return std::exp(-mag * std::polar(1.0, phase));
}

CharacteristicFn stable_characteristic_fn(const StableParams& p) {
    const double damping = std::cos(0.5 * kPi * p.theta * p.alpha);
    return {[p](double s) { return stable_cf(p, s); },
            [alpha = p.alpha, damping](double s) {
                return std::exp(-std::pow(std::abs(s), alpha) * damping);
            }};
}

double stable_cdf(const StableParams& p, double x, const QuadratureSpec& spec) {
    if (p.alpha == 1.0 && std::abs(p.theta) == 1.0) {
        // exp(i theta s): point mass at theta.
        return x >= p.theta ? 1.0 : 0.0;
    }
    if (p.one_sided() && x <= 0.0) return 0.0;
    return cdf_from_cf(stable_characteristic_fn(p), x, spec);
}

double stable_sample(const StableParams& p, Rng& rng) {
    const double alpha = p.alpha;
    const double u = kPi * (rng.uniform() - 0.5);
    if (alpha == 1.0) {
        if (p.theta != 0.0)
            throw std::domain_error("stable_sample: alpha = 1 supports only theta = 0");
        return std::tan(u);
    }
    const double w = standard_exponential(rng);
    const double shifted = alpha * (u + 0.5 * kPi * p.theta);
    const double lead = std::sin(shifted) / std::pow(std::cos(u), 1.0 / alpha);
    const double tail = std::pow(std::cos(u - shifted) / w, (1.0 - alpha) / alpha);
    return lead * tail;
}

double stable_sample_via_mixture(double alpha, Rng& rng) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("stable_sample_via_mixture: alpha must lie in (0,2)");
    const double v = stable_sample(StableParams(0.5 * alpha, 1.0), rng);
    return std::sqrt(2.0 * v) * standard_normal(rng);
}

double one_sided_stable_moment(double alpha, double rho) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("one-sided stable requires alpha in (0,1)");
    if (!(rho >= 0.0 && rho < alpha)) throw std::invalid_argument("moment order must lie in [0, alpha)");
    return std::exp(log_gamma(1.0 - rho / alpha) - log_gamma(1.0 - rho));
}

// ---------------------------------------------------------------------------
// GIG
// ---------------------------------------------------------------------------

GigDistribution::GigDistribution(GigParams params) : params_(params) {
    const double nu = params_.nu, mu = params_.mu, lambda = params_.lambda;
    if (mu == 0.0) {
        kind_ = Kind::Gamma;  // shape nu, rate lambda/2
        log_norm_ = nu * std::log(0.5 * lambda) - log_gamma(nu);
        return;
    }
    if (lambda == 0.0) {
        kind_ = Kind::InverseGamma;  // shape -nu, scale mu/2
        log_norm_ = -nu * std::log(0.5 * mu) - log_gamma(-nu);
        return;
    }
    kind_ = Kind::General;
    omega_ = std::sqrt(mu * lambda);
    eta_ = std::sqrt(mu / lambda);
    log_norm_ = 0.5 * nu * (std::log(lambda) - std::log(mu)) - std::numbers::ln2 - log_bessel_k(nu, omega_);

    // Sampling box for y^(p-1) exp(-omega/2 (y + 1/y)), p = |nu|.
    p_ = std::abs(nu);
    const double t = 0.5 * (p_ - 1.0);
    const double s = 0.25 * omega_;
    rou_mode_ = p_ >= 1.0 ? ((p_ - 1.0) + std::sqrt((p_ - 1.0) * (p_ - 1.0) + omega_ * omega_)) / omega_
                          : omega_ / (std::sqrt((1.0 - p_) * (1.0 - p_) + omega_ * omega_) + (1.0 - p_));
    const double m = rou_mode_;
    auto log_sqrt_f = [t, s](double y) { return t * std::log(y) - s * (y + 1.0 / y); };
    rou_nc_ = log_sqrt_f(m);
    auto right = [&](double w) {
        const double y = m * std::exp(w);
        return std::log(y - m) + log_sqrt_f(y) - rou_nc_;
    };
    auto left = [&](double w) {
        const double y = m * std::exp(-w);
        return std::log(m - y) + log_sqrt_f(y) - rou_nc_;
    };
    const double w_plus = golden_max(right, 0.0, 60.0);
    const double w_minus = golden_max(left, 0.0, 60.0);
    // A slightly enlarged box keeps the sampler exact despite the finite
    // precision of the maximization.
    u_plus_ = std::exp(right(w_plus)) * (1.0 + 1e-9);
    u_minus_ = -std::exp(left(w_minus)) * (1.0 + 1e-9);
}

double GigDistribution::log_density(double x) const {
    if (!(x > 0.0)) throw std::domain_error("GIG density requires x > 0");
    const double nu = params_.nu;
    switch (kind_) {
        case Kind::Gamma:
            return log_norm_ + (nu - 1.0) * std::log(x) - 0.5 * params_.lambda * x;
        case Kind::InverseGamma:
            return log_norm_ + (nu - 1.0) * std::log(x) - 0.5 * params_.mu / x;
        case Kind::General:
            break;
    }
    return log_norm_ + (nu - 1.0) * std::log(x) - 0.5 * (params_.mu / x + params_.lambda * x);
}

double GigDistribution::density(double x) const { return std::exp(log_density(x)); }

double GigDistribution::mode() const {
    const double nu = params_.nu, mu = params_.mu, lambda = params_.lambda;
    // Root of lambda x^2 - 2 (nu - 1) x - mu = 0.
    if (lambda == 0.0) return mu / (2.0 * (1.0 - nu));
    if (mu == 0.0) return nu > 1.0 ? 2.0 * (nu - 1.0) / lambda : 0.0;
    return ((nu - 1.0) + std::sqrt((nu - 1.0) * (nu - 1.0) + mu * lambda)) / lambda;
}

double GigDistribution::cdf(double x, const QuadratureSpec& spec) const {
    if (!(x > 0.0)) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    auto f = [this](double u) { return u > 0.0 ? density(u) : 0.0; };
    const double split = std::max(mode(), 1e-300);
    double v;
    if (x <= split) {
        v = integrate(f, 0.0, x, spec);
    } else {
        v = 1.0 - integrate(f, x, kInf, spec);
    }
    return std::clamp(v, 0.0, 1.0);
}

double GigDistribution::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::Gamma:
            return gamma_sample(params_.nu, rng) / (0.5 * params_.lambda);
        case Kind::InverseGamma:
            return 0.5 * params_.mu / gamma_sample(-params_.nu, rng);
        case Kind::General:
            break;
    }
    const double t = 0.5 * (p_ - 1.0);
    const double s = 0.25 * omega_;
    double y;
    for (;;) {
        const double u = u_minus_ + rng.uniform() * (u_plus_ - u_minus_);
        const double v = rng.uniform();
        y = u / v + rou_mode_;
        if (y <= 0.0) continue;
        if (std::log(v) <= t * std::log(y) - s * (y + 1.0 / y) - rou_nc_) break;
    }
    return params_.nu >= 0.0 ? eta_ * y : eta_ / y;
}

double gig_density(const GigParams& p, double x) { return GigDistribution(p).density(x); }

double gig_sample(const GigParams& p, Rng& rng) { return GigDistribution(p).sample(rng); }

// ---------------------------------------------------------------------------
// GG
// ---------------------------------------------------------------------------

GgDistribution::GgDistribution(GgParams params) : params_(params) {
    log_norm_ = std::log(std::abs(params_.nu)) - params_.kappa * params_.nu * std::log(params_.delta) -
                log_gamma(params_.kappa);
}

double GgDistribution::density(double x) const {
    if (x < 0.0 || std::isnan(x)) throw std::domain_error("GG density requires x >= 0");
    const double nu = params_.nu, kappa = params_.kappa;
    if (x == 0.0) {
        // Right limit at the origin.
        if (nu < 0.0) return 0.0;
        const double power = kappa * nu - 1.0;
        if (power > 0.0) return 0.0;
        if (power < 0.0) return kInf;
        return std::exp(log_norm_);
    }
    const double z = std::pow(x / params_.delta, nu);
    return std::exp(log_norm_ + (kappa * nu - 1.0) * std::log(x) - z);
}

double GgDistribution::cdf(double x, const QuadratureSpec& spec) const {
    if (!(x > 0.0)) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    auto f = [this](double u) { return u > 0.0 ? density(u) : 0.0; };
    double v;
    if (x <= params_.delta) {
        v = integrate(f, 0.0, x, spec);
    } else {
        v = 1.0 - integrate(f, x, kInf, spec);
    }
    return std::clamp(v, 0.0, 1.0);
}

double GgDistribution::sample(Rng& rng) const {
    return params_.delta * std::pow(gamma_sample(params_.kappa, rng), 1.0 / params_.nu);
}

double gg_density(const GgParams& p, double x) { return GgDistribution(p).density(x); }

double gg_sample(const GgParams& p, Rng& rng) { return GgDistribution(p).sample(rng); }

// ---------------------------------------------------------------------------
// Mixing laws
// ---------------------------------------------------------------------------

MixingLaw MixingLaw::gig(GigParams p) { return MixingLaw(GigDistribution(p)); }

MixingLaw MixingLaw::gg(GgParams p) { return MixingLaw(GgDistribution(p)); }

MixingLaw MixingLaw::one_sided_stable(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("one-sided stable mixing requires alpha in (0,1)");
    return MixingLaw(OneSidedStableLaw{StableParams(alpha, 1.0)});
}

MixingLaw MixingLaw::degenerate(double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("degenerate mixing point must be > 0");
    return MixingLaw(DegenerateLaw{value});
}

MixingLaw MixingLaw::empirical(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical mixing law needs at least one point");
    for (double v : sample)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("empirical mixing sample must be positive and finite");
    std::sort(sample.begin(), sample.end());
    return MixingLaw(EmpiricalLaw{std::make_shared<const std::vector<double>>(std::move(sample))});
}

namespace {

// Levy law G_{1/2,1}: density u^{-3/2} exp(-1/(4u)) / (2 sqrt(pi)).
double levy_half_density(double u) {
    if (!(u > 0.0)) return 0.0;
    return std::exp(-1.0 / (4.0 * u)) / (2.0 * std::sqrt(kPi) * u * std::sqrt(u));
}

}  // namespace

bool MixingLaw::has_density() const {
    return std::visit(
        [](const auto& law) -> bool {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, GigDistribution> || std::is_same_v<T, GgDistribution>) {
                return true;
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                return law.params.alpha == 0.5;
            } else {
                return false;
            }
        },
        law_);
}

double MixingLaw::density(double u) const {
    return std::visit(
        [u](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, GigDistribution> || std::is_same_v<T, GgDistribution>) {
                return u > 0.0 ? law.density(u) : 0.0;
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                if (law.params.alpha != 0.5)
                    throw std::domain_error("one-sided stable density is only available for alpha = 1/2");
                return levy_half_density(u);
            } else {
                throw std::domain_error("mixing law has no density");
            }
        },
        law_);
}

double MixingLaw::cdf(double u, const QuadratureSpec& spec) const {
    return std::visit(
        [u, &spec](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, GigDistribution> || std::is_same_v<T, GgDistribution>) {
                return law.cdf(u, spec);
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                if (law.params.alpha == 0.5) return u > 0.0 ? std::erfc(0.5 / std::sqrt(u)) : 0.0;
                return stable_cdf(law.params, u, spec);
            } else if constexpr (std::is_same_v<T, DegenerateLaw>) {
                return u >= law.value ? 1.0 : 0.0;
            } else {
                const auto& s = *law.sorted;
                return double(std::upper_bound(s.begin(), s.end(), u) - s.begin()) / double(s.size());
            }
        },
        law_);
}

double MixingLaw::sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, GigDistribution> || std::is_same_v<T, GgDistribution>) {
                return law.sample(rng);
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                return stable_sample(law.params, rng);
            } else if constexpr (std::is_same_v<T, DegenerateLaw>) {
                return law.value;
            } else {
                const auto& s = *law.sorted;
                const auto idx = static_cast<std::size_t>(rng.uniform() * double(s.size()));
                return s[std::min(idx, s.size() - 1)];
            }
        },
        law_);
}

std::string MixingLaw::describe() const {
    return std::visit(
        [](const auto& law) -> std::string {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, GigDistribution>) {
                const auto& p = law.params();
                return "GIG(nu=" + fmt_double(p.nu) + ", mu=" + fmt_double(p.mu) +
                       ", lambda=" + fmt_double(p.lambda) + ")";
            } else if constexpr (std::is_same_v<T, GgDistribution>) {
                const auto& p = law.params();
                return "GG(nu=" + fmt_double(p.nu) + ", kappa=" + fmt_double(p.kappa) +
                       ", delta=" + fmt_double(p.delta) + ")";
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                return "OneSidedStable(alpha=" + fmt_double(law.params.alpha) + ")";
            } else if constexpr (std::is_same_v<T, DegenerateLaw>) {
                return "Degenerate(" + fmt_double(law.value) + ")";
            } else {
                return "Empirical(n=" + std::to_string(law.sorted->size()) + ")";
            }
        },
        law_);
}

// ---------------------------------------------------------------------------
// Normal variance-mean mixtures
// ---------------------------------------------------------------------------

NvmmSpec::NvmmSpec(double a_, double sigma_, MixingLaw mixing_)
    : a(a_), sigma(sigma_), mixing(std::move(mixing_)) {
    if (!std::isfinite(a)) throw std::invalid_argument("NVMM location coefficient a must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("NVMM scale sigma must be > 0");
}

namespace {

CharacteristicFn stable_mixture_cf(double a, double sigma, double alpha) {
    auto exponent = [a, sigma, alpha](double s) {
        const std::complex<double> w(0.5 * sigma * sigma * s * s, -a * s);
        return std::pow(w, alpha);
    };
    return {[exponent](double s) { return s == 0.0 ? std::complex<double>(1.0) : std::exp(-exponent(s)); },
            [a, sigma, alpha](double s) {
                const double modulus = std::hypot(0.5 * sigma * sigma * s * s, a * s);
                return std::exp(-std::pow(modulus, alpha) * std::cos(0.5 * kPi * alpha));
            }};
}

}  // namespace

double nvmm_cdf(const NvmmSpec& spec, double x, const QuadratureSpec& qspec) {
    const double a = spec.a, sigma = spec.sigma;
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, DegenerateLaw>) {
                return mixture_point(x, a, sigma, law.value);
            } else if constexpr (std::is_same_v<T, EmpiricalLaw>) {
                double acc = 0.0;
                for (double u : *law.sorted) acc += mixture_point(x, a, sigma, u);
                return acc / double(law.sorted->size());
            } else if constexpr (std::is_same_v<T, OneSidedStableLaw>) {
                return cdf_from_cf(stable_mixture_cf(a, sigma, law.params.alpha), x, qspec);
            } else {
                auto f = [&](double u) { return u > 0.0 ? mixture_point(x, a, sigma, u) * law.density(u) : 0.0; };
                return std::clamp(integrate(f, 0.0, kInf, qspec), 0.0, 1.0);
            }
        },
        spec.mixing.law());
}

double nvmm_density(const NvmmSpec& spec, double x, const QuadratureSpec& qspec) {
    const double a = spec.a, sigma = spec.sigma;
    auto kernel = [a, sigma, x](double u) {
        const double sd = sigma * std::sqrt(u);
        return normal_pdf((x - a * u) / sd) / sd;
    };
    if (const auto* d = std::get_if<DegenerateLaw>(&spec.mixing.law())) return kernel(d->value);
    if (const auto* e = std::get_if<EmpiricalLaw>(&spec.mixing.law())) {
        double acc = 0.0;
        for (double u : *e->sorted) acc += kernel(u);
        return acc / double(e->sorted->size());
    }
    if (!spec.mixing.has_density()) throw std::domain_error("nvmm_density: mixing law has no density");
    auto f = [&](double u) { return u > 0.0 ? kernel(u) * spec.mixing.density(u) : 0.0; };
    return integrate(f, 0.0, kInf, qspec);
}

double nvmm_sample(const NvmmSpec& spec, Rng& rng) {
    const double u = spec.mixing.sample(rng);
    return spec.a * u + spec.sigma * std::sqrt(u) * standard_normal(rng);
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

DistributionOracle normal_oracle(double mean, double sd) {
    return {"Normal(mean=" + fmt_double(mean) + ", sd=" + fmt_double(sd) + ")",
            [mean, sd](double x) { return normal_cdf((x - mean) / sd); },
            [mean, sd](double x) { return normal_pdf((x - mean) / sd) / sd; },
            [mean, sd](Rng& rng) { return mean + sd * standard_normal(rng); }};
}

DistributionOracle cauchy_oracle(double scale) {
    return {"Cauchy(scale=" + fmt_double(scale) + ")",
            [scale](double x) { return 0.5 + std::atan(x / scale) / kPi; },
            [scale](double x) { return scale / (kPi * (scale * scale + x * x)); },
            [scale](Rng& rng) { return scale * std::tan(kPi * (rng.uniform() - 0.5)); }};
}

DistributionOracle stable_oracle(const StableParams& p) {
    return {"Stable(alpha=" + fmt_double(p.alpha) + ", theta=" + fmt_double(p.theta) + ")",
            [p](double x) { return stable_cdf(p, x); },
            {},
            [p](Rng& rng) { return stable_sample(p, rng); }};
}

DistributionOracle nvmm_oracle(const NvmmSpec& spec) {
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-11;
    DistributionOracle o{"NVMM(a=" + fmt_double(spec.a) + ", sigma=" + fmt_double(spec.sigma) +
                             ", " + spec.mixing.describe() + ")",
                         [spec, q](double x) { return nvmm_cdf(spec, x, q); },
                         {},
                         [spec](Rng& rng) { return nvmm_sample(spec, rng); }};
    if (spec.mixing.has_density()) o.density = [spec, q](double x) { return nvmm_density(spec, x, q); };
    return o;
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

KsReport stable_product_check(double alpha, double alpha_prime, std::size_t n_samples, Rng& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0,2]");
    if (!(alpha_prime > 0.0 && alpha_prime < 1.0)) throw std::invalid_argument("alpha' must lie in (0,1)");
    const StableParams symmetric(alpha, 0.0);
    const StableParams one_sided(alpha_prime, 1.0);
    std::vector<double> sample(n_samples);
    for (auto& v : sample)
        v = stable_sample(symmetric, rng) * std::pow(stable_sample(one_sided, rng), 1.0 / alpha);
    const StableParams target(alpha * alpha_prime, 0.0);
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-11;
    return ks_test(std::move(sample), [target, q](double x) { return stable_cdf(target, x, q); },
                   "G_{" + fmt_double(alpha * alpha_prime) + ",0} by CF inversion");
}

KsReport weibull_mixed_exponential_check(double nu, std::size_t n_samples, Rng& rng) {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0,1]");
    const GgDistribution weibull(GgParams(nu, 1.0, 1.0));
    std::vector<double> direct(n_samples), mixed(n_samples);
    for (auto& v : direct) v = weibull.sample(rng);
    for (auto& v : mixed) {
        const double e = standard_exponential(rng);
        const double scale = nu == 1.0 ? 1.0 : stable_sample(StableParams(nu, 1.0), rng);
        v = e / scale;
    }
    return ks_two_sample(std::move(direct), std::move(mixed),
                         "Weibull(nu=" + fmt_double(nu) + ") vs E/V, V ~ G_{nu,1}");
}

}  // namespace coxsim
