#include "coxsim/processes.hpp"

#include "coxsim/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace coxsim {

namespace {

constexpr double kChunk = 0x1.0p52;

std::uint64_t poisson_inversion(double mean, Rng& rng) {
    const double p0 = std::exp(-mean);
    for (;;) {
        double u = rng.uniform();
        double p = p0;
        std::uint64_t k = 0;
        while (u > p) {
            u -= p;
            ++k;
            p *= mean / double(k);
            if (p <= 0.0) break;
        }
        if (p > 0.0 || u <= p) return k;
    }
}

std::uint64_t poisson_ptrs(double mean, Rng& rng) {
    const double slam = std::sqrt(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double log_inv_alpha = std::log(1.1239 + 1.1328 / (b - 3.4));
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        // log of e^-mean mean^k / k!, arranged so that large k and mean cancel
        // exactly instead of through rounded logarithms.
        const double d = mean - (k + 1.0);
        const double target = k * std::log1p(d / (k + 1.0)) - d - 0.5 * std::log(k + 1.0) -
                              half_log_2pi - detail::stirling_tail(k);
        if (std::log(v) + log_inv_alpha - std::log(a / (us * us) + b) <= target)
            return static_cast<std::uint64_t>(k);
    }
}

std::uint64_t poisson_direct(double mean, Rng& rng) {
    if (mean == 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(mean, rng);
    return poisson_ptrs(mean, rng);
}

}  // namespace

std::uint64_t poisson_sample(double mean, Rng& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::domain_error("poisson_sample: mean must be finite and >= 0");
    if (mean <= kChunk) return poisson_direct(mean, rng);
    if (mean > 0x1.0p63) throw std::overflow_error("poisson_sample: mean exceeds the 64-bit count range");
    const auto chunks = static_cast<std::uint64_t>(std::ceil(mean / kChunk));
    const double part = mean / double(chunks);
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < chunks; ++i) total += poisson_direct(part, rng);
    return total;
}

// ---------------------------------------------------------------------------

TimeGrid TimeGrid::uniform(std::size_t cells) {
    if (cells == 0) throw std::invalid_argument("TimeGrid: need at least one cell");
    std::vector<double> p(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) p[i] = double(i) / double(cells);
    return TimeGrid(std::move(p));
}

TimeGrid TimeGrid::from_points(std::vector<double> points) {
    if (points.size() < 2 || points.front() != 0.0 || points.back() != 1.0)
        throw std::invalid_argument("TimeGrid: points must start at 0 and end at 1");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i] > points[i - 1]))
            throw std::invalid_argument("TimeGrid: points must be strictly increasing");
    return TimeGrid(std::move(points));
}

std::size_t TimeGrid::index_of(double t) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it == points_.end() || *it != t) throw std::invalid_argument("TimeGrid: time is not a grid point");
    return std::size_t(it - points_.begin());
}

double SamplePath::at(double t) const {
    const auto& p = grid.points();
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("SamplePath: t outside [0,1]");
    const auto it = std::upper_bound(p.begin(), p.end(), t);
    return values[std::size_t(it - p.begin()) - 1];
}

void SamplePath::write_csv(std::ostream& out) const {
    out << "t,value\n";
    const auto& p = grid.points();
    for (std::size_t i = 0; i < p.size(); ++i)
        out << format_number(p[i]) << ',' << format_number(values[i]) << '\n';
}

// ---------------------------------------------------------------------------

void Certificate::validate() const {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("certificate: delta must lie in (0,1]");
    if (!(delta1 >= 0.5)) throw std::invalid_argument("certificate: delta1 must be >= 1/2");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("certificate: C must be positive and finite");
}

double Certificate::bound(double t) const { return std::pow(c * t, delta1); }

SubordinatorScheme SubordinatorScheme::stable(double alpha, double delta) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stable subordinator: alpha must lie in (0,1)");
    if (!(delta >= alpha / 2.0 && delta < alpha))
        throw std::invalid_argument("stable subordinator: delta must lie in [alpha/2, alpha)");
    Certificate cert;
    cert.delta = delta;
    cert.delta1 = delta / alpha;
    cert.c = std::pow(one_sided_stable_moment(alpha, delta), 1.0 / cert.delta1);
    cert.validate();
    return SubordinatorScheme(StableSub{alpha}, cert);
}

SubordinatorScheme SubordinatorScheme::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma subordinator: shape and rate must be > 0");
    return SubordinatorScheme(GammaSub{shape, rate}, Certificate{1.0, 1.0, shape / rate});
}

SubordinatorScheme SubordinatorScheme::inverse_gaussian(double mean, double shape) {
    if (!(mean > 0.0) || !(shape > 0.0))
        throw std::invalid_argument("inverse Gaussian subordinator: mean and shape must be > 0");
    return SubordinatorScheme(IgSub{mean, shape}, Certificate{1.0, 1.0, mean});
}

SubordinatorScheme SubordinatorScheme::deterministic(double slope) {
    if (!(slope > 0.0) || !std::isfinite(slope))
        throw std::invalid_argument("deterministic subordinator: slope must be > 0");
    return SubordinatorScheme(DeterministicSub{slope}, Certificate{1.0, 1.0, slope});
}

SubordinatorScheme SubordinatorScheme::scaled_marginal(double kn, MixingLaw mixing) {
    if (!(kn > 0.0) || !std::isfinite(kn)) throw std::invalid_argument("scaled marginal: k_n must be > 0");
    return SubordinatorScheme(ScaledMarginalSub{kn, std::move(mixing)}, std::nullopt);
}

SubordinatorScheme SubordinatorScheme::with_certificate(Certificate c) const {
    c.validate();
    SubordinatorScheme s = *this;
    s.certificate_ = c;
    return s;
}

bool SubordinatorScheme::path_capable() const {
    return !std::holds_alternative<ScaledMarginalSub>(kind_);
}

double inverse_gaussian_sample(double mean, double shape, Rng& rng) {
    const double n = standard_normal(rng);
    const double y = n * n;
    const double my = mean * y;
    // Smaller root written without cancellation.
    const double x = mean * (1.0 - 2.0 * my / (my + std::sqrt(my * my + 4.0 * shape * my)));
    if (rng.uniform() * (mean + x) <= mean) return x;
    return mean * mean / x;
}

double SubordinatorScheme::sample_increment(double dt, Rng& rng) const {
    if (!(dt >= 0.0)) throw std::invalid_argument("subordinator: negative time step");
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StableSub>) {
                if (dt == 0.0) return 0.0;
                return std::pow(dt, 1.0 / k.alpha) * stable_sample(StableParams(k.alpha, 1.0), rng);
            } else if constexpr (std::is_same_v<T, GammaSub>) {
                if (dt == 0.0) return 0.0;
                return gamma_sample(k.shape * dt, rng) / k.rate;
            } else if constexpr (std::is_same_v<T, IgSub>) {
                if (dt == 0.0) return 0.0;
                return inverse_gaussian_sample(k.mean * dt, k.shape * dt * dt, rng);
            } else if constexpr (std::is_same_v<T, DeterministicSub>) {
                return k.slope * dt;
            } else {
                if (dt != 1.0)
                    throw std::invalid_argument("scaled marginal subordinator supports only t = 1");
                return k.kn * k.mixing.sample(rng);
            }
        },
        kind_);
}

std::optional<double> SubordinatorScheme::mean_at_one() const {
    return std::visit(
        [](const auto& k) -> std::optional<double> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StableSub>) return std::nullopt;
            else if constexpr (std::is_same_v<T, GammaSub>) return k.shape / k.rate;
            else if constexpr (std::is_same_v<T, IgSub>) return k.mean;
            else if constexpr (std::is_same_v<T, DeterministicSub>) return k.slope;
            else return std::nullopt;
        },
        kind_);
}

std::string SubordinatorScheme::describe() const {
    std::ostringstream s;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StableSub>) s << "stable(alpha=" << format_number(k.alpha) << ")";
            else if constexpr (std::is_same_v<T, GammaSub>)
                s << "gamma(shape=" << format_number(k.shape) << ",rate=" << format_number(k.rate) << ")";
            else if constexpr (std::is_same_v<T, IgSub>)
                s << "inverse-gaussian(mean=" << format_number(k.mean) << ",shape=" << format_number(k.shape) << ")";
            else if constexpr (std::is_same_v<T, DeterministicSub>) s << "deterministic(slope=" << format_number(k.slope) << ")";
            else s << "scaled-marginal(kn=" << format_number(k.kn) << "," << k.mixing.describe() << ")";
        },
        kind_);
    return s.str();
}

// ---------------------------------------------------------------------------

double JumpScheme::sample_sum(std::uint64_t n, Rng& rng) const {
    if (sum_sampler) return sum_sampler(n, rng);
    if (n > 1'000'000'000ull)
        throw std::overflow_error("jump scheme '" + name + "' has no aggregate sampler for " +
                                  std::to_string(n) + " jumps");
    double s = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) s += sampler(rng);
    return s;
}

double JumpScheme::lindeberg(double eps) const {
    if (!tail_second_moment) return std::numeric_limits<double>::quiet_NaN();
    return kn * tail_second_moment(eps);
}

JumpScheme JumpScheme::two_point(double v1, double v2, double p1, double kn, double beta) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw std::invalid_argument("two-point jumps: p must lie in [0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("jumps: beta must lie in (0,1]");
    if (!(kn >= 1.0)) throw std::invalid_argument("jumps: k_n must be >= 1");
    const double p2 = 1.0 - p1;
    JumpScheme j;
    j.name = "two-point(" + format_number(v1) + "," + format_number(v2) + ",p=" + format_number(p1) + ")";
    j.kn = kn;
    j.moments.mean = p1 * v1 + p2 * v2;
    j.moments.variance = p1 * p2 * (v1 - v2) * (v1 - v2);
    j.moments.beta = beta;
    j.moments.abs_moment = p1 * std::pow(std::abs(v1), beta) + p2 * std::pow(std::abs(v2), beta);
    if (!(j.moments.abs_moment > 0.0)) throw std::invalid_argument("jumps: m^beta must be positive");
    j.sampler = [=](Rng& rng) { return rng.uniform() < p1 ? v1 : v2; };
    j.sum_sampler = [=](std::uint64_t n, Rng& rng) {
        const std::uint64_t b = binomial_sample(n, p1, rng);
        return v1 * double(b) + v2 * double(n - b);
    };
    const double a = j.moments.mean;
    j.tail_second_moment = [=](double eps) {
        double s = 0.0;
        if (std::abs(v1 - a) >= eps) s += p1 * (v1 - a) * (v1 - a);
        if (std::abs(v2 - a) >= eps) s += p2 * (v2 - a) * (v2 - a);
        return s;
    };
    return j;
}

JumpScheme JumpScheme::rademacher(double kn, double a) {
    const double s = 1.0 / std::sqrt(kn);
    JumpScheme j = two_point(a / kn + s, a / kn - s, 0.5, kn);
    j.name = a == 0.0 ? "rademacher(kn=" + format_number(kn) + ")"
                      : "rademacher(kn=" + format_number(kn) + ",a=" + format_number(a) + ")";
    return j;
}

JumpScheme JumpScheme::constant(double value) {
    JumpScheme j = two_point(value, value, 1.0, 1.0);
    j.name = "constant(" + format_number(value) + ")";
    j.sum_sampler = [=](std::uint64_t n, Rng&) { return value * double(n); };
    return j;
}

JumpScheme JumpScheme::normal(double mean, double sd, double kn, double beta) {
    if (!(sd > 0.0)) throw std::invalid_argument("normal jumps: sd must be > 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("jumps: beta must lie in (0,1]");
    if (!(kn >= 1.0)) throw std::invalid_argument("jumps: k_n must be >= 1");
    JumpScheme j;
    j.name = "normal(mean=" + format_number(mean) + ",sd=" + format_number(sd) + ")";
    j.kn = kn;
    j.moments.mean = mean;
    j.moments.variance = sd * sd;
    j.moments.beta = beta;
    if (mean == 0.0) {
        j.moments.abs_moment = std::pow(sd, beta) * std::exp(0.5 * beta * std::log(2.0) +
                                                             log_gamma((beta + 1.0) / 2.0)) /
                               std::sqrt(std::numbers::pi);
    } else {
        const double kink = -mean / sd;
        auto f = [=](double z) { return std::pow(std::abs(mean + sd * z), beta) * normal_pdf(z); };
        j.moments.abs_moment = integrate(f, -kInf, kink) + integrate(f, kink, kInf);
    }
    j.sampler = [=](Rng& rng) { return mean + sd * standard_normal(rng); };
    j.sum_sampler = [=](std::uint64_t n, Rng& rng) {
        if (n == 0) return 0.0;
        return mean * double(n) + sd * std::sqrt(double(n)) * standard_normal(rng);
    };
    j.tail_second_moment = [=](double eps) {
        const double z = eps / sd;
        return sd * sd * 2.0 * (z * normal_pdf(z) + normal_cdf(-z));
    };
    return j;
}

JumpScheme JumpScheme::laplace(double kn, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("jumps: beta must lie in (0,1]");
    if (!(kn >= 1.0)) throw std::invalid_argument("jumps: k_n must be >= 1");
    const double b = 1.0 / std::sqrt(2.0 * kn);
    JumpScheme j;
    j.name = "laplace(kn=" + format_number(kn) + ")";
    j.kn = kn;
    j.moments.mean = 0.0;
    j.moments.variance = 2.0 * b * b;
    j.moments.beta = beta;
    j.moments.abs_moment = std::pow(b, beta) * std::exp(log_gamma(1.0 + beta));
    j.sampler = [=](Rng& rng) { return b * (standard_exponential(rng) - standard_exponential(rng)); };
    j.sum_sampler = [=](std::uint64_t n, Rng& rng) {
        if (n == 0) return 0.0;
        const double g1 = gamma_sample(double(n), rng);
        return b * (g1 - gamma_sample(double(n), rng));
    };
    j.tail_second_moment = [=](double eps) {
        return std::exp(-eps / b) * (eps * eps + 2.0 * b * eps + 2.0 * b * b);
    };
    return j;
}

JumpScheme JumpScheme::symmetric_stable(double alpha, double scale, double kn, double beta) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable jumps: alpha must lie in (0,2)");
    if (!(beta > 0.0 && beta <= 1.0 && beta < alpha))
        throw std::invalid_argument("stable jumps: beta must lie in (0, min(1, alpha))");
    if (!(scale > 0.0)) throw std::invalid_argument("stable jumps: scale must be > 0");
    JumpScheme j;
    j.name = "stable(alpha=" + format_number(alpha) + ",scale=" + format_number(scale) + ")";
    j.kn = kn;
    j.moments.mean = alpha > 1.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    j.moments.variance = kInf;
    j.moments.beta = beta;
    // E|Z|^b = 2^b Gamma((1+b)/2) Gamma(1-b/alpha) / (Gamma(1-b/2) sqrt(pi)).
    j.moments.abs_moment = std::pow(scale, beta) *
                           std::exp(beta * std::log(2.0) + log_gamma((1.0 + beta) / 2.0) +
                                    log_gamma(1.0 - beta / alpha) - log_gamma(1.0 - beta / 2.0)) /
                           std::sqrt(std::numbers::pi);
    const StableParams p(alpha, 0.0);
    j.sampler = [=](Rng& rng) { return scale * stable_sample(p, rng); };
    j.sum_sampler = [=](std::uint64_t n, Rng& rng) {
        if (n == 0) return 0.0;
        return scale * std::pow(double(n), 1.0 / alpha) * stable_sample(p, rng);
    };
    j.tail_second_moment = [](double) { return kInf; };
    return j;
}

bool check_jump_moments(const JumpScheme& jumps, std::size_t n_samples, Rng& rng) {
    std::vector<double> x(n_samples), ab(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        x[i] = jumps.sample(rng);
        ab[i] = std::pow(std::abs(x[i]), jumps.moments.beta);
    }
    auto close = [](const MeanEstimate& e, double target) {
        return std::abs(e.mean - target) <= 4.0 * e.standard_error + 1e-12 * std::abs(target);
    };
    bool ok = close(estimate_mean(ab), jumps.moments.abs_moment);
    if (std::isfinite(jumps.moments.variance) && std::isfinite(jumps.moments.mean))
        ok = ok && close(estimate_mean(x), jumps.moments.mean);
    return ok;
}

double compound_poisson_sum(const JumpScheme& jumps, double lambda, Rng& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("compound Poisson: intensity must be finite and >= 0");
    if (lambda <= kChunk) return jumps.sample_sum(poisson_sample(lambda, rng), rng);
    const double chunks = std::ceil(lambda / kChunk);
    if (chunks > 1e6) throw std::overflow_error("compound Poisson: intensity too large to simulate");
    const double part = lambda / chunks;
    double s = 0.0;
    for (double i = 0; i < chunks; i += 1.0) s += jumps.sample_sum(poisson_sample(part, rng), rng);
    return s;
}

SamplePath simulate_subordinator(const SubordinatorScheme& scheme, const TimeGrid& grid, Rng& rng) {
    if (!scheme.path_capable())
        throw std::invalid_argument("simulate_subordinator: scaled marginal schemes have no paths");
    const auto& p = grid.points();
    SamplePath path{grid, std::vector<double>(p.size(), 0.0)};
    for (std::size_t i = 1; i < p.size(); ++i)
        path.values[i] = path.values[i - 1] + scheme.sample_increment(p[i] - p[i - 1], rng);
    return path;
}

SamplePath simulate_compound_poisson(const JumpScheme& jumps, const SamplePath& intensity_path, Rng& rng) {
    const auto& lam = intensity_path.values;
    if (lam.empty() || lam[0] != 0.0) throw std::invalid_argument("compound Poisson: clock must start at 0");
    SamplePath path{intensity_path.grid, std::vector<double>(lam.size(), 0.0)};
    for (std::size_t i = 1; i < lam.size(); ++i) {
        const double d = lam[i] - lam[i - 1];
        if (!(d >= 0.0)) throw std::invalid_argument("compound Poisson: clock must be nondecreasing");
        path.values[i] = path.values[i - 1] + compound_poisson_sum(jumps, d, rng);
    }
    return path;
}

SamplePath simulate_cox_path(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                             const TimeGrid& grid, Rng& rng) {
    return simulate_compound_poisson(jumps, simulate_subordinator(scheme, grid, rng), rng);
}

double simulate_cox_marginal(const JumpScheme& jumps, const SubordinatorScheme& scheme, Rng& rng) {
    return compound_poisson_sum(jumps, scheme.sample_at_one(rng), rng);
}

KsReport increment_stationarity_check(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                                      double t1, double t2, std::size_t n_samples, Rng& rng) {
    if (!(t1 >= 0.0 && t1 < t2 && t2 <= 1.0))
        throw std::invalid_argument("increment check: need 0 <= t1 < t2 <= 1");
    std::vector<double> pts = {0.0, 0.25, 0.5, 0.75, 1.0, t1, t2};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const TimeGrid grid = TimeGrid::from_points(pts);
    const std::size_t i1 = grid.index_of(t1), i2 = grid.index_of(t2);
    std::vector<double> a(n_samples), b(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const SamplePath q = simulate_cox_path(jumps, scheme, grid, rng);
        a[i] = q.values[i2] - q.values[i1];
        b[i] = compound_poisson_sum(jumps, scheme.sample_increment(t2 - t1, rng), rng);
    }
    return ks_two_sample(std::move(a), std::move(b), "Q(t2 - t1)");
}

}  // namespace coxsim
