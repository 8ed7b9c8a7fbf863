#pragma once

#include "coxsim/distributions.hpp"
#include "coxsim/random.hpp"
#include "coxsim/stats.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace coxsim {

/// Exact Poisson(mean) draw: inversion below 10, Hormann's PTRS above.
/// Means beyond 2^52 are split into independent chunks so every count stays
/// exactly representable. Throws std::overflow_error if the count could exceed
/// the 64-bit range.
std::uint64_t poisson_sample(double mean, Rng& rng);

// Strictly increasing times from 0 to 1.
class TimeGrid {
public:
    static TimeGrid uniform(std::size_t cells = 1024);
    static TimeGrid from_points(std::vector<double> points);

    const std::vector<double>& points() const { return points_; }
    std::size_t resolution() const { return points_.size() - 1; }

    /// Index of the grid point equal to t; throws std::invalid_argument if absent.
    std::size_t index_of(double t) const;

private:
    explicit TimeGrid(std::vector<double> p) : points_(std::move(p)) {}
    std::vector<double> points_;
};

// Cadlag step path: values[i] holds on [points[i], points[i+1]).
struct SamplePath {
    TimeGrid grid;
    std::vector<double> values;

    double at(double t) const;
    void write_csv(std::ostream& out) const;
};

/// Moment-bound certificate E L^delta(t) <= (C t)^delta1 for t in (0,1].
struct Certificate {
    double delta = 1.0;
    double delta1 = 1.0;
    double c = 1.0;

    void validate() const;
    double bound(double t) const;
};

struct StableSub {
    double alpha;
};
struct GammaSub {
    double shape;  // per unit time
    double rate;
};
struct IgSub {
    double mean;   // per unit time
    double shape;  // increment over dt is IG(mean dt, shape dt^2)
};
struct DeterministicSub {
    double slope;
};
// Only the t = 1 marginal k_n U is available.
struct ScaledMarginalSub {
    double kn;
    MixingLaw mixing;
};

class SubordinatorScheme {
public:
    using Kind = std::variant<StableSub, GammaSub, IgSub, DeterministicSub, ScaledMarginalSub>;

    /// One-sided stable clock with L(1) ~ G_{alpha,1}, 0 < alpha < 1. The
    /// certificate uses delta in [alpha/2, alpha), delta1 = delta/alpha and
    /// C = (E L^delta(1))^(1/delta1), with the moment in closed form.
    static SubordinatorScheme stable(double alpha, double delta);
    static SubordinatorScheme gamma(double shape, double rate);
    static SubordinatorScheme inverse_gaussian(double mean, double shape);
    static SubordinatorScheme deterministic(double slope);
    static SubordinatorScheme scaled_marginal(double kn, MixingLaw mixing);

    const Kind& kind() const { return kind_; }
    const std::optional<Certificate>& certificate() const { return certificate_; }
    SubordinatorScheme with_certificate(Certificate c) const;

    bool path_capable() const;

    /// L(t + dt) - L(t). ScaledMarginal schemes accept dt = 1 only.
    double sample_increment(double dt, Rng& rng) const;
    double sample_at_one(Rng& rng) const { return sample_increment(1.0, rng); }

    /// E L(1) when finite.
    std::optional<double> mean_at_one() const;
    std::string describe() const;

private:
    SubordinatorScheme(Kind k, std::optional<Certificate> c) : kind_(std::move(k)), certificate_(c) {}
    Kind kind_;
    std::optional<Certificate> certificate_;
};

/// Inverse Gaussian draw with the given mean and shape (Michael, Schucany and Haas).
double inverse_gaussian_sample(double mean, double shape, Rng& rng);

struct JumpMoments {
    double mean = 0.0;          // a_n; NaN when undefined
    double variance = 0.0;      // sigma_n^2; +inf when infinite
    double beta = 1.0;          // in (0,1]
    double abs_moment = 1.0;    // m_n^beta = E|X|^beta
};

// One row of the triangular array of jumps.
struct JumpScheme {
    std::string name;
    double kn = 1.0;
    JumpMoments moments;
    std::function<double(Rng&)> sampler;
    // Exact draw of X_1 + ... + X_n; falls back to summing when empty.
    std::function<double(std::uint64_t, Rng&)> sum_sampler;
    // E (X - a)^2 1(|X - a| >= eps).
    std::function<double(double)> tail_second_moment;

    double sample(Rng& rng) const { return sampler(rng); }
    double sample_sum(std::uint64_t n, Rng& rng) const;

    /// k_n E (X - a_n)^2 1(|X - a_n| >= eps).
    double lindeberg(double eps) const;

    /// X = v1 with probability p1, v2 otherwise.
    static JumpScheme two_point(double v1, double v2, double p1, double kn, double beta = 1.0);
    /// X = a/k_n + s k_n^(-1/2) with s = +-1.
    static JumpScheme rademacher(double kn, double a = 0.0);
    static JumpScheme constant(double value);
    static JumpScheme normal(double mean, double sd, double kn, double beta = 1.0);
    /// Centered Laplace jumps with variance 1/k_n; sums are exact as b (G1 - G2), G ~ Gamma(n).
    static JumpScheme laplace(double kn, double beta = 1.0);
    /// X = scale Z_{alpha,0}; beta < alpha.
    static JumpScheme symmetric_stable(double alpha, double scale, double kn, double beta);
};

/// Monte Carlo check of the declared mean and m^beta: true when each sample
/// estimate is within 4 standard errors of the declared value.
bool check_jump_moments(const JumpScheme& jumps, std::size_t n_samples, Rng& rng);

/// Sum of Poisson(lambda) jumps.
double compound_poisson_sum(const JumpScheme& jumps, double lambda, Rng& rng);

SamplePath simulate_subordinator(const SubordinatorScheme& scheme, const TimeGrid& grid, Rng& rng);

/// Q(t) = Z(L(t)) on the grid of intensity_path: each cell adds the sum of
/// Poisson(dL) fresh jumps.
SamplePath simulate_compound_poisson(const JumpScheme& jumps, const SamplePath& intensity_path, Rng& rng);

SamplePath simulate_cox_path(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                             const TimeGrid& grid, Rng& rng);

/// Q_n(1): L = L_n(1), N ~ Poisson(L), sum of N jumps.
double simulate_cox_marginal(const JumpScheme& jumps, const SubordinatorScheme& scheme, Rng& rng);

/// Two-sample KS between Q(t2) - Q(t1) read off simulated paths and direct
/// draws of Q(t2 - t1).
KsReport increment_stationarity_check(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                                      double t1, double t2, std::size_t n_samples, Rng& rng);

}  // namespace coxsim
