#pragma once

#include "coxsim/distributions.hpp"
#include "coxsim/processes.hpp"
#include "coxsim/report.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace coxsim {

// Seed, parallelism and blocking for Monte Carlo estimation. Work is cut into
// (cell, block) tasks; each task owns the stream (cell << 32) | block, so the
// numbers drawn never depend on the worker count or scheduling.
struct RunContext {
    std::uint64_t seed = 42;
    unsigned workers = 1;
    std::size_t block_size = 8192;
};

std::uint64_t stream_index(std::uint64_t cell, std::uint64_t block);

/// Runs task(i) for i in [0, n) on up to `workers` threads. If tasks throw,
/// the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task);

/// n draws of f, block b of cell `cell` using stream_index(cell, b).
std::vector<double> draw_samples(std::size_t n, std::uint64_t cell, const RunContext& ctx,
                                 const std::function<double(Rng&)>& f);

/// Same as draw_samples for several cells at once, so cells run in parallel too.
std::vector<std::vector<double>> draw_sample_cells(std::size_t n, std::size_t cells, const RunContext& ctx,
                                                   const std::function<double(std::size_t, Rng&)>& f);

// ---------------------------------------------------------------------------
// Moment and tail bounds
// ---------------------------------------------------------------------------

/// E L^delta(t) <= (C t)^delta1 at each t: PASS iff estimate - 3 SE <= bound.
Report check_condition_6(const SubordinatorScheme& scheme, const std::vector<double>& t_grid,
                         std::size_t n_samples, const RunContext& ctx);

/// P(|Q(t)| >= eps) <= (eps^-beta m^beta)^delta (C t)^delta1 on the grid,
/// PASS iff every empirical probability minus 3 binomial SEs is within the bound.
Report check_lemma3_bound(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                          const std::vector<double>& eps_grid, const std::vector<double>& t_grid,
                          std::size_t n_samples, const RunContext& ctx);

/// P(|X_1 + ... + X_N| >= eps), N ~ Poisson(lambda), X = +-1 fair, summed over
/// N <= max_count.
double rademacher_compound_tail(double lambda, double eps, int max_count = 50);

struct TightnessParams {
    double k = 1.0;           // lim sup C^(delta1/delta) m^beta
    double beta_delta = 1.0;  // exponent of eps
    double gamma = 1.0;       // delta1

    TightnessParams(double k, double beta_delta, double gamma);

    /// F(t) = K t / 2.
    double modulus(double t) const { return 0.5 * k * t; }
    double bound(double eps, double t1, double t2) const;
};

struct Triple {
    double t1, t, t2;
};

/// P(|Q(t)-Q(t1)| >= eps, |Q(t2)-Q(t)| >= eps) <= eps^(-2 beta delta) [K (t2-t1)/2]^(2 delta1)
/// per triple, plus the factorization joint = product of marginals within 3 SE.
Report check_tightness_bound(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                             const TightnessParams& tp, const std::vector<Triple>& triples, double eps,
                             std::size_t n_samples, const RunContext& ctx);

// ---------------------------------------------------------------------------
// Convergence experiments
// ---------------------------------------------------------------------------

struct ConvergenceSchedule {
    std::vector<double> kn_values = {16, 64, 256, 1024, 4096};
    std::size_t n_samples = 100000;
    std::function<JumpScheme(double)> jumps;
    std::function<SubordinatorScheme(double)> clock;
    double tolerance = 0.02;

    void validate() const;
};

/// KS rows must not increase by more than the DKW band from one k_n to the
/// next or from first to last, and the last must be within tolerance.
bool ks_trend_ok(const std::vector<KnRow>& rows, double tolerance);

/// N ~ Poisson(k_n U); KS of N/k_n against the law of U.
/// For a degenerate U the distance is taken outside the window
/// |x - c| < k_n^(-1/3) around the atom, where the sup-distance to a step
/// cannot vanish.
Report check_lemma4_equivalence(const MixingLaw& mixing, const std::vector<double>& kn_values,
                                std::size_t n_samples, const RunContext& ctx, double tolerance = 0.02);

/// Q_n(1) against the limit CDF for each k_n.
Report run_convergence_experiment(const std::string& name, const ConvergenceSchedule& schedule,
                                  const DistributionOracle& limit, const RunContext& ctx);

enum class CenteredJumps { Laplace, Rademacher, Normal };

/// Centered jumps with variance 1/k_n, L_n(1) = k_n GG(nu, 1, delta); the
/// limit is the normal mixture with a = 0, sigma = 1 over GG(nu, 1, delta).
/// Throws std::domain_error unless 0 < nu <= 1.
Report run_corollary3_experiment(double nu, double delta, const std::vector<double>& kn_values,
                                 std::size_t n_samples, CenteredJumps jumps, const RunContext& ctx,
                                 double tolerance = 0.02);

/// Exact limit CDF of the Rademacher/one-sided-stable(1/2) scheme:
/// 1/2 + arctan(c x)/pi with c fixed from the mixture CF int exp(-u s^2/2) dG_{1/2,1}(u).
double cauchy_limit_scale();

// ---------------------------------------------------------------------------
// Conditions on the schedule
// ---------------------------------------------------------------------------

/// k_n a_n -> a, k_n sigma_n^2 -> sigma^2 and the Lindeberg term -> 0,
/// judged at the largest k_n with relative tolerance rel_tol.
Report check_condition_24(const std::vector<double>& kn_values, const std::function<JumpScheme(double)>& jumps,
                          double a, double sigma2, double eps, double rel_tol = 1e-6);

enum class BoundCondition { AbsMoment, MeanScale };

/// s_n = C_n^(delta1/delta) m_n^beta (AbsMoment) or C_n^(delta1/delta) (sigma_n + |a_n|) (MeanScale).
/// PASS iff every s_n is finite and the supremum over the second half of the
/// schedule does not exceed the supremum over the first half; K is reported.
Report check_condition_18_26(const std::vector<double>& kn_values,
                             const std::function<std::pair<JumpScheme, SubordinatorScheme>(double)>& family,
                             BoundCondition which);

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

/// L(t) read off a simulated stable-subordinator path against t^(1/alpha) L(1);
/// two-sample KS.
KsReport self_similarity_check(double alpha, double t, std::size_t n_samples, const RunContext& ctx,
                               std::uint64_t cell = 0);

struct CfPowerResult {
    std::vector<double> frequencies;
    std::vector<double> deviation;  // |phi_t(s) - phi_1(s)^t|
    std::vector<double> standard_error;
    bool pass = false;
};

/// Empirical CF of L(t) against the t-th power of the empirical CF of L(1)
/// for a gamma subordinator; PASS iff every deviation is within 3 SE.
CfPowerResult cf_power_check(double shape, double rate, double t, const std::vector<double>& frequencies,
                             std::size_t n_samples, const RunContext& ctx, std::uint64_t cell = 0);

}  // namespace coxsim
