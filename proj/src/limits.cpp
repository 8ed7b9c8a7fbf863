#include "coxsim/limits.hpp"

#include "coxsim/format.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace coxsim {

std::uint64_t stream_index(std::uint64_t cell, std::uint64_t block) { return (cell << 32) | block; }

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task) {
    if (n == 0) return;
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, unsigned(std::min<std::size_t>(n, 1024))));
    if (w == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (unsigned i = 0; i < w; ++i) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<std::vector<double>> draw_sample_cells(std::size_t n, std::size_t cells, const RunContext& ctx,
                                                   const std::function<double(std::size_t, Rng&)>& f) {
    if (ctx.block_size == 0) throw std::invalid_argument("block_size must be >= 1");
    const std::size_t blocks = (n + ctx.block_size - 1) / ctx.block_size;
    std::vector<std::vector<double>> out(cells, std::vector<double>(n));
    parallel_for(cells * blocks, ctx.workers, [&](std::size_t task) {
        const std::size_t cell = task / blocks;
        const std::size_t block = task % blocks;
        Rng rng(ctx.seed, stream_index(cell, block));
        const std::size_t lo = block * ctx.block_size;
        const std::size_t hi = std::min(n, lo + ctx.block_size);
        for (std::size_t i = lo; i < hi; ++i) out[cell][i] = f(cell, rng);
    });
    return out;
}

std::vector<double> draw_samples(std::size_t n, std::uint64_t cell, const RunContext& ctx,
                                 const std::function<double(Rng&)>& f) {
    if (ctx.block_size == 0) throw std::invalid_argument("block_size must be >= 1");
    const std::size_t blocks = (n + ctx.block_size - 1) / ctx.block_size;
    std::vector<double> out(n);
    parallel_for(blocks, ctx.workers, [&](std::size_t block) {
        Rng rng(ctx.seed, stream_index(cell, block));
        const std::size_t lo = block * ctx.block_size;
        const std::size_t hi = std::min(n, lo + ctx.block_size);
        for (std::size_t i = lo; i < hi; ++i) out[i] = f(rng);
    });
    return out;
}

namespace {

nlohmann::ordered_json numbers(const std::vector<double>& v) {
    auto a = nlohmann::ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
}

const Certificate& require_certificate(const SubordinatorScheme& scheme) {
    if (!scheme.certificate()) throw std::invalid_argument("subordinator scheme carries no (delta, delta1, C) certificate");
    return *scheme.certificate();
}

void put_certificate(Report& r, const Certificate& c) {
    r.parameters["delta"] = c.delta;
    r.parameters["delta1"] = c.delta1;
    r.parameters["C"] = c.c;
}

}  // namespace

// ---------------------------------------------------------------------------

Report check_condition_6(const SubordinatorScheme& scheme, const std::vector<double>& t_grid,
                         std::size_t n_samples, const RunContext& ctx) {
    const Certificate& cert = require_certificate(scheme);
    Report r;
    r.experiment = "cond6";
    r.parameters["clock"] = scheme.describe();
    put_certificate(r, cert);
    r.parameters["t"] = numbers(t_grid);
    r.parameters["n_samples"] = n_samples;
    for (double t : t_grid)
        if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("condition 6: t must lie in (0,1]");
    const auto cells = draw_sample_cells(n_samples, t_grid.size(), ctx, [&](std::size_t i, Rng& rng) {
        return std::pow(scheme.sample_increment(t_grid[i], rng), cert.delta);
    });
    r.pass = true;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const MeanEstimate e = estimate_mean(cells[i]);
        Margin m;
        m.label = "E L^delta(" + format_number(t_grid[i]) + ")";
        m.estimate = e.mean;
        m.standard_error = e.standard_error;
        m.bound = cert.bound(t_grid[i]);
        m.pass = e.mean - 3.0 * e.standard_error <= m.bound;
        r.pass = r.pass && m.pass;
        r.margins.push_back(m);
    }
    return r;
}

Report check_lemma3_bound(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                          const std::vector<double>& eps_grid, const std::vector<double>& t_grid,
                          std::size_t n_samples, const RunContext& ctx) {
    const Certificate& cert = require_certificate(scheme);
    Report r;
    r.experiment = "lemma3";
    r.parameters["jumps"] = jumps.name;
    r.parameters["clock"] = scheme.describe();
    put_certificate(r, cert);
    r.parameters["beta"] = jumps.moments.beta;
    r.parameters["m_beta"] = jumps.moments.abs_moment;
    r.parameters["eps"] = numbers(eps_grid);
    r.parameters["t"] = numbers(t_grid);
    r.parameters["n_samples"] = n_samples;
    const auto cells = draw_sample_cells(n_samples, t_grid.size(), ctx, [&](std::size_t i, Rng& rng) {
        return compound_poisson_sum(jumps, scheme.sample_increment(t_grid[i], rng), rng);
    });
    r.pass = true;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        for (double eps : eps_grid) {
            if (!(eps > 0.0)) throw std::invalid_argument("tail bound: eps must be > 0");
            std::size_t hits = 0;
            for (double q : cells[ti]) hits += std::abs(q) >= eps;
            const MeanEstimate p = estimate_proportion(hits, n_samples);
            Margin m;
            m.label = "P(|Q(" + format_number(t_grid[ti]) + ")| >= " + format_number(eps) + ")";
            m.estimate = p.mean;
            m.standard_error = p.standard_error;
            m.bound = std::pow(std::pow(eps, -jumps.moments.beta) * jumps.moments.abs_moment, cert.delta) *
                      cert.bound(t_grid[ti]);
            m.pass = p.mean - 3.0 * p.standard_error <= m.bound;
            r.pass = r.pass && m.pass;
            r.margins.push_back(m);
        }
    }
    return r;
}

double rademacher_compound_tail(double lambda, double eps, int max_count) {
    double total = 0.0;
    for (int k = 0; k <= max_count; ++k) {
        const double pk = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
        double tail = 0.0;
        for (int j = 0; j <= k; ++j) {
            if (std::abs(2.0 * j - k) >= eps)
                tail += std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) -
                                 k * std::numbers::ln2);
        }
        total += pk * tail;
    }
    return total;
}

// ---------------------------------------------------------------------------

TightnessParams::TightnessParams(double k_, double beta_delta_, double gamma_)
    : k(k_), beta_delta(beta_delta_), gamma(gamma_) {
    if (!(gamma > 0.5)) throw std::invalid_argument("tightness: gamma must be > 1/2");
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("tightness: K must be finite and >= 0");
    if (!(beta_delta > 0.0)) throw std::invalid_argument("tightness: beta*delta must be > 0");
}

double TightnessParams::bound(double eps, double t1, double t2) const {
    return std::pow(eps, -2.0 * beta_delta) * std::pow(modulus(t2 - t1), 2.0 * gamma);
}

Report check_tightness_bound(const JumpScheme& jumps, const SubordinatorScheme& scheme,
                             const TightnessParams& tp, const std::vector<Triple>& triples, double eps,
                             std::size_t n_samples, const RunContext& ctx) {
    if (!scheme.path_capable()) throw std::invalid_argument("tightness: the clock must be path-capable");
    Report r;
    r.experiment = "tightness";
    r.parameters["jumps"] = jumps.name;
    r.parameters["clock"] = scheme.describe();
    r.parameters["K"] = tp.k;
    r.parameters["beta_delta"] = tp.beta_delta;
    r.parameters["gamma"] = tp.gamma;
    r.parameters["eps"] = eps;
    r.parameters["n_samples"] = n_samples;
    auto tr = nlohmann::ordered_json::array();
    for (const auto& x : triples) {
        if (!(0.0 <= x.t1 && x.t1 <= x.t && x.t <= x.t2 && x.t2 <= 1.0))
            throw std::invalid_argument("tightness: need 0 <= t1 <= t <= t2 <= 1");
        tr.push_back({x.t1, x.t, x.t2});
    }
    r.parameters["triples"] = tr;

    std::vector<TimeGrid> grids;
    for (const auto& x : triples) {
        std::vector<double> pts = {0.0, x.t1, x.t, x.t2, 1.0};
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        grids.push_back(TimeGrid::from_points(pts));
    }
    // Each draw encodes the two exceedance indicators as bits.
    const auto cells = draw_sample_cells(n_samples, triples.size(), ctx, [&](std::size_t i, Rng& rng) {
        const SamplePath q = simulate_cox_path(jumps, scheme, grids[i], rng);
        const double a = q.at(triples[i].t) - q.at(triples[i].t1);
        const double b = q.at(triples[i].t2) - q.at(triples[i].t);
        return double((std::abs(a) >= eps ? 1 : 0) | (std::abs(b) >= eps ? 2 : 0));
    });
    r.pass = true;
    const double n = double(n_samples);
    for (std::size_t i = 0; i < triples.size(); ++i) {
        std::size_t ha = 0, hb = 0, hab = 0;
        for (double c : cells[i]) {
            const int bits = int(c);
            ha += bits & 1;
            hb += (bits >> 1) & 1;
            hab += bits == 3;
        }
        const std::string tag = "(" + format_number(triples[i].t1) + "," + format_number(triples[i].t) + "," +
                                format_number(triples[i].t2) + ")";
        const MeanEstimate joint = estimate_proportion(hab, n_samples);
        Margin m;
        m.label = "joint" + tag;
        m.estimate = joint.mean;
        m.standard_error = joint.standard_error;
        m.bound = tp.bound(eps, triples[i].t1, triples[i].t2);
        m.pass = joint.mean - 3.0 * joint.standard_error <= m.bound;
        r.pass = r.pass && m.pass;
        r.margins.push_back(m);

        const MeanEstimate pa = estimate_proportion(ha, n_samples);
        const MeanEstimate pb = estimate_proportion(hb, n_samples);
        const double product = pa.mean * pb.mean;
        const double se = std::sqrt(joint.standard_error * joint.standard_error +
                                    pa.mean * pa.mean * pb.standard_error * pb.standard_error +
                                    pb.mean * pb.mean * pa.standard_error * pa.standard_error);
        Margin f;
        f.label = "factorization" + tag;
        f.estimate = joint.mean - product;
        f.standard_error = std::max(se, 1.0 / n);
        f.bound = 3.0 * f.standard_error;
        f.pass = std::abs(f.estimate) <= f.bound;
        r.pass = r.pass && f.pass;
        r.margins.push_back(f);
    }
    return r;
}

// ---------------------------------------------------------------------------

void ConvergenceSchedule::validate() const {
    if (kn_values.empty()) throw std::invalid_argument("schedule: kn_values must not be empty");
    for (std::size_t i = 0; i < kn_values.size(); ++i) {
        if (!(kn_values[i] >= 1.0)) throw std::invalid_argument("schedule: every k_n must be >= 1");
        if (i > 0 && !(kn_values[i] > kn_values[i - 1]))
            throw std::invalid_argument("schedule: kn_values must be strictly increasing");
    }
    if (n_samples == 0) throw std::invalid_argument("schedule: n_samples must be >= 1");
    if (!jumps || !clock) throw std::invalid_argument("schedule: jump and clock generators are required");
}

bool ks_trend_ok(const std::vector<KnRow>& rows, double tolerance) {
    if (rows.empty()) return false;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].ks > rows[i - 1].ks + rows[i].dkw_99) return false;
    return rows.back().ks <= rows.front().ks + rows.back().dkw_99 && rows.back().ks <= tolerance;
}

namespace {

void finish_trend(Report& r, double tolerance) {
    r.parameters["tolerance"] = tolerance;
    r.pass = ks_trend_ok(r.per_kn, tolerance);
    for (std::size_t i = 1; i < r.per_kn.size(); ++i) {
        Margin m;
        m.label = "ks(kn=" + format_number(r.per_kn[i].kn) + ") <= ks(prev) + dkw";
        m.estimate = r.per_kn[i].ks;
        m.standard_error = r.per_kn[i].dkw_99;
        m.bound = r.per_kn[i - 1].ks + r.per_kn[i].dkw_99;
        m.pass = m.estimate <= m.bound;
        r.margins.push_back(m);
    }
    const KnRow& last = r.per_kn.back();
    Margin net{"ks(last) <= ks(first) + dkw", last.ks, last.dkw_99, r.per_kn.front().ks + last.dkw_99,
               last.ks <= r.per_kn.front().ks + last.dkw_99};
    r.margins.push_back(net);
    r.margins.push_back(Margin{"ks(last) <= tolerance", last.ks, last.dkw_99, tolerance, last.ks <= tolerance});
}

}  // namespace

Report check_lemma4_equivalence(const MixingLaw& mixing, const std::vector<double>& kn_values,
                                std::size_t n_samples, const RunContext& ctx, double tolerance) {
    for (std::size_t i = 0; i < kn_values.size(); ++i)
        if (!(kn_values[i] > 0.0) || (i > 0 && !(kn_values[i] > kn_values[i - 1])))
            throw std::invalid_argument("mixing equivalence: kn_values must be positive and increasing");
    Report r;
    r.experiment = "lemma4";
    r.parameters["mixing"] = mixing.describe();
    r.parameters["kn"] = numbers(kn_values);
    r.parameters["n_samples"] = n_samples;
    const auto cells = draw_sample_cells(n_samples, kn_values.size(), ctx, [&](std::size_t i, Rng& rng) {
        return double(poisson_sample(kn_values[i] * mixing.sample(rng), rng)) / kn_values[i];
    });
    const auto* atom = std::get_if<DegenerateLaw>(&mixing.law());
    for (std::size_t i = 0; i < kn_values.size(); ++i) {
        KnRow row;
        row.kn = kn_values[i];
        row.dkw_99 = dkw_99(double(n_samples));
        if (atom) {
            const double c = atom->value;
            const double h = std::pow(kn_values[i], -1.0 / 3.0);
            std::size_t below = 0, above = 0;
            for (double x : cells[i]) {
                below += x <= c - h;
                above += x >= c + h;
            }
            row.ks = std::max(double(below), double(above)) / double(n_samples);
        } else {
            row.ks = ks_test(cells[i], [&](double x) { return mixing.cdf(x); }, mixing.describe()).statistic;
        }
        r.per_kn.push_back(row);
    }
    finish_trend(r, tolerance);
    return r;
}

Report run_convergence_experiment(const std::string& name, const ConvergenceSchedule& schedule,
                                  const DistributionOracle& limit, const RunContext& ctx) {
    schedule.validate();
    std::vector<JumpScheme> jumps;
    std::vector<SubordinatorScheme> clocks;
    for (double kn : schedule.kn_values) {
        jumps.push_back(schedule.jumps(kn));
        clocks.push_back(schedule.clock(kn));
    }
    Report r;
    r.experiment = name;
    r.parameters["limit"] = limit.name;
    r.parameters["kn"] = numbers(schedule.kn_values);
    r.parameters["n_samples"] = schedule.n_samples;
    r.parameters["jumps"] = jumps.back().name;
    r.parameters["clock"] = clocks.back().describe();
    const auto cells = draw_sample_cells(schedule.n_samples, schedule.kn_values.size(), ctx,
                                         [&](std::size_t i, Rng& rng) {
                                             return simulate_cox_marginal(jumps[i], clocks[i], rng);
                                         });
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const KsReport ks = ks_test(cells[i], limit.cdf, limit.name);
        r.per_kn.push_back(KnRow{schedule.kn_values[i], ks.statistic, ks.dkw_99});
    }
    finish_trend(r, schedule.tolerance);
    return r;
}

Report run_corollary3_experiment(double nu, double delta, const std::vector<double>& kn_values,
                                 std::size_t n_samples, CenteredJumps jumps, const RunContext& ctx,
                                 double tolerance) {
    if (!(nu > 0.0 && nu <= 1.0))
        throw std::domain_error("Weibull mixing: nu must lie in (0,1] for an infinitely divisible Weibull mixing law");
    const MixingLaw mixing = MixingLaw::gg(GgParams(nu, 1.0, delta));
    ConvergenceSchedule s;
    s.kn_values = kn_values;
    s.n_samples = n_samples;
    s.tolerance = tolerance;
    switch (jumps) {
        case CenteredJumps::Laplace: s.jumps = [](double kn) { return JumpScheme::laplace(kn); }; break;
        case CenteredJumps::Rademacher: s.jumps = [](double kn) { return JumpScheme::rademacher(kn); }; break;
        case CenteredJumps::Normal:
            s.jumps = [](double kn) { return JumpScheme::normal(0.0, 1.0 / std::sqrt(kn), kn); };
            break;
    }
    s.clock = [mixing](double kn) { return SubordinatorScheme::scaled_marginal(kn, mixing); };
    const NvmmSpec limit(0.0, 1.0, mixing);
    Report r = run_convergence_experiment("cor3-gvg", s, nvmm_oracle(limit), ctx);
    r.parameters["nu"] = nu;
    r.parameters["delta"] = delta;
    return r;
}

double cauchy_limit_scale() {
    static const double c = [] {
        // f(1) = int exp(-u/2) dG_{1/2,1}(u) = exp(-gamma) for the Cauchy scale gamma.
        const MixingLaw levy = MixingLaw::one_sided_stable(0.5);
        const double f1 = integrate([&](double u) { return std::exp(-0.5 * u) * levy.density(u); }, 0.0, kInf,
                                    QuadratureSpec{1e-13, 1e-15, 2000});
        return -1.0 / std::log(f1);
    }();
    return c;
}

// ---------------------------------------------------------------------------

Report check_condition_24(const std::vector<double>& kn_values, const std::function<JumpScheme(double)>& jumps,
                          double a, double sigma2, double eps, double rel_tol) {
    if (kn_values.empty()) throw std::invalid_argument("condition 24: kn_values must not be empty");
    Report r;
    r.experiment = "cond24";
    r.parameters["kn"] = numbers(kn_values);
    r.parameters["a"] = a;
    r.parameters["sigma2"] = sigma2;
    r.parameters["eps"] = eps;
    r.parameters["rel_tol"] = rel_tol;
    bool last_ok = false;
    for (double kn : kn_values) {
        const JumpScheme j = jumps(kn);
        r.parameters["jumps"] = j.name;
        const double ka = kn * j.moments.mean;
        const double ks2 = kn * j.moments.variance;
        const double lind = j.lindeberg(eps);
        const std::string at = "(kn=" + format_number(kn) + ")";
        Margin m1{"k_n a_n" + at, ka, 0.0, rel_tol * std::max(1.0, std::abs(a)),
                  std::isfinite(ka) && std::abs(ka - a) <= rel_tol * std::max(1.0, std::abs(a))};
        Margin m2{"k_n sigma_n^2" + at, ks2, 0.0, rel_tol * sigma2,
                  std::isfinite(ks2) && std::abs(ks2 - sigma2) <= rel_tol * sigma2};
        Margin m3{"lindeberg" + at, lind, 0.0, rel_tol, std::isfinite(lind) && lind <= rel_tol};
        last_ok = m1.pass && m2.pass && m3.pass;
        r.margins.push_back(m1);
        r.margins.push_back(m2);
        r.margins.push_back(m3);
    }
    r.pass = last_ok;
    return r;
}

Report check_condition_18_26(const std::vector<double>& kn_values,
                             const std::function<std::pair<JumpScheme, SubordinatorScheme>(double)>& family,
                             BoundCondition which) {
    if (kn_values.size() < 2) throw std::invalid_argument("condition 18/26: need at least two k_n values");
    Report r;
    r.experiment = which == BoundCondition::AbsMoment ? "cond18" : "cond26";
    r.parameters["kn"] = numbers(kn_values);
    std::vector<double> s;
    bool finite = true;
    for (double kn : kn_values) {
        const auto [j, clock] = family(kn);
        const Certificate& c = require_certificate(clock);
        r.parameters["jumps"] = j.name;
        r.parameters["clock"] = clock.describe();
        const double scale = which == BoundCondition::AbsMoment
                                 ? j.moments.abs_moment
                                 : std::sqrt(j.moments.variance) + std::abs(j.moments.mean);
        const double v = std::pow(c.c, c.delta1 / c.delta) * scale;
        finite = finite && std::isfinite(v);
        s.push_back(v);
    }
    const std::size_t half = s.size() / 2;
    const double first = *std::max_element(s.begin(), s.begin() + half);
    const double second = *std::max_element(s.begin() + half, s.end());
    const double k = std::max(first, second);
    for (std::size_t i = 0; i < s.size(); ++i)
        r.margins.push_back(Margin{"s(kn=" + format_number(kn_values[i]) + ")", s[i], 0.0, k, std::isfinite(s[i])});
    r.pass = finite && second <= first * (1.0 + 1e-12);
    r.margins.push_back(Margin{"sup second half <= sup first half", second, 0.0, first, r.pass});
    r.parameters["K"] = k;
    return r;
}

// ---------------------------------------------------------------------------

KsReport self_similarity_check(double alpha, double t, std::size_t n_samples, const RunContext& ctx,
                               std::uint64_t cell) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("self-similarity: t must lie in (0,1)");
    const SubordinatorScheme clock = SubordinatorScheme::stable(alpha, alpha / 2.0);
    const TimeGrid grid = TimeGrid::from_points({0.0, t, 1.0});
    auto a = draw_samples(n_samples, 2 * cell, ctx, [&](Rng& rng) {
        return simulate_subordinator(clock, grid, rng).at(t);
    });
    const double scale = std::pow(t, 1.0 / alpha);
    auto b = draw_samples(n_samples, 2 * cell + 1, ctx, [&](Rng& rng) { return scale * clock.sample_at_one(rng); });
    return ks_two_sample(std::move(a), std::move(b), "t^(1/alpha) L(1)");
}

CfPowerResult cf_power_check(double shape, double rate, double t, const std::vector<double>& frequencies,
                             std::size_t n_samples, const RunContext& ctx, std::uint64_t cell) {
    const SubordinatorScheme clock = SubordinatorScheme::gamma(shape, rate);
    const auto at_t = draw_samples(n_samples, 2 * cell, ctx, [&](Rng& rng) { return clock.sample_increment(t, rng); });
    const auto at_1 = draw_samples(n_samples, 2 * cell + 1, ctx, [&](Rng& rng) { return clock.sample_at_one(rng); });
    auto ecf = [](const std::vector<double>& x, double s, double& se) {
        std::complex<double> sum = 0.0;
        for (double v : x) sum += std::polar(1.0, s * v);
        const std::complex<double> phi = sum / double(x.size());
        se = std::sqrt(std::max(0.0, 1.0 - std::norm(phi)) / double(x.size()));
        return phi;
    };
    CfPowerResult res;
    res.frequencies = frequencies;
    res.pass = true;
    for (double s : frequencies) {
        double se_t = 0.0, se_1 = 0.0;
        const auto phi_t = ecf(at_t, s, se_t);
        const auto phi_1 = ecf(at_1, s, se_1);
        const auto power = std::pow(phi_1, t);
        const double slope = t * std::pow(std::abs(phi_1), t - 1.0);
        const double se = std::sqrt(se_t * se_t + slope * slope * se_1 * se_1);
        const double dev = std::abs(phi_t - power);
        res.deviation.push_back(dev);
        res.standard_error.push_back(se);
        res.pass = res.pass && dev <= 3.0 * se;
    }
    return res;
}

}  // namespace coxsim
