#include "coxsim/cli.hpp"

#include "coxsim/distributions.hpp"
#include "coxsim/format.hpp"
#include "coxsim/processes.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace coxsim::cli {

using json = nlohmann::ordered_json;

namespace {

const json kKnDefault = json::array({16, 64, 256, 1024, 4096});

ExperimentInfo info(std::string name, std::string description, json defaults, bool negative = false) {
    return ExperimentInfo{std::move(name), std::move(description), std::move(defaults), negative};
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> list = {
        info("lemma3", "tail bound P(|Q(t)| >= eps) against (eps^-beta m)^delta (C t)^delta1",
             {{"preset", "rademacher-deterministic"},
              {"eps", {1, 2, 4}},
              {"t", {0.1, 0.5, 1}},
              {"alpha", 0.5},
              {"delta", 0.25},
              {"n_samples", 100000}}),
        info("lemma4", "N/k_n and L/k_n share their limit law",
             {{"preset", "exponential"}, {"kn", kKnDefault}, {"n_samples", 100000}, {"tolerance", 0.02}}),
        info("tightness", "joint increment bound eps^(-2 beta delta) [K (t2-t1)/2]^(2 delta1) and factorization",
             {{"preset", "rademacher-deterministic"},
              {"eps", 2},
              {"triples", {{0, 0.5, 1}, {0.1, 0.3, 0.5}, {0, 0.25, 0.5}, {0.2, 0.6, 1}, {0.25, 0.5, 0.75}}},
              {"alpha", 0.5},
              {"delta", 0.3},
              {"n_samples", 100000}}),
        info("cor1-rademacher-cauchy", "+-k_n^(-1/2) jumps on a k_n G_{1/2,1} clock converge to a Cauchy law",
             {{"kn", kKnDefault}, {"n_samples", 100000}, {"tolerance", 0.02}}),
        info("clt-normal", "+-k_n^(-1/2) jumps on the clock k_n t converge to N(0,1)",
             {{"kn", kKnDefault}, {"n_samples", 100000}, {"tolerance", 0.02}}),
        info("thm2-gh", "drifted two-point jumps on a k_n GIG clock converge to the GH law",
             {{"kn", kKnDefault},
              {"n_samples", 100000},
              {"tolerance", 0.02},
              {"a", 1},
              {"nu", -0.5},
              {"mu", 1},
              {"lambda", 1}}),
        info("cor3-gvg", "centered jumps on a k_n Weibull clock converge to the GVG law",
             {{"kn", kKnDefault},
              {"n_samples", 100000},
              {"tolerance", 0.02},
              {"nu", 0.5},
              {"delta", 1},
              {"jumps", "laplace"}}),
        info("cond6", "E L^delta(t) <= (C t)^delta1",
             {{"preset", "stable"},
              {"t", {0.1, 0.25, 0.5, 1}},
              {"alpha", 0.5},
              {"delta", 0.25},
              {"n_samples", 100000}}),
        info("cond18", "K = sup C_n^(delta1/delta) m_n^beta is finite",
             {{"preset", "absorbed-scaled-marginal"}, {"kn", kKnDefault}, {"alpha", 0.5}, {"delta", 0.25}}),
        info("cond26", "K = sup C_n^(delta1/delta) (sigma_n + |a_n|) is finite",
             {{"kn", kKnDefault}, {"a", 1}}),
        info("cond24", "k_n a_n -> a, k_n sigma_n^2 -> sigma^2, Lindeberg term -> 0",
             {{"preset", "rademacher"}, {"kn", kKnDefault}, {"a", 1}, {"eps", 0.1}, {"rel_tol", 1e-6}}),
        info("cond18-negative-control", "clock k_n t with +-k_n^(-1/2) jumps: the sequence grows like k_n^(1/2)",
             {{"kn", kKnDefault}}, true),
        info("cond24-negative-control", "stable jumps without a second moment",
             {{"kn", kKnDefault}, {"alpha", 1.5}, {"eps", 0.1}, {"rel_tol", 1e-6}}, true),
        info("stable-product", "Z_{alpha,0} Z_{alpha',1}^(1/alpha) against G_{alpha alpha',0}",
             {{"pairs", {{2, 0.5}, {1, 0.5}, {2, 0.99}}}, {"tolerance", {0.01, 0.015, 0.015}}, {"n_samples", 100000}}),
        info("weibull-mixed-exponential", "Weibull(nu) against E/V with V ~ G_{nu,1}",
             {{"nu", {1, 0.5, 0.8}}, {"tolerance", {0.01, 0.015, 0.02}}, {"n_samples", 100000}}),
        info("increment-stationarity", "Q(t2) - Q(t1) against Q(t2 - t1)",
             {{"preset", "deterministic"},
              {"t1", 0.3},
              {"t2", 0.8},
              {"n_samples", 100000},
              {"tolerance", nullptr}}),
        info("self-similarity", "stable clock L(t) against t^(1/alpha) L(1)",
             {{"alpha", 0.5}, {"t", {0.25, 0.5}}, {"n_samples", 100000}, {"tolerance", 0.01}}),
        info("cf-power", "empirical CF of a gamma clock at t against the t-th power at 1",
             {{"shape", 1},
              {"rate", 1},
              {"t", 0.5},
              {"frequencies", {0.1, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 5, 8}},
              {"n_samples", 100000}}),
    };
    return list;
}

const ExperimentInfo& find_experiment(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return e;
    std::string names;
    for (const auto& e : experiments()) names += (names.empty() ? "" : ", ") + e.name;
    throw UsageError("unknown experiment '" + name + "'; available: " + names);
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

bool same_kind(const json& def, const json& v) {
    if (def.is_null()) return v.is_null() || v.is_number();
    if (def.is_number()) return v.is_number();
    if (def.is_array()) return v.is_array();
    if (def.is_string()) return v.is_string();
    if (def.is_boolean()) return v.is_boolean();
    return false;
}

std::string kind_name(const json& def) {
    if (def.is_null() || def.is_number()) return "a number";
    if (def.is_array()) return "an array";
    if (def.is_string()) return "a string";
    if (def.is_boolean()) return "a boolean";
    return "a value";
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
    }
}

}  // namespace

json resolve_params(const std::string& name, const nlohmann::json& overrides) {
    const ExperimentInfo& e = find_experiment(name);
    json p = e.defaults;
    if (overrides.is_null()) return p;
    if (!overrides.is_object()) throw UsageError("experiment parameters must be an object");
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        if (it.key() == "name") continue;
        if (!p.contains(it.key()))
            throw UsageError("experiment '" + name + "' has no parameter '" + it.key() + "'");
        if (!same_kind(p[it.key()], it.value()))
            throw UsageError("parameter '" + it.key() + "' must be " + kind_name(p[it.key()]));
        p[it.key()] = it.value();
    }
    return p;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "seed") {
            if (!it->is_number_unsigned()) throw UsageError("config key 'seed' must be a non-negative integer");
            c.seed = it->get<std::uint64_t>();
        } else if (k == "workers") {
            if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0)
                throw UsageError("config key 'workers' must be a positive integer");
            c.workers = it->get<unsigned>();
        } else if (k == "block_size") {
            if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0)
                throw UsageError("config key 'block_size' must be a positive integer");
            c.block_size = it->get<std::size_t>();
        } else if (k == "output_dir") {
            if (!it->is_string()) throw UsageError("config key 'output_dir' must be a string");
            c.output_dir = it->get<std::string>();
        } else if (k == "experiment") {
            if (!it->is_object() || !it->contains("name") || !(*it)["name"].is_string())
                throw UsageError("config key 'experiment' must be an object with a string 'name'");
            c.experiment = (*it)["name"].get<std::string>();
            c.params = resolve_params(c.experiment, *it);
        } else {
            throw UsageError("unknown config key '" + k + "'");
        }
    }
    if (c.experiment.empty()) throw UsageError("config has no experiment");
    return c;
}

RunContext RunConfig::context() const {
    RunContext ctx;
    ctx.seed = seed;
    ctx.workers = workers;
    ctx.block_size = block_size;
    return ctx;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

std::vector<double> doubles(const json& p, const std::string& key) { return get_as<std::vector<double>>(p, key); }

double number(const json& p, const std::string& key) { return get_as<double>(p, key); }

std::size_t count(const json& p, const std::string& key) {
    const double v = number(p, key);
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("parameter '" + key + "' must be a positive integer");
    return std::size_t(v);
}

std::string text(const json& p, const std::string& key) { return get_as<std::string>(p, key); }

[[noreturn]] void bad_preset(const std::string& preset, const std::string& valid) {
    throw UsageError("unknown preset '" + preset + "'; valid presets: " + valid);
}

Margin ks_margin(const std::string& label, const KsReport& ks, double tolerance) {
    return Margin{label, ks.statistic, ks.dkw_99, tolerance, ks.statistic <= tolerance};
}

bool all_pass(const std::vector<Margin>& m) {
    for (const auto& x : m)
        if (!x.pass) return false;
    return !m.empty();
}

Report lemma3(const json& p, const RunContext& ctx) {
    const std::string preset = text(p, "preset");
    const auto eps = doubles(p, "eps");
    const auto t = doubles(p, "t");
    const JumpScheme jumps = JumpScheme::rademacher(1.0);
    if (preset == "rademacher-deterministic") {
        const SubordinatorScheme clock = SubordinatorScheme::deterministic(1.0);
        Report r = check_lemma3_bound(jumps, clock, eps, t, count(p, "n_samples"), ctx);
        // Cross-check each Monte Carlo cell against exact enumeration.
        std::size_t i = 0;
        for (double ti : t) {
            for (double e : eps) {
                const Margin& mc = r.margins[i++];
                const double exact = rademacher_compound_tail(ti, e);
                const double se = std::max(mc.standard_error, 1.0 / std::sqrt(double(count(p, "n_samples"))));
                r.margins.push_back(Margin{"enumerated P(|Q(" + format_number(ti) + ")| >= " + format_number(e) + ")",
                                           exact, 0.0, mc.bound, exact <= mc.bound});
                r.margins.push_back(Margin{"monte carlo - enumerated (" + format_number(ti) + "," + format_number(e) + ")",
                                           mc.estimate - exact, se, 3.0 * se, std::abs(mc.estimate - exact) <= 3.0 * se});
            }
        }
        r.pass = all_pass(r.margins);
        r.parameters["preset"] = preset;
        return r;
    }
    if (preset == "paper-stable-subordinator") {
        Report r = check_lemma3_bound(jumps, SubordinatorScheme::stable(number(p, "alpha"), number(p, "delta")), eps,
                                      t, count(p, "n_samples"), ctx);
        r.parameters["preset"] = preset;
        return r;
    }
    bad_preset(preset, "rademacher-deterministic, paper-stable-subordinator");
}

MixingLaw lemma4_mixing(const std::string& preset) {
    if (preset == "exponential") return MixingLaw::gg(GgParams(1.0, 1.0, 1.0));
    if (preset == "gig") return MixingLaw::gig(GigParams(-0.5, 1.0, 1.0));
    if (preset == "degenerate") return MixingLaw::degenerate(1.0);
    bad_preset(preset, "exponential, gig, degenerate");
}

Report lemma4(const json& p, const RunContext& ctx) {
    Report r = check_lemma4_equivalence(lemma4_mixing(text(p, "preset")), doubles(p, "kn"), count(p, "n_samples"),
                                        ctx, number(p, "tolerance"));
    r.parameters["preset"] = text(p, "preset");
    return r;
}

Report tightness(const json& p, const RunContext& ctx) {
    const std::string preset = text(p, "preset");
    std::vector<Triple> triples;
    for (const auto& t : p.at("triples")) {
        if (!t.is_array() || t.size() != 3) throw UsageError("parameter 'triples' must hold [t1, t, t2] arrays");
        triples.push_back(Triple{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    const JumpScheme jumps = JumpScheme::rademacher(1.0);
    Report r;
    if (preset == "rademacher-deterministic") {
        const SubordinatorScheme clock = SubordinatorScheme::deterministic(1.0);
        const Certificate& c = *clock.certificate();
        const double k = std::pow(c.c, c.delta1 / c.delta) * jumps.moments.abs_moment;
        r = check_tightness_bound(jumps, clock, TightnessParams(k, jumps.moments.beta * c.delta, c.delta1), triples,
                                  number(p, "eps"), count(p, "n_samples"), ctx);
    } else if (preset == "paper-stable-subordinator") {
        const SubordinatorScheme clock = SubordinatorScheme::stable(number(p, "alpha"), number(p, "delta"));
        const Certificate& c = *clock.certificate();
        const double k = std::pow(c.c, c.delta1 / c.delta) * jumps.moments.abs_moment;
        r = check_tightness_bound(jumps, clock, TightnessParams(k, jumps.moments.beta * c.delta, c.delta1), triples,
                                  number(p, "eps"), count(p, "n_samples"), ctx);
    } else {
        bad_preset(preset, "rademacher-deterministic, paper-stable-subordinator");
    }
    r.parameters["preset"] = preset;
    return r;
}

ConvergenceSchedule schedule_from(const json& p) {
    ConvergenceSchedule s;
    s.kn_values = doubles(p, "kn");
    s.n_samples = count(p, "n_samples");
    s.tolerance = number(p, "tolerance");
    return s;
}

Report cor1(const json& p, const RunContext& ctx) {
    ConvergenceSchedule s = schedule_from(p);
    const MixingLaw levy = MixingLaw::one_sided_stable(0.5);
    s.jumps = [](double kn) { return JumpScheme::rademacher(kn); };
    s.clock = [levy](double kn) { return SubordinatorScheme::scaled_marginal(kn, levy); };
    const double c = cauchy_limit_scale();
    DistributionOracle limit = cauchy_oracle(1.0 / c);
    Report r = run_convergence_experiment("cor1-rademacher-cauchy", s, limit, ctx);
    r.parameters["cauchy_scale"] = 1.0 / c;
    return r;
}

Report clt(const json& p, const RunContext& ctx) {
    ConvergenceSchedule s = schedule_from(p);
    s.jumps = [](double kn) { return JumpScheme::rademacher(kn); };
    s.clock = [](double kn) { return SubordinatorScheme::deterministic(kn); };
    return run_convergence_experiment("clt-normal", s, normal_oracle(0.0, 1.0), ctx);
}

Report thm2(const json& p, const RunContext& ctx) {
    ConvergenceSchedule s = schedule_from(p);
    const double a = number(p, "a");
    const MixingLaw gig = MixingLaw::gig(GigParams(number(p, "nu"), number(p, "mu"), number(p, "lambda")));
    s.jumps = [a](double kn) { return JumpScheme::rademacher(kn, a); };
    s.clock = [gig](double kn) { return SubordinatorScheme::scaled_marginal(kn, gig); };
    Report r = run_convergence_experiment("thm2-gh", s, nvmm_oracle(NvmmSpec(a, 1.0, gig)), ctx);
    r.parameters["a"] = a;
    return r;
}

Report cor3(const json& p, const RunContext& ctx) {
    const std::string j = text(p, "jumps");
    CenteredJumps kind;
    if (j == "laplace") kind = CenteredJumps::Laplace;
    else if (j == "rademacher") kind = CenteredJumps::Rademacher;
    else if (j == "normal") kind = CenteredJumps::Normal;
    else throw UsageError("parameter 'jumps' must be one of laplace, rademacher, normal");
    return run_corollary3_experiment(number(p, "nu"), number(p, "delta"), doubles(p, "kn"), count(p, "n_samples"),
                                     kind, ctx, number(p, "tolerance"));
}

Report cond6(const json& p, const RunContext& ctx) {
    const std::string preset = text(p, "preset");
    Report r;
    if (preset == "stable")
        r = check_condition_6(SubordinatorScheme::stable(number(p, "alpha"), number(p, "delta")), doubles(p, "t"),
                              count(p, "n_samples"), ctx);
    else if (preset == "gamma")
        r = check_condition_6(SubordinatorScheme::gamma(1.0, 1.0), doubles(p, "t"), count(p, "n_samples"), ctx);
    else if (preset == "deterministic")
        r = check_condition_6(SubordinatorScheme::deterministic(1.0), doubles(p, "t"), count(p, "n_samples"), ctx);
    else
        bad_preset(preset, "stable, gamma, deterministic");
    r.parameters["preset"] = preset;
    return r;
}

Report cond18(const json& p, const RunContext&) {
    const std::string preset = text(p, "preset");
    Report r;
    if (preset == "absorbed-scaled-marginal") {
        const MixingLaw levy = MixingLaw::one_sided_stable(0.5);
        r = check_condition_18_26(doubles(p, "kn"), [levy](double kn) {
            return std::pair{JumpScheme::rademacher(kn),
                             SubordinatorScheme::scaled_marginal(kn, levy).with_certificate(Certificate{1.0, 1.0, 1.0})};
        }, BoundCondition::AbsMoment);
    } else if (preset == "paper-stable-subordinator") {
        const double alpha = number(p, "alpha"), delta = number(p, "delta");
        r = check_condition_18_26(doubles(p, "kn"), [=](double) {
            return std::pair{JumpScheme::rademacher(1.0), SubordinatorScheme::stable(alpha, delta)};
        }, BoundCondition::AbsMoment);
    } else {
        bad_preset(preset, "absorbed-scaled-marginal, paper-stable-subordinator");
    }
    r.parameters["preset"] = preset;
    return r;
}

Report cond26(const json& p, const RunContext&) {
    const double a = number(p, "a");
    const MixingLaw gig = MixingLaw::gig(GigParams(-0.5, 1.0, 1.0));
    Report r = check_condition_18_26(doubles(p, "kn"), [=](double kn) {
        return std::pair{JumpScheme::rademacher(kn, a),
                         SubordinatorScheme::scaled_marginal(kn, gig).with_certificate(Certificate{1.0, 1.0, 1.0})};
    }, BoundCondition::MeanScale);
    r.parameters["a"] = a;
    return r;
}

Report cond24(const json& p, const RunContext&) {
    const std::string preset = text(p, "preset");
    Report r;
    if (preset == "rademacher") {
        r = check_condition_24(doubles(p, "kn"), [](double kn) { return JumpScheme::rademacher(kn); }, 0.0, 1.0,
                               number(p, "eps"), number(p, "rel_tol"));
    } else if (preset == "drifted-rademacher") {
        const double a = number(p, "a");
        r = check_condition_24(doubles(p, "kn"), [a](double kn) { return JumpScheme::rademacher(kn, a); }, a, 1.0,
                               number(p, "eps"), number(p, "rel_tol"));
    } else {
        bad_preset(preset, "rademacher, drifted-rademacher");
    }
    r.parameters["preset"] = preset;
    return r;
}

Report cond18_negative(const json& p, const RunContext&) {
    Report r = check_condition_18_26(doubles(p, "kn"), [](double kn) {
        return std::pair{JumpScheme::rademacher(kn), SubordinatorScheme::deterministic(kn)};
    }, BoundCondition::AbsMoment);
    r.experiment = "cond18-negative-control";
    r.expect_fail = true;
    return r;
}

Report cond24_negative(const json& p, const RunContext&) {
    const double alpha = number(p, "alpha");
    Report r = check_condition_24(doubles(p, "kn"), [alpha](double kn) {
        return JumpScheme::symmetric_stable(alpha, std::pow(kn, -1.0 / alpha), kn, 1.0);
    }, 0.0, 1.0, number(p, "eps"), number(p, "rel_tol"));
    r.experiment = "cond24-negative-control";
    r.parameters["alpha"] = alpha;
    r.expect_fail = true;
    return r;
}

Report stable_product(const json& p, const RunContext& ctx) {
    Report r;
    r.experiment = "stable-product";
    r.parameters["pairs"] = p.at("pairs");
    r.parameters["n_samples"] = count(p, "n_samples");
    r.parameters["tolerance"] = p.at("tolerance");
    const auto tol = doubles(p, "tolerance");
    if (tol.size() != p.at("pairs").size())
        throw UsageError("parameters 'pairs' and 'tolerance' must have the same length");
    std::uint64_t cell = 0;
    for (const auto& pair : p.at("pairs")) {
        if (!pair.is_array() || pair.size() != 2) throw UsageError("parameter 'pairs' must hold [alpha, alpha'] arrays");
        const double a = pair[0].get<double>(), ap = pair[1].get<double>();
        Rng rng(ctx.seed, stream_index(cell++, 0));
        const KsReport ks = stable_product_check(a, ap, count(p, "n_samples"), rng);
        r.margins.push_back(ks_margin("ks(alpha=" + format_number(a) + ",alpha'=" + format_number(ap) + ")", ks,
                                      tol[cell - 1]));
    }
    r.pass = all_pass(r.margins);
    return r;
}

Report weibull(const json& p, const RunContext& ctx) {
    const auto nus = doubles(p, "nu");
    const auto tol = doubles(p, "tolerance");
    if (tol.size() != nus.size()) throw UsageError("parameters 'nu' and 'tolerance' must have the same length");
    Report r;
    r.experiment = "weibull-mixed-exponential";
    r.parameters["nu"] = p.at("nu");
    r.parameters["tolerance"] = p.at("tolerance");
    r.parameters["n_samples"] = count(p, "n_samples");
    for (std::size_t i = 0; i < nus.size(); ++i) {
        Rng rng(ctx.seed, stream_index(i, 0));
        const KsReport ks = weibull_mixed_exponential_check(nus[i], count(p, "n_samples"), rng);
        r.margins.push_back(ks_margin("ks(nu=" + format_number(nus[i]) + ")", ks, tol[i]));
    }
    r.pass = all_pass(r.margins);
    return r;
}

Report increments(const json& p, const RunContext& ctx) {
    const std::string preset = text(p, "preset");
    const JumpScheme jumps = JumpScheme::rademacher(1.0);
    double tol;
    std::optional<SubordinatorScheme> clock;
    if (preset == "deterministic") {
        clock = SubordinatorScheme::deterministic(1.0);
        tol = 0.01;
    } else if (preset == "stable") {
        clock = SubordinatorScheme::stable(0.5, 0.25);
        tol = 0.015;
    } else {
        bad_preset(preset, "deterministic, stable");
    }
    if (!p.at("tolerance").is_null()) tol = number(p, "tolerance");
    Rng rng(ctx.seed, stream_index(0, 0));
    const KsReport ks =
        increment_stationarity_check(jumps, *clock, number(p, "t1"), number(p, "t2"), count(p, "n_samples"), rng);
    Report r;
    r.experiment = "increment-stationarity";
    r.parameters["preset"] = preset;
    r.parameters["clock"] = clock->describe();
    r.parameters["t1"] = number(p, "t1");
    r.parameters["t2"] = number(p, "t2");
    r.parameters["n_samples"] = count(p, "n_samples");
    r.margins.push_back(ks_margin("ks", ks, tol));
    r.pass = all_pass(r.margins);
    return r;
}

Report self_similarity(const json& p, const RunContext& ctx) {
    Report r;
    r.experiment = "self-similarity";
    r.parameters["alpha"] = number(p, "alpha");
    r.parameters["t"] = p.at("t");
    r.parameters["n_samples"] = count(p, "n_samples");
    std::uint64_t cell = 0;
    for (double t : doubles(p, "t")) {
        const KsReport ks = self_similarity_check(number(p, "alpha"), t, count(p, "n_samples"), ctx, cell++);
        r.margins.push_back(ks_margin("ks(t=" + format_number(t) + ")", ks, number(p, "tolerance")));
    }
    r.pass = all_pass(r.margins);
    return r;
}

Report cf_power(const json& p, const RunContext& ctx) {
    const CfPowerResult res = cf_power_check(number(p, "shape"), number(p, "rate"), number(p, "t"),
                                             doubles(p, "frequencies"), count(p, "n_samples"), ctx);
    Report r;
    r.experiment = "cf-power";
    r.parameters["shape"] = number(p, "shape");
    r.parameters["rate"] = number(p, "rate");
    r.parameters["t"] = number(p, "t");
    r.parameters["n_samples"] = count(p, "n_samples");
    for (std::size_t i = 0; i < res.frequencies.size(); ++i)
        r.margins.push_back(Margin{"|phi_t - phi_1^t|(s=" + format_number(res.frequencies[i]) + ")",
                                   res.deviation[i], res.standard_error[i], 3.0 * res.standard_error[i],
                                   res.deviation[i] <= 3.0 * res.standard_error[i]});
    r.pass = res.pass;
    return r;
}

using Runner = Report (*)(const json&, const RunContext&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m = {
        {"lemma3", lemma3},
        {"lemma4", lemma4},
        {"tightness", tightness},
        {"cor1-rademacher-cauchy", cor1},
        {"clt-normal", clt},
        {"thm2-gh", thm2},
        {"cor3-gvg", cor3},
        {"cond6", cond6},
        {"cond18", cond18},
        {"cond26", cond26},
        {"cond24", cond24},
        {"cond18-negative-control", cond18_negative},
        {"cond24-negative-control", cond24_negative},
        {"stable-product", stable_product},
        {"weibull-mixed-exponential", weibull},
        {"increment-stationarity", increments},
        {"self-similarity", self_similarity},
        {"cf-power", cf_power},
    };
    return m;
}

}  // namespace

Report run_experiment(const RunConfig& cfg) {
    const ExperimentInfo& e = find_experiment(cfg.experiment);
    const json params = resolve_params(cfg.experiment, cfg.params);
    Report r = runners().at(e.name)(params, cfg.context());
    r.experiment = e.name;
    r.expect_fail = e.negative_control;
    r.parameters["seed"] = cfg.seed;
    r.parameters["block_size"] = cfg.block_size;
    return r;
}

void write_report_files(const RunConfig& cfg, const Report& report) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string base = report.experiment;
    {
        std::ofstream out(dir / (base + ".json"), std::ios::binary);
        out << to_json_text(report);
    }
    {
        std::ofstream out(dir / (base + ".csv"), std::ios::binary);
        write_csv(report, out);
    }
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
        json meta = {{"experiment", base}, {"timestamp", stamp}, {"workers", cfg.workers}};
        std::ofstream out(dir / (base + ".meta.json"), std::ios::binary);
        out << meta.dump(2) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Families for sample / cdf / density
// ---------------------------------------------------------------------------

namespace {

using Params = std::map<std::string, std::optional<double>>;

double need(const Params& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end() || !it->second) throw UsageError("missing required option --" + key);
    return *it->second;
}

double opt(const Params& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it != p.end() && it->second ? *it->second : fallback;
}

MixingLaw mixing_from(const std::string& kind, const Params& p) {
    if (kind == "gig") return MixingLaw::gig(GigParams(need(p, "nu"), need(p, "mu"), need(p, "lambda")));
    if (kind == "gg") return MixingLaw::gg(GgParams(need(p, "nu"), need(p, "kappa"), need(p, "delta")));
    if (kind == "weibull") return MixingLaw::gg(GgParams(need(p, "nu"), 1.0, opt(p, "delta", 1.0)));
    if (kind == "stable") return MixingLaw::one_sided_stable(need(p, "alpha"));
    if (kind == "degenerate") return MixingLaw::degenerate(need(p, "value"));
    throw UsageError("--mixing must be one of gig, gg, weibull, stable, degenerate");
}

DistributionOracle family_oracle(const std::string& family, const std::string& mixing, const Params& p) {
    if (family == "stable") {
        const StableParams sp(need(p, "alpha"), opt(p, "theta", 0.0));
        DistributionOracle o = stable_oracle(sp);
        if (sp.alpha == 2.0 && sp.theta == 0.0) o.density = normal_oracle(0.0, std::sqrt(2.0)).density;
        else if (sp.alpha == 1.0 && sp.theta == 0.0) o.density = cauchy_oracle(1.0).density;
        else if (sp.alpha == 0.5 && sp.theta == 1.0) {
            const MixingLaw levy = MixingLaw::one_sided_stable(0.5);
            o.density = [levy](double x) { return x > 0.0 ? levy.density(x) : 0.0; };
        }
        return o;
    }
    if (family == "gig") {
        const GigDistribution d(GigParams(need(p, "nu"), need(p, "mu"), need(p, "lambda")));
        return DistributionOracle{"gig", [d](double x) { return x <= 0.0 ? 0.0 : d.cdf(x); },
                                  [d](double x) { return x <= 0.0 ? 0.0 : d.density(x); },
                                  [d](Rng& rng) { return d.sample(rng); }};
    }
    if (family == "gg" || family == "weibull") {
        const GgParams gp = family == "gg" ? GgParams(need(p, "nu"), need(p, "kappa"), need(p, "delta"))
                                           : GgParams(need(p, "nu"), 1.0, opt(p, "delta", 1.0));
        const GgDistribution d(gp);
        return DistributionOracle{family, [d](double x) { return x <= 0.0 ? 0.0 : d.cdf(x); },
                                  [d](double x) { return x < 0.0 ? 0.0 : d.density(x); },
                                  [d](Rng& rng) { return d.sample(rng); }};
    }
    const double a = opt(p, "a", 0.0), sigma = opt(p, "sigma", 1.0);
    if (family == "gh") return nvmm_oracle(NvmmSpec(a, sigma, mixing_from("gig", p)));
    if (family == "gvg") return nvmm_oracle(NvmmSpec(a, sigma, mixing_from("gg", p)));
    if (family == "nvmm") return nvmm_oracle(NvmmSpec(a, sigma, mixing_from(mixing, p)));
    throw UsageError("family must be one of stable, gig, gg, gh, gvg, nvmm, weibull");
}

std::vector<double> x_values(const std::vector<double>& xs, const std::vector<double>& grid) {
    std::vector<double> out = xs;
    if (!grid.empty()) {
        if (grid.size() != 3 || !(grid[2] >= 1.0) || grid[2] != std::floor(grid[2]))
            throw UsageError("--grid takes lo,hi,count with an integer count >= 1");
        const std::size_t n = std::size_t(grid[2]);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(n == 1 ? grid[0] : grid[0] + (grid[1] - grid[0]) * double(i) / double(n - 1));
    }
    if (out.empty()) throw UsageError("no evaluation points: pass --x or --grid");
    for (double x : out)
        if (!std::isfinite(x)) throw UsageError("evaluation points must be finite");
    return out;
}

struct Output {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty()) return;
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        file.open(path, std::ios::binary);
        if (!file) throw UsageError("cannot open output file '" + path + "'");
        stream = &file;
    }
};

void add_param_options(CLI::App* app, Params& p, const std::vector<std::string>& names) {
    for (const auto& n : names) {
        p[n] = std::nullopt;
        app->add_option_function<double>("--" + n, [&p, n](const double& v) { p[n] = v; }, "parameter " + n);
    }
}

const std::vector<std::string> kFamilyParams = {"alpha", "theta", "nu", "mu", "lambda", "kappa",
                                                "delta", "a",     "sigma", "value"};

}  // namespace

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Simulation and verification toolkit for compound Cox processes"};
    app.require_subcommand(1);

    // sample / cdf / density
    std::string family, mixing = "gig", out_path;
    std::size_t n = 1000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
    std::vector<double> xs, grid;
    Params fp;

    auto* sample = app.add_subcommand("sample", "draw a sample; CSV index,value");
    sample->add_option("family", family, "stable, gig, gg, gh, gvg, nvmm, weibull")->required();
    add_param_options(sample, fp, kFamilyParams);
    sample->add_option("--mixing", mixing, "nvmm mixing law: gig, gg, weibull, stable, degenerate");
    sample->add_option("-n,--n-samples", n, "number of draws");
    sample->add_option("--seed", seed, "master seed");
    sample->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sample->add_option("-o,--out", out_path, "output file (default stdout)");

    Params cp;
    std::string cmix = "gig";
    auto* cdf = app.add_subcommand("cdf", "distribution function on points; CSV x,value");
    auto* density = app.add_subcommand("density", "density on points; CSV x,value");
    for (auto* sub : {cdf, density}) {
        sub->add_option("family", family, "stable, gig, gg, gh, gvg, nvmm, weibull")->required();
        add_param_options(sub, cp, kFamilyParams);
        sub->add_option("--mixing", cmix, "nvmm mixing law: gig, gg, weibull, stable, degenerate");
        sub->add_option("--x", xs, "evaluation points")->delimiter(',');
        sub->add_option("--grid", grid, "lo,hi,count")->delimiter(',');
        sub->add_option("-o,--out", out_path, "output file (default stdout)");
    }

    // simulate-path
    std::string process = "cox", clock_kind = "stable", jumps_kind = "rademacher";
    std::size_t cells = 1024;
    Params pp;
    auto* path = app.add_subcommand("simulate-path", "simulate one path on a uniform grid; CSV t,value");
    path->add_option("--process", process, "cox or subordinator");
    path->add_option("--clock", clock_kind, "stable, gamma, ig, deterministic");
    path->add_option("--jumps", jumps_kind, "rademacher, laplace, normal, constant");
    add_param_options(path, pp, {"alpha", "shape", "rate", "mean", "slope", "kn", "a", "value"});
    path->add_option("--cells", cells, "grid cells")->check(CLI::PositiveNumber);
    path->add_option("--seed", seed, "master seed");
    path->add_option("-o,--out", out_path, "output file (default stdout)");

    // experiment
    std::string exp_name, config_path, preset, out_dir;
    std::vector<double> kn;
    std::optional<std::size_t> exp_n;
    std::optional<std::uint64_t> exp_seed;
    std::optional<unsigned> exp_workers;
    std::optional<std::size_t> exp_block;
    std::optional<double> tolerance, nu;
    std::vector<std::string> sets;
    auto* exp = app.add_subcommand("experiment", "run a named experiment; writes JSON and CSV reports");
    exp->add_option("name", exp_name, "experiment name (see list-experiments)");
    exp->add_option("--config", config_path, "JSON config file");
    exp->add_option("--preset", preset, "experiment preset");
    exp->add_option("--kn", kn, "k_n schedule")->delimiter(',');
    exp->add_option_function<std::size_t>("-n,--n-samples", [&](const std::size_t& v) { exp_n = v; }, "samples per cell");
    exp->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { exp_seed = v; }, "master seed");
    exp->add_option_function<unsigned>("--workers", [&](const unsigned& v) { exp_workers = v; }, "worker threads");
    exp->add_option_function<std::size_t>("--block-size", [&](const std::size_t& v) { exp_block = v; },
                                          "draws per random stream block");
    exp->add_option_function<double>("--tolerance", [&](const double& v) { tolerance = v; }, "KS tolerance");
    exp->add_option_function<double>("--nu", [&](const double& v) { nu = v; }, "nu parameter");
    exp->add_option("--set", sets, "override key=value (value parsed as JSON)");
    exp->add_option("--out", out_dir, "output directory");

    auto* list = app.add_subcommand("list-experiments", "list registered experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*list) {
            for (const auto& e : experiments())
                std::cout << e.name << (e.negative_control ? "  [negative control]" : "") << "\n    "
                          << e.description << "\n    defaults: " << e.defaults.dump() << "\n";
            return kSuccess;
        }
        if (*sample) {
            if (n == 0) throw UsageError("-n must be >= 1");
            const DistributionOracle o = family_oracle(family, mixing, fp);
            RunContext ctx;
            ctx.seed = seed;
            ctx.workers = workers;
            const auto values = draw_samples(n, 0, ctx, o.sampler);
            Output out(out_path);
            *out.stream << "index,value\n";
            for (std::size_t i = 0; i < values.size(); ++i) *out.stream << i << ',' << format_number(values[i]) << '\n';
            return kSuccess;
        }
        if (*cdf || *density) {
            const bool want_density = bool(*density);
            const DistributionOracle o = family_oracle(family, cmix, cp);
            if (want_density && !o.density) throw UsageError("density is not available for this " + family + " law");
            const auto points = x_values(xs, grid);
            std::vector<double> values;
            for (double x : points) values.push_back(want_density ? o.density(x) : o.cdf(x));
            Output out(out_path);
            *out.stream << "x,value\n";
            for (std::size_t i = 0; i < points.size(); ++i)
                *out.stream << format_number(points[i]) << ',' << format_number(values[i]) << '\n';
            return kSuccess;
        }
        if (*path) {
            SubordinatorScheme clock = SubordinatorScheme::deterministic(1.0);
            if (clock_kind == "stable") clock = SubordinatorScheme::stable(need(pp, "alpha"), need(pp, "alpha") / 2.0);
            else if (clock_kind == "gamma") clock = SubordinatorScheme::gamma(need(pp, "shape"), need(pp, "rate"));
            else if (clock_kind == "ig") clock = SubordinatorScheme::inverse_gaussian(need(pp, "mean"), need(pp, "shape"));
            else if (clock_kind == "deterministic") clock = SubordinatorScheme::deterministic(opt(pp, "slope", 1.0));
            else throw UsageError("--clock must be one of stable, gamma, ig, deterministic");
            const double k = opt(pp, "kn", 1.0);
            JumpScheme jumps;
            if (jumps_kind == "rademacher") jumps = JumpScheme::rademacher(k, opt(pp, "a", 0.0));
            else if (jumps_kind == "laplace") jumps = JumpScheme::laplace(k);
            else if (jumps_kind == "normal") jumps = JumpScheme::normal(opt(pp, "a", 0.0) / k, 1.0 / std::sqrt(k), k);
            else if (jumps_kind == "constant") jumps = JumpScheme::constant(opt(pp, "value", 1.0));
            else throw UsageError("--jumps must be one of rademacher, laplace, normal, constant");
            Rng rng(seed, 0);
            const TimeGrid g = TimeGrid::uniform(cells);
            if (process != "cox" && process != "subordinator")
                throw UsageError("--process must be cox or subordinator");
            const SamplePath sp = process == "subordinator" ? simulate_subordinator(clock, g, rng)
                                                            : simulate_cox_path(jumps, clock, g, rng);
            Output out(out_path);
            sp.write_csv(*out.stream);
            return kSuccess;
        }
        if (*exp) {
            nlohmann::json cfg_json = nlohmann::json::object();
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw UsageError("cannot read config file '" + config_path + "'");
                try {
                    cfg_json = nlohmann::json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw UsageError(std::string("config file is not valid JSON: ") + e.what());
                }
                if (!cfg_json.is_object()) throw UsageError("config must be a JSON object");
            }
            if (!cfg_json.contains("experiment")) cfg_json["experiment"] = nlohmann::json::object();
            auto& e = cfg_json["experiment"];
            if (!e.is_object()) throw UsageError("config key 'experiment' must be an object");
            if (!exp_name.empty()) e["name"] = exp_name;
            if (!e.contains("name")) throw UsageError("no experiment name given (argument or config)");
            if (!preset.empty()) e["preset"] = preset;
            if (!kn.empty()) e["kn"] = kn;
            if (exp_n) e["n_samples"] = *exp_n;
            if (tolerance) e["tolerance"] = *tolerance;
            if (nu) e["nu"] = *nu;
            for (const auto& s : sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
                const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
                try {
                    e[key] = nlohmann::json::parse(val);
                } catch (const nlohmann::json::parse_error&) {
                    e[key] = val;
                }
            }
            if (exp_seed) cfg_json["seed"] = *exp_seed;
            if (exp_workers) cfg_json["workers"] = *exp_workers;
            if (exp_block) cfg_json["block_size"] = *exp_block;
            if (!out_dir.empty()) cfg_json["output_dir"] = out_dir;
            const RunConfig cfg = RunConfig::from_json(cfg_json);
            const Report report = run_experiment(cfg);
            write_report_files(cfg, report);
            std::cout << report.experiment << ": " << report.verdict()
                      << (report.expect_fail ? " (expected FAIL)" : "") << "\n";
            for (const auto& row : report.per_kn)
                std::cout << "  kn=" << format_number(row.kn) << " ks=" << format_number(row.ks)
                          << " dkw_99=" << format_number(row.dkw_99) << "\n";
            std::cout << "  report: " << (std::filesystem::path(cfg.output_dir) / (report.experiment + ".json")).string()
                      << "\n";
            return report.as_expected() ? kSuccess : kVerdictFailure;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << " (estimate " << format_number(e.estimate())
                  << ", error bound " << format_number(e.error_bound()) << ")\n";
        return kNumericalFailure;
    } catch (const std::overflow_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::range_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kUsageError;
}

}  // namespace coxsim::cli
