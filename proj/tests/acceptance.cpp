// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "coxsim/cli.hpp"
#include "coxsim/distributions.hpp"
#include "coxsim/format.hpp"
#include "coxsim/limits.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace coxsim;
namespace fs = std::filesystem;

namespace {

const std::size_t kN = 100000;
const unsigned kWorkers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

struct Criterion {
    int id;
    std::string title;
    double time_limit;
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(double x) { return format_number(std::round(x * 1e6) / 1e6); }

std::vector<double> draw(std::uint64_t cell, const std::function<double(Rng&)>& f) {
    return draw_samples(kN, cell, RunContext{42, kWorkers, 8192}, f);
}

Report experiment(const std::string& name, nlohmann::json params = nlohmann::json::object(), unsigned workers = kWorkers) {
    cli::RunConfig cfg;
    cfg.experiment = name;
    cfg.params = cli::resolve_params(name, params);
    cfg.workers = workers;
    return cli::run_experiment(cfg);
}

std::string final_ks(const Report& r) { return r.per_kn.empty() ? "-" : fmt(r.per_kn.back().ks); }

void criterion1(Criterion& c) {
    double worst_bessel = 0.0;
    for (int n : {0, 1, 2})
        for (double z : {0.1, 1.0, 10.0, 100.0}) {
            const double ref = oracle::bessel_k_half(n, z);
            worst_bessel = std::max({worst_bessel, std::abs(bessel_k(n + 0.5, z) / ref - 1.0),
                                     std::abs(bessel_k(-n - 0.5, z) / ref - 1.0)});
        }
    c.check(worst_bessel <= 1e-8, "bessel_k half-integer grid, max rel error " + format_number(worst_bessel));
    const auto cauchy = stable_characteristic_fn(StableParams(1.0, 0.0));
    const auto levy = stable_characteristic_fn(StableParams(0.5, 1.0));
    double worst_c = 0.0, worst_l = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double x = -5.0 + 0.5 * i, y = 0.25 * (i + 1);
        worst_c = std::max(worst_c, std::abs(cdf_from_cf(cauchy, x) - oracle::cauchy_cdf(x)));
        worst_l = std::max(worst_l, std::abs(cdf_from_cf(levy, y) - oracle::levy_cdf(y)));
    }
    c.check(worst_c <= 1e-6, "Cauchy inversion on 21 points, max abs error " + format_number(worst_c));
    c.check(worst_l <= 1e-6, "Levy inversion on 21 points, max abs error " + format_number(worst_l));
}

void criterion2(Criterion& c) {
    std::uint64_t cell = 0;
    auto run = [&](const std::string& label, const std::function<double(Rng&)>& sampler,
                   const std::function<double(double)>& cdf) {
        const double ks = ks_test(draw(cell++, sampler), cdf, label).statistic;
        c.check(ks <= 0.01, label + " KS " + fmt(ks));
    };
    for (const StableParams p : {StableParams(0.5, 1.0), StableParams(1.0, 0.0), StableParams(1.5, 0.0), StableParams(2.0, 0.0)}) {
        std::function<double(double)> cdf = [p](double x) { return stable_cdf(p, x); };
        if (p.alpha == 0.5) cdf = oracle::levy_cdf;
        if (p.alpha == 1.0) cdf = [](double x) { return oracle::cauchy_cdf(x); };
        if (p.alpha == 2.0) cdf = [](double x) { return oracle::phi_cdf(x / std::sqrt(2.0)); };
        run("stable(" + format_number(p.alpha) + "," + format_number(p.theta) + ")",
            [p](Rng& r) { return stable_sample(p, r); }, cdf);
    }
    for (const GigParams p : {GigParams(-0.5, 1.0, 1.0), GigParams(1.0, 0.0, 2.0), GigParams(0.7, 0.9, 1.3)}) {
        const GigDistribution d(p);
        run("gig(" + format_number(p.nu) + "," + format_number(p.mu) + "," + format_number(p.lambda) + ")",
            [d](Rng& r) { return d.sample(r); }, [d](double x) { return d.cdf(x); });
    }
    for (const GgParams p : {GgParams(0.5, 1.0, 1.0), GgParams(1.0, 2.0, 1.0), GgParams(-1.0, 2.0, 1.0)}) {
        const GgDistribution d(p);
        run("gg(" + format_number(p.nu) + "," + format_number(p.kappa) + "," + format_number(p.delta) + ")",
            [d](Rng& r) { return d.sample(r); }, [d](double x) { return d.cdf(x); });
    }
}

void margins_note(Criterion& c, const Report& r, const std::string& label) {
    std::string detail;
    for (const auto& m : r.margins) detail += " " + fmt(m.estimate);
    c.check(r.pass, label + ":" + detail);
}

void criterion3(Criterion& c) {
    for (double a : {1.0, 1.5}) {
        const auto mix = draw(100 + std::uint64_t(a * 10), [a](Rng& r) { return stable_sample_via_mixture(a, r); });
        const auto dir = draw(200 + std::uint64_t(a * 10), [a](Rng& r) { return stable_sample(StableParams(a, 0.0), r); });
        const double ks = ks_two_sample(mix, dir, "direct").statistic;
        c.check(ks <= 0.01, "scale-mixture route alpha=" + format_number(a) + " two-sample KS " + fmt(ks));
    }
    margins_note(c, experiment("stable-product"), "product identity KS (tol .01/.015/.015)");
    margins_note(c, experiment("self-similarity"), "self-similarity KS at t=1/4,1/2 (tol .01)");
    margins_note(c, experiment("increment-stationarity", {{"preset", "deterministic"}, {"tolerance", 0.015}}),
                 "increment stationarity, deterministic clock (tol .015)");
    margins_note(c, experiment("increment-stationarity", {{"preset", "stable"}, {"tolerance", 0.015}}),
                 "increment stationarity, stable clock (tol .015)");
    const Report cf = experiment("cf-power");
    double worst = 0.0;
    for (const auto& m : cf.margins) worst = std::max(worst, m.estimate / m.bound);
    c.check(cf.pass, "CF power on the gamma clock, max deviation / 3SE " + fmt(worst));
}

void criterion4(Criterion& c) {
    const Report det = experiment("lemma3", {{"preset", "rademacher-deterministic"}});
    c.check(det.pass, "lemma3 rademacher-deterministic, 9 cells + enumeration cross-checks");
    for (const auto& m : det.margins)
        if (m.label.rfind("enumerated", 0) == 0 && (m.bound == 0.125 || m.label.find("(0.5)| >= 2") != std::string::npos))
            c.notes.push_back("     " + m.label + " = " + fmt(m.estimate) + ", bound " + fmt(m.bound));
    const Report st = experiment("lemma3", {{"preset", "paper-stable-subordinator"}});
    c.check(st.pass, "lemma3 stable subordinator (alpha 1/2, delta 1/4), 9 cells");
    for (const auto* preset : {"rademacher-deterministic", "paper-stable-subordinator"}) {
        const Report t = experiment("tightness", {{"preset", preset}});
        std::size_t joint = 0, fact = 0;
        for (const auto& m : t.margins) (m.label.find("factor") != std::string::npos ? fact : joint) += 1;
        c.check(t.pass && joint >= 5 && fact >= 5, std::string("tightness ") + preset + ", " + std::to_string(joint) +
                                                       " bound margins, " + std::to_string(fact) + " factorization margins");
    }
}

void criterion5(Criterion& c) {
    for (const auto* preset : {"exponential", "gig"}) {
        const Report r = experiment("lemma4", {{"preset", preset}});
        c.check(r.pass, std::string("lemma4 ") + preset + " final KS " + final_ks(r));
    }
    for (const auto* name : {"cor1-rademacher-cauchy", "clt-normal", "thm2-gh"}) {
        const Report r = experiment(name);
        c.check(r.pass, std::string(name) + " final KS " + final_ks(r));
    }
    for (double nu : {0.5, 1.0}) {
        const Report r = experiment("cor3-gvg", {{"nu", nu}});
        c.check(r.pass, "cor3-gvg nu=" + format_number(nu) + " final KS " + final_ks(r));
    }
}

int cli_exit(std::vector<std::string> args) {
    args.insert(args.begin(), "coxsim");
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    std::streambuf* old = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    const int rc = cli::run(int(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion6(Criterion& c, const fs::path& root) {
    for (const auto* name : {"cond18-negative-control", "cond24-negative-control"}) {
        const Report r = experiment(name);
        c.check(!r.pass, std::string(name) + " verdict " + r.verdict());
        const int rc = cli_exit({"experiment", name, "--out", (root / "neg").string()});
        c.check(rc == 0, std::string(name) + " exit code " + std::to_string(rc) + " (expected 0)");
    }
    const int ok = cli_exit({"experiment", "cond18", "--out", (root / "neg").string()});
    c.check(ok == 0, "cond18 positive case exit code " + std::to_string(ok));
    const int fail = cli_exit({"experiment", "clt-normal", "--kn", "16,64", "-n", "10000", "--tolerance", "1e-4",
                               "--out", (root / "neg").string()});
    c.check(fail == 1, "failing verdict exit code " + std::to_string(fail));
    const int usage = cli_exit({"experiment", "lemma3", "--set", "bogus=1", "--out", (root / "neg").string()});
    c.check(usage == 2, "usage error exit code " + std::to_string(usage));
}

void criterion7(Criterion& c, const fs::path& root) {
    for (const auto* name : {"cor1-rademacher-cauchy", "tightness", "stable-product"}) {
        std::vector<std::string> json, csv;
        for (const auto& [dir, workers] : std::vector<std::pair<std::string, std::string>>{{"a", "1"}, {"b", "1"}, {"c", "4"}}) {
            const fs::path out = root / "repro" / dir;
            cli_exit({"experiment", name, "--workers", workers, "--out", out.string()});
            json.push_back(slurp(out / (std::string(name) + ".json")));
            csv.push_back(slurp(out / (std::string(name) + ".csv")));
        }
        const bool same = !json[0].empty() && json[0] == json[1] && json[0] == json[2] && csv[0] == csv[1] && csv[0] == csv[2];
        c.check(same, std::string(name) + " JSON and CSV byte-identical across reruns and 1 vs 4 workers");
    }
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / "coxsim_acceptance";
    fs::remove_all(root);
    std::vector<Criterion> criteria = {
        {1, "special-function oracles", 10},
        {2, "sampler fidelity", 120},
        {3, "identity suite", 180},
        {4, "bound suite", 120},
        {5, "convergence suite", 600},
        {6, "negative controls and exit codes", 60},
        {7, "reproducibility", 120},
    };
    bool all = true;
    for (auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        try {
            switch (c.id) {
                case 1: criterion1(c); break;
                case 2: criterion2(c); break;
                case 3: criterion3(c); break;
                case 4: criterion4(c); break;
                case 5: criterion5(c); break;
                case 6: criterion6(c, root); break;
                case 7: criterion7(c, root); break;
            }
        } catch (const std::exception& e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.check(secs <= c.time_limit, "runtime " + fmt(secs) + " s (limit " + format_number(c.time_limit) + " s)");
        for (const auto& n : c.notes) std::cout << "    " << n << "\n";
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << "\n" << std::flush;
        all = all && c.pass;
    }
    return all ? 0 : 1;
}
