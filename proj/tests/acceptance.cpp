// Acceptance gate: one PASS/FAIL line per criterion, exit code = failure count.
// Tolerances are pinned in the criterion functions next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "phaseopt/cli.hpp"

using namespace phaseopt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double sine_closed_cost(int n) {
    const double s = std::sin(pi / (2.0 * (n + 2)));
    return s * s;
}

// criterion 1: optimizer recovers the closed-form fidelity optimum for every
// N in 1..256 (cost within 1e-10, state within L2 distance 1e-8); the optimal
// costs are kept for the criterion-2 slope fit
Outcome criterion_optimal_fidelity(std::vector<double>& optimal_cost_by_n) {
    double worst_cost = 0.0, worst_dist = 0.0;
    optimal_cost_by_n.assign(257, 0.0);
    for (int n = 1; n <= 256; ++n) {
        const FourierCoefficients fc = fourier_coefficients(CostSpec::fidelity(), n);
        const OptimizeResult result = optimize_state(toeplitz_from_coeffs(fc, n));
        optimal_cost_by_n[n] = result.cost;
        worst_cost = std::max(worst_cost, std::abs(result.cost - sine_closed_cost(n)));
        const ProbeState reference = sine_state(n);
        double dist2 = 0.0;
        for (int j = 0; j <= n; ++j)
            dist2 += std::norm(result.state.amplitudes[j] - reference.amplitudes[j]);
        worst_dist = std::max(worst_dist, std::sqrt(dist2));
    }
    Outcome o;
    o.pass = worst_cost <= 1e-10 && worst_dist <= 1e-8;
    o.detail = "N in 1..256, max |cost - sin^2(pi/(2(N+2)))| = " + fmt(worst_cost) +
               " (tol 1e-10), max L2 state distance = " + fmt(worst_dist) + " (tol 1e-8)";
    return o;
}

// criterion 2: log-log cost slope over N in 32..256 is -2.0 +/- 0.05 for the
// optimal/sine state and -1.0 +/- 0.05 for the uniform state
Outcome criterion_scaling_separation(const std::vector<double>& optimal_cost_by_n) {
    std::vector<std::pair<double, double>> opt_pts, sine_pts, uniform_pts;
    for (int n = 32; n <= 256; ++n) {
        const FourierCoefficients fc = fourier_coefficients(CostSpec::fidelity(), n);
        const ToeplitzCostMatrix t = toeplitz_from_coeffs(fc, n);
        opt_pts.emplace_back(n, optimal_cost_by_n[n]);
        sine_pts.emplace_back(n, expected_cost(sine_state(n), t));
        uniform_pts.emplace_back(n, expected_cost(uniform_state(n), t));
    }
    const double s_opt = log_log_slope(opt_pts);
    const double s_sine = log_log_slope(sine_pts);
    const double s_uni = log_log_slope(uniform_pts);
    Outcome o;
    o.pass = std::abs(s_opt + 2.0) <= 0.05 && std::abs(s_sine + 2.0) <= 0.05 &&
             std::abs(s_uni + 1.0) <= 0.05;
    o.detail = "slopes over N in 32..256: optimal " + fmt(s_opt) + ", sine " + fmt(s_sine) +
               " (want -2.0 +/- 0.05), uniform " + fmt(s_uni) + " (want -1.0 +/- 0.05)";
    return o;
}

// criterion 3: uniform-state fidelity cost equals 1/(2(N+1)) within 1e-10 for
// N in 1..128, first through quadrature coefficients, then the closed form
Outcome criterion_uniform_closed_form() {
    const CostSpec quad_cost = CostSpec::custom(
        [](double phi) {
            const double s = std::sin(phi / 2.0);
            return s * s;
        },
        4096, Symmetry::Even);
    double worst_quad = 0.0, worst_analytic = 0.0;
    for (int n = 1; n <= 128; ++n) {
        const double closed = 0.5 / (n + 1);
        const ProbeState u = uniform_state(n);
        const double via_quadrature =
            expected_cost(u, toeplitz_from_coeffs(fourier_coefficients(quad_cost, n), n));
        const double via_analytic =
            expected_cost(u, toeplitz_from_coeffs(fourier_coefficients(CostSpec::fidelity(), n), n));
        worst_quad = std::max(worst_quad, std::abs(via_quadrature - closed));
        worst_analytic = std::max(worst_analytic, std::abs(via_analytic - closed));
    }
    Outcome o;
    o.pass = worst_quad <= 1e-10 && worst_analytic <= 1e-10;
    o.detail = "N in 1..128, |cost - 1/(2(N+1))|: quadrature route max " + fmt(worst_quad) +
               ", closed-coefficient route max " + fmt(worst_analytic) + " (tol 1e-10)";
    return o;
}

// criterion 4: semi-analytic cost of 20 random probes is M-independent within
// 1e-8 across M in {N+1, N+2, 2N, 4N, 64}
Outcome criterion_m_invariance() {
    rng::Engine eng = rng::make_engine(0x4d696e76ULL);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(eng() % 16);
        const ProbeState state(rng::random_unit_vector(eng, n + 1));
        std::vector<int> ms = {n + 1, n + 2, std::max(2 * n, n + 1), std::max(4 * n, n + 1), 64};
        worst = std::max(worst, m_invariance_check(state, CostSpec::fidelity(), ms));
    }
    Outcome o;
    o.pass = worst <= 1e-8;
    o.detail = "20 random probes, N <= 16, M in {N+1, N+2, 2N, 4N, 64}: max cost spread = " +
               fmt(worst) + " (tol 1e-8)";
    return o;
}

// criterion 5: 100 seeded random circuits (<= 6 qubits, <= 8 oracles) pass
// degree-<=N amplitude-polynomial reconstruction with residual <= 1e-9
Outcome criterion_polynomial_method() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        rng::Engine meta = rng::make_engine(rng::derive_seed(0x706f6c79ULL, i));
        const int qubits = 1 + static_cast<int>(meta() % 6);
        const int oracles = static_cast<int>(meta() % 9);
        const int unitaries = 2 + static_cast<int>(meta() % 10);
        const GeneralCircuitSpec spec = random_circuit(qubits, unitaries, oracles, meta());
        FitOptions options;
        options.throw_on_violation = false;
        options.seed = rng::derive_seed(0x686f6c64ULL, i);
        worst = std::max(worst, fit_amplitude_polynomials(spec, options).max_residual);
    }
    Outcome o;
    o.pass = worst <= 1e-9;
    o.detail = "100 random circuits, <= 6 qubits, <= 8 oracles: max held-out residual = " +
               fmt(worst) + " (tol 1e-9)";
    return o;
}

// criterion 6: ten fixed configurations spanning both costs agree analytic vs
// semi-analytic within 1e-6 and Monte Carlo (1e5 trials) within 4 stderr
Outcome criterion_triple_agreement() {
    struct Fixed {
        CostSpec cost;
        StateSource source;
        int n, m;
        std::uint64_t seed;
    };
    const std::vector<Fixed> configs = {
        {CostSpec::fidelity(), StateSource::Sine, 3, 4, 101},
        {CostSpec::fidelity(), StateSource::Sine, 7, 16, 102},
        {CostSpec::fidelity(), StateSource::Uniform, 4, 8, 103},
        {CostSpec::fidelity(), StateSource::Optimal, 10, 16, 104},
        {CostSpec::window(0.4), StateSource::Uniform, 5, 8, 105},
        {CostSpec::window(0.2), StateSource::Sine, 8, 9, 106},
        {CostSpec::window(0.3), StateSource::Optimal, 12, 16, 107},
        {CostSpec::fidelity(), StateSource::Uniform, 1, 2, 108},
        {CostSpec::window(0.8), StateSource::Uniform, 2, 4, 109},
        {CostSpec::fidelity(), StateSource::Sine, 16, 32, 110},
    };
    double worst_semi = 0.0, worst_mc_pull = 0.0;
    bool all_within = true;
    for (const Fixed& f : configs) {
        ExperimentConfig config;
        config.cost = f.cost;
        config.source = f.source;
        config.n_oracles = f.n;
        config.m_grid = f.m;
        config.trials = 100000;
        config.seed = f.seed;
        const CostReport report = run_experiment(config);
        worst_semi =
            std::max(worst_semi, std::abs(report.semi_analytic_cost - report.analytic_cost));
        all_within = all_within && report.monte_carlo_within_4_stderr;
        if (report.monte_carlo_stderr.has_value() && *report.monte_carlo_stderr > 0.0)
            worst_mc_pull = std::max(worst_mc_pull,
                                     std::abs(report.monte_carlo_cost - report.analytic_cost) /
                                         *report.monte_carlo_stderr);
    }
    Outcome o;
    o.pass = worst_semi <= 1e-6 && all_within;
    o.detail = "10 configs, 1e5 trials each: max |semi - analytic| = " + fmt(worst_semi) +
               " (tol 1e-6), max Monte Carlo pull = " + fmt(worst_mc_pull) +
               " stderr (limit 4)";
    return o;
}

// criterion 7: threshold cost at delta in {0.1, 0.2, 0.4}, N in 8..256:
// delta N cost stays bounded for the uniform probe and the eigen-optimal cost
// never exceeds the uniform cost (gap reported, not asserted zero)
Outcome criterion_window_behavior() {
    const double bound = 4.0;
    double worst_product = 0.0, worst_violation = 0.0, max_gap = 0.0;
    for (double delta : {0.1, 0.2, 0.4}) {
        const CostSpec cost = CostSpec::window(delta);
        for (int n : {8, 16, 32, 64, 128, 256}) {
            const FourierCoefficients fc = fourier_coefficients(cost, n);
            const ToeplitzCostMatrix t = toeplitz_from_coeffs(fc, n);
            const double uniform = expected_cost(uniform_state(n), t);
            const double optimal = optimize_state(t).cost;
            worst_product = std::max(worst_product, delta * n * uniform);
            worst_violation = std::max(worst_violation, optimal - uniform);
            max_gap = std::max(max_gap, uniform - optimal);
        }
    }
    Outcome o;
    o.pass = worst_product <= bound && worst_violation <= 1e-12;
    o.detail = "delta in {0.1, 0.2, 0.4}, N in {8..256}: max delta*N*uniform cost = " +
               fmt(worst_product) + " (bound " + fmt(bound) +
               "), max optimal-above-uniform = " + fmt(worst_violation) +
               " (tol 1e-12); largest optimal-vs-uniform gap " + fmt(max_gap) + " (reported)";
    return o;
}

// criterion 8: 1000 random mixtures never beat their best pure component
Outcome criterion_mixture_convexity() {
    rng::Engine eng = rng::make_engine(0x6d6978ULL);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(eng() % 9);
        const CostSpec cost = (trial % 2 == 0) ? CostSpec::fidelity()
                                               : CostSpec::window(0.2 + 0.5 * rng::uniform01(eng));
        const ToeplitzCostMatrix t = toeplitz_from_coeffs(fourier_coefficients(cost, n), n);
        const int parts = 2 + static_cast<int>(eng() % 4);
        double mix = 0.0, best = 2.0, wsum = 0.0;
        std::vector<double> costs(parts), weights(parts);
        for (int i = 0; i < parts; ++i) {
            costs[i] = expected_cost(ProbeState(rng::random_unit_vector(eng, n + 1)), t);
            weights[i] = rng::uniform01(eng);
            wsum += weights[i];
            best = std::min(best, costs[i]);
        }
        for (int i = 0; i < parts; ++i) mix += weights[i] / wsum * costs[i];
        if (!(mix >= best)) ++violations;
    }
    Outcome o;
    o.pass = violations == 0;
    o.detail = "1000 random mixtures, exact >= against the best component: " +
               std::to_string(violations) + " violations";
    return o;
}

// criterion 9: replaying each command's manifest reproduces every output file
// byte for byte
Outcome criterion_manifest_determinism() {
    const fs::path dir = fs::temp_directory_path() / "phaseopt_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = PHASEOPT_CLI_PATH;

    auto shell = [&](const std::string& args) {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        const int ret = std::system(cmd.c_str());
        return ret != -1 && WEXITSTATUS(ret) == 0;
    };
    auto same_file = [&](const fs::path& a, const fs::path& b) {
        return io::read_text_file(a.string()) == io::read_text_file(b.string());
    };

    struct Case {
        std::string name, args;
        std::vector<std::string> products;  // suffixes replayed and compared
    };
    const std::vector<Case> cases = {
        {"optimize", "optimize --cost fidelity --n 9", {".json", ".report.json"}},
        {"simulate",
         "simulate --cost window:0.5 --state sine --n 4 --m-grid 8 --trials 3000 --seed 12",
         {".json", ".csv"}},
        {"sweep", "sweep --cost fidelity --states sine,uniform --n-range 4:32:geom",
         {".csv", ".slopes.json"}},
        {"verify-poly", "verify-poly --circuits 6 --max-oracles 5 --max-qubits 4 --seed 21",
         {".csv"}},
    };

    std::string failures;
    for (const Case& c : cases) {
        const fs::path first = dir / (c.name + "_a");
        const fs::path second = dir / (c.name + "_b");
        if (!shell(c.args + " --out " + first.string())) {
            failures += " " + c.name + ":run";
            continue;
        }
        if (!shell("rerun " + first.string() + ".manifest.json --out " + second.string())) {
            failures += " " + c.name + ":rerun";
            continue;
        }
        for (const std::string& suffix : c.products)
            if (!same_file(first.string() + suffix, second.string() + suffix))
                failures += " " + c.name + ":" + suffix;
    }
    Outcome o;
    o.pass = failures.empty();
    o.detail = o.pass ? "optimize, simulate, sweep, verify-poly manifests all replay byte-identically"
                      : "mismatches:" + failures;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome outcome;
        double seconds;
    };
    std::vector<Criterion> results;
    std::vector<double> optimal_cost_by_n;

    auto run = [&](const char* name, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        results.push_back({name, std::move(o), elapsed_s(start)});
    };

    run("1 optimal fidelity state", [&] { return criterion_optimal_fidelity(optimal_cost_by_n); });
    run("2 scaling separation", [&] { return criterion_scaling_separation(optimal_cost_by_n); });
    run("3 uniform-state closed form", [] { return criterion_uniform_closed_form(); });
    run("4 M-invariance", [] { return criterion_m_invariance(); });
    run("5 polynomial method", [] { return criterion_polynomial_method(); });
    run("6 triple agreement", [] { return criterion_triple_agreement(); });
    run("7 window-cost behavior", [] { return criterion_window_behavior(); });
    run("8 mixture convexity", [] { return criterion_mixture_convexity(); });
    run("9 manifest determinism", [] { return criterion_manifest_determinism(); });

    int failures = 0;
    for (const Criterion& c : results) {
        if (!c.outcome.pass) ++failures;
        std::printf("%s criterion %s: %s [%.2fs]\n", c.outcome.pass ? "PASS" : "FAIL", c.name,
                    c.outcome.detail.c_str(), c.seconds);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}
