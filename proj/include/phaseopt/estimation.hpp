#pragma once

#include <optional>
#include <vector>

#include "phaseopt/common.hpp"
#include "phaseopt/cost_model.hpp"
#include "phaseopt/parallel.hpp"
#include "phaseopt/quadrature.hpp"
#include "phaseopt/rng.hpp"
#include "phaseopt/simulator.hpp"
#include "phaseopt/states.hpp"

namespace phaseopt {

// ----------------------------------- types -----------------------------------

enum class StateSource { Sine, Uniform, Optimal, Imported };
enum class PhaseSampling { UniformRandom, Grid };

struct ExperimentConfig {
    int n_oracles = 1;
    int m_grid = 2;
    CostSpec cost;
    StateSource source = StateSource::Sine;
    std::optional<ProbeState> imported;  // required iff source == Imported
    int trials = 1;
    PhaseSampling sampling = PhaseSampling::UniformRandom;
    std::uint64_t seed = 0;   // master seed for phase draws and outcome sampling
    int grid_points = 1;      // phase grid resolution for Grid sampling

    void validate() const {
        if (n_oracles < 0) throw std::invalid_argument("ExperimentConfig: n_oracles must be >= 0");
        if (m_grid < n_oracles + 1)
            throw std::invalid_argument("ExperimentConfig: need m_grid >= n_oracles + 1");
        if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
        if (sampling == PhaseSampling::Grid && grid_points < 1)
            throw std::invalid_argument("ExperimentConfig: grid_points must be >= 1");
        if (source == StateSource::Imported && !imported.has_value())
            throw std::invalid_argument("ExperimentConfig: imported state missing");
    }
};

struct CostReport {
    double analytic_cost = 0.0;
    double semi_analytic_cost = 0.0;
    double monte_carlo_cost = 0.0;
    std::optional<double> monte_carlo_stderr;  // engaged for trials >= 2
    int oracle_calls_per_trial = 0;
    bool monte_carlo_within_4_stderr = true;
};

struct MonteCarloResult {
    double mean = 0.0;
    std::optional<double> standard_error;
};

struct SweepRow {
    int n_oracles = 0;
    StateSource source = StateSource::Sine;
    double analytic_cost = 0.0;
};

// --------------------------------- state lookup -------------------------------

inline ProbeState make_probe_state(const ExperimentConfig& config) {
    switch (config.source) {
        case StateSource::Sine:
            return sine_state(config.n_oracles);
        case StateSource::Uniform:
            return uniform_state(config.n_oracles);
        case StateSource::Optimal: {
            const FourierCoefficients fc = fourier_coefficients(config.cost, config.n_oracles);
            return optimize_state(toeplitz_from_coeffs(fc, config.n_oracles)).state;
        }
        case StateSource::Imported: {
            if (!config.imported.has_value())
                throw std::invalid_argument("make_probe_state: imported state missing");
            const ProbeState& s = *config.imported;
            if (s.n_copies() != config.n_oracles)
                throw std::invalid_argument("make_probe_state: imported state size != n_oracles + 1");
            return s;
        }
    }
    throw std::invalid_argument("make_probe_state: unknown source");
}

// ------------------------------- expected costs -------------------------------

inline double analytic_cost(const ProbeState& state, const CostSpec& cost) {
    const int n = state.n_copies();
    return expected_cost(state, toeplitz_from_coeffs(fourier_coefficients(cost, n), n));
}

// Mean over phi of sum_y Pr(y|phi) C(phi - 2 pi y / M); the outcome sum is
// exact, the phi integral is quadrature. Smooth costs use the adaptive
// periodic trapezoid (4096 points doubling to 2^16, successive agreement
// 1e-8). Costs with jumps defeat that rule (its error stalls near the
// discontinuities), so they are integrated piecewise between the jump
// locations of the shifted cost terms, which restores spectral accuracy.
inline double semi_analytic_cost(const ProbeState& state, const CostSpec& cost, int m_grid) {
    state.validate();
    const int n = state.n_copies();
    if (m_grid < n + 1) throw std::invalid_argument("semi_analytic_cost: need m_grid >= n_copies + 1");

    auto integrand = [&](double phi) {
        double acc = 0.0;
        for (int y = 0; y < m_grid; ++y) {
            const double shifted = phi - two_pi * y / m_grid;
            const double p = std::norm(phase_response(state.amplitudes, shifted)) / m_grid;
            acc += p * cost.evaluate(shifted);
        }
        return acc;
    };

    const std::vector<double> jumps = cost.breakpoints();
    if (jumps.empty()) return quad::periodic_mean_adaptive(integrand, 4096, 1e-8, 1 << 16);

    std::vector<double> all_breaks;
    all_breaks.reserve(jumps.size() * m_grid);
    for (int y = 0; y < m_grid; ++y)
        for (double b : jumps) all_breaks.push_back(b + two_pi * y / m_grid);
    return quad::piecewise_circle_mean(integrand, std::move(all_breaks), std::max(1, n));
}

inline double semi_analytic_cost(const ExperimentConfig& config) {
    config.validate();
    return semi_analytic_cost(make_probe_state(config), config.cost, config.m_grid);
}

// Samples phases, runs the full fixed-form simulation per trial, and averages
// the cost of the announced estimate. Trial i draws its phase from a stream
// seeded by (master seed, 2i) and its readout from (master seed, 2i+1), so
// results are bit-identical for a given seed regardless of thread count.
inline MonteCarloResult monte_carlo_cost(const ExperimentConfig& config) {
    config.validate();
    const ProbeState state = make_probe_state(config);
    const int trials = config.trials;

    std::vector<double> costs(trials);
    par::parallel_for(trials, [&](std::int64_t i) {
        double phi;
        if (config.sampling == PhaseSampling::Grid) {
            phi = two_pi * double(i % config.grid_points) / config.grid_points;
        } else {
            rng::Engine eng = rng::make_engine(rng::derive_seed(config.seed, 2 * i));
            phi = rng::uniform_phase(eng);
        }
        const Procedure1Result run =
            run_procedure1(state, config.m_grid, phi, rng::derive_seed(config.seed, 2 * i + 1));
        const double estimate = estimate_from_outcome(run.outcome, config.m_grid);
        costs[i] = config.cost.evaluate(phi - estimate);
    });

    double sum = 0.0;
    for (double c : costs) sum += c;
    MonteCarloResult result;
    result.mean = sum / trials;
    if (trials >= 2) {
        double ss = 0.0;
        for (double c : costs) ss += (c - result.mean) * (c - result.mean);
        result.standard_error = std::sqrt(ss / (double(trials) - 1.0) / trials);
    }
    return result;
}

// Analytic, semi-analytic, and Monte Carlo costs for one configuration.
inline CostReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const ProbeState state = make_probe_state(config);
    CostReport report;
    report.analytic_cost = analytic_cost(state, config.cost);
    report.semi_analytic_cost = semi_analytic_cost(state, config.cost, config.m_grid);
    const MonteCarloResult mc = monte_carlo_cost(config);
    report.monte_carlo_cost = mc.mean;
    report.monte_carlo_stderr = mc.standard_error;
    report.oracle_calls_per_trial = config.n_oracles;
    if (mc.standard_error.has_value())
        report.monte_carlo_within_4_stderr =
            std::abs(mc.mean - report.analytic_cost) <= 4.0 * *mc.standard_error;
    return report;
}

// ------------------------------- property studies -----------------------------

// Semi-analytic cost at each readout size; the spread across sizes measures
// how far the scheme is from M-independence (zero for M >= N+1).
inline double m_invariance_check(const ProbeState& state, const CostSpec& cost,
                                 const std::vector<int>& m_values) {
    if (m_values.empty()) throw std::invalid_argument("m_invariance_check: no m values");
    const int n = state.n_copies();
    for (int m : m_values)
        if (m < n + 1) throw std::invalid_argument("m_invariance_check: every m must be >= n_copies + 1");
    std::vector<double> vals;
    vals.reserve(m_values.size());
    for (int m : m_values) vals.push_back(semi_analytic_cost(state, cost, m));
    double lo = vals[0], hi = vals[0];
    for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

// One analytic-cost row per (N, state kind).
inline std::vector<SweepRow> scaling_sweep(const CostSpec& cost,
                                           const std::vector<StateSource>& sources,
                                           const std::vector<int>& n_values) {
    if (n_values.empty()) throw std::invalid_argument("scaling_sweep: empty n range");
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i)
        if (n_values[i] >= n_values[i + 1])
            throw std::invalid_argument("scaling_sweep: n values must be ascending");
    if (n_values.front() < 0) throw std::invalid_argument("scaling_sweep: n values must be >= 0");
    for (StateSource s : sources)
        if (s == StateSource::Imported)
            throw std::invalid_argument("scaling_sweep: imported states have a fixed N");

    std::vector<SweepRow> rows;
    rows.reserve(sources.size() * n_values.size());
    for (int n : n_values) {
        const FourierCoefficients fc = fourier_coefficients(cost, n);
        const ToeplitzCostMatrix t = toeplitz_from_coeffs(fc, n);
        for (StateSource s : sources) {
            SweepRow row;
            row.n_oracles = n;
            row.source = s;
            switch (s) {
                case StateSource::Sine:
                    row.analytic_cost = expected_cost(sine_state(n), t);
                    break;
                case StateSource::Uniform:
                    row.analytic_cost = expected_cost(uniform_state(n), t);
                    break;
                case StateSource::Optimal:
                    row.analytic_cost = optimize_state(t).cost;
                    break;
                case StateSource::Imported:
                    break;  // rejected above
            }
            rows.push_back(row);
        }
    }
    return rows;
}

// Least-squares slope of ln(cost) against ln(n); the scaling exponent.
inline double log_log_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("log_log_slope: need at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [n, cost] : points) {
        if (!(n > 0.0) || !(cost > 0.0))
            throw std::invalid_argument("log_log_slope: points must be positive");
        const double x = std::log(n);
        const double y = std::log(cost);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(points.size());
    const double denom = count * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw std::invalid_argument("log_log_slope: degenerate abscissae");
    return (count * sxy - sx * sy) / denom;
}

}  // namespace phaseopt
