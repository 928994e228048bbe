#pragma once

#include <vector>

#include "phaseopt/common.hpp"
#include "phaseopt/rng.hpp"

namespace phaseopt {

// ----------------------------------- types -----------------------------------

// Probe state over the oracle-exponent basis: amplitudes alpha_0..alpha_N where
// basis index j means the oracle phase is applied j times. Dimension N+1 for a
// budget of N oracle calls.
struct ProbeState {
    std::vector<cd> amplitudes;

    ProbeState() = default;
    explicit ProbeState(std::vector<cd> a) : amplitudes(std::move(a)) { validate(); }

    // number of oracle calls the state is sized for
    int n_copies() const { return static_cast<int>(amplitudes.size()) - 1; }

    void validate() const {
        if (amplitudes.empty())
            throw std::invalid_argument("ProbeState: amplitudes must be nonempty");
        const double norm = l2_norm(amplitudes);
        if (std::abs(norm - 1.0) > 1e-10)
            throw std::invalid_argument("ProbeState: amplitudes must have unit norm");
    }
};

// Measurement statistics of the size-M readout register for one true phase.
struct OutcomeDistribution {
    int m_grid = 0;
    std::vector<double> probs;  // indexed by outcome y in [0, m_grid)
    double phase = 0.0;
};

// --------------------------------- operations --------------------------------

// sum_j alpha_j e^{i j theta}, evaluated by Horner's rule in e^{i theta}.
inline cd phase_response(const std::vector<cd>& amplitudes, double theta) {
    const cd z = std::polar(1.0, theta);
    cd acc = 0.0;
    for (auto it = amplitudes.rbegin(); it != amplitudes.rend(); ++it) acc = acc * z + *it;
    return acc;
}

// Minimizer of the expected sin^2((phi - estimate)/2) cost: a discrete sine
// half-arch, alpha_j = sqrt(2/(N+2)) sin((j+1) pi / (N+2)).
inline ProbeState sine_state(int n_copies) {
    if (n_copies < 0) throw std::invalid_argument("sine_state: n_copies must be >= 0");
    const int dim = n_copies + 1;
    std::vector<cd> a(dim);
    const double scale = std::sqrt(2.0 / (dim + 1));
    for (int j = 0; j < dim; ++j) a[j] = scale * std::sin((j + 1) * pi / (dim + 1));
    // roundoff in the closed form leaves the norm within ~1e-15 of 1; tidy it
    const double norm = l2_norm(a);
    for (auto& x : a) x /= norm;
    return ProbeState(std::move(a));
}

inline ProbeState uniform_state(int n_copies) {
    if (n_copies < 0) throw std::invalid_argument("uniform_state: n_copies must be >= 0");
    const int dim = n_copies + 1;
    return ProbeState(std::vector<cd>(dim, cd(1.0 / std::sqrt(double(dim)), 0.0)));
}

// Pr(y | phi) = (1/M) |sum_j alpha_j e^{i j (phi - 2 pi y / M)}|^2. Requires
// M >= N+1, the regime where this is exactly normalized; smaller M would alias
// distinct basis states and is rejected. Phases are reduced mod 2 pi on entry.
inline OutcomeDistribution outcome_distribution(const ProbeState& state, int m_grid, double phi) {
    const int n = state.n_copies();
    if (m_grid <= n)
        throw std::invalid_argument("outcome_distribution: need m_grid >= n_copies + 1");
    OutcomeDistribution dist;
    dist.m_grid = m_grid;
    dist.phase = wrap_phase(phi);
    dist.probs.resize(m_grid);
    for (int y = 0; y < m_grid; ++y) {
        const cd g = phase_response(state.amplitudes, dist.phase - two_pi * y / m_grid);
        dist.probs[y] = std::max(0.0, std::norm(g) / m_grid);
    }
    return dist;
}

// Phase estimate announced for readout outcome y.
inline double estimate_from_outcome(int y, int m_grid) {
    if (m_grid <= 0) throw std::invalid_argument("estimate_from_outcome: m_grid must be positive");
    if (y < 0 || y >= m_grid)
        throw std::invalid_argument("estimate_from_outcome: outcome out of range");
    return two_pi * y / m_grid;
}

// Inverse-CDF sample from an outcome distribution.
inline int sample_outcome(const OutcomeDistribution& dist, rng::Engine& eng) {
    const double u = rng::uniform01(eng);
    double acc = 0.0;
    for (int y = 0; y < dist.m_grid; ++y) {
        acc += dist.probs[y];
        if (u < acc) return y;
    }
    return dist.m_grid - 1;
}

}  // namespace phaseopt
