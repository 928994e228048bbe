#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "phaseopt/common.hpp"
#include "phaseopt/rng.hpp"
#include "phaseopt/states.hpp"

namespace phaseopt {

// ----------------------------------- types -----------------------------------

struct StateVector {
    int n_qubits = 0;
    std::vector<cd> amplitudes;  // length 2^n_qubits, wire b = bit b of the index

    static StateVector zero(int n_qubits) {
        if (n_qubits < 1 || n_qubits > 12)
            throw std::invalid_argument("StateVector: n_qubits must lie in [1, 12]");
        StateVector s;
        s.n_qubits = n_qubits;
        s.amplitudes.assign(std::size_t(1) << n_qubits, cd(0.0, 0.0));
        s.amplitudes[0] = 1.0;
        return s;
    }

    std::size_t dim() const { return amplitudes.size(); }

    void validate() const {
        if (amplitudes.size() != (std::size_t(1) << n_qubits))
            throw std::invalid_argument("StateVector: amplitude count must be 2^n_qubits");
        if (std::abs(l2_norm(amplitudes) - 1.0) > 1e-10)
            throw std::invalid_argument("StateVector: state must have unit norm");
    }
};

struct CircuitOp {
    enum class Type { Unitary, Oracle };
    Type type = Type::Oracle;
    std::vector<int> wires;    // Unitary: 1 to 3 distinct wires
    Eigen::MatrixXcd matrix;   // Unitary: square, side 2^wires.size()
    int wire = 0;              // Oracle target

    static CircuitOp unitary(std::vector<int> wires, Eigen::MatrixXcd matrix) {
        CircuitOp op;
        op.type = Type::Unitary;
        op.wires = std::move(wires);
        op.matrix = std::move(matrix);
        return op;
    }

    static CircuitOp oracle(int wire) {
        CircuitOp op;
        op.type = Type::Oracle;
        op.wire = wire;
        return op;
    }
};

// Interleaved unitaries and single-wire phase-oracle calls on n_qubits wires.
struct GeneralCircuitSpec {
    int n_qubits = 0;
    std::vector<CircuitOp> ops;

    int n_oracles() const {
        int n = 0;
        for (const auto& op : ops)
            if (op.type == CircuitOp::Type::Oracle) ++n;
        return n;
    }

    void validate() const {
        if (n_qubits < 1 || n_qubits > 12)
            throw std::invalid_argument("GeneralCircuitSpec: n_qubits must lie in [1, 12]");
        for (const auto& op : ops) {
            if (op.type == CircuitOp::Type::Oracle) {
                if (op.wire < 0 || op.wire >= n_qubits)
                    throw std::invalid_argument("GeneralCircuitSpec: oracle wire out of range");
                continue;
            }
            const int k = static_cast<int>(op.wires.size());
            if (k < 1 || k > 3)
                throw std::invalid_argument("GeneralCircuitSpec: unitaries act on 1 to 3 wires");
            for (int i = 0; i < k; ++i) {
                if (op.wires[i] < 0 || op.wires[i] >= n_qubits)
                    throw std::invalid_argument("GeneralCircuitSpec: unitary wire out of range");
                for (int j = i + 1; j < k; ++j)
                    if (op.wires[i] == op.wires[j])
                        throw std::invalid_argument("GeneralCircuitSpec: unitary wires must be distinct");
            }
            const int d = 1 << k;
            if (op.matrix.rows() != d || op.matrix.cols() != d)
                throw std::invalid_argument("GeneralCircuitSpec: matrix side must be 2^wires");
            const Eigen::MatrixXcd gram = op.matrix.adjoint() * op.matrix;
            const double dev = (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
            if (dev > 1e-10)
                throw std::invalid_argument("GeneralCircuitSpec: matrix is not unitary");
        }
    }
};

// Coefficients a_0..a_degree of one output amplitude as a polynomial in
// e^{i phi}: amplitude(phi) = sum_j a_j e^{i j phi}.
struct AmplitudePolynomial {
    int degree = 0;
    std::vector<cd> coeffs;

    cd evaluate(double phi) const {
        const cd z = std::polar(1.0, phi);
        cd acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    }
};

// --------------------------------- gate engine --------------------------------

// Multiplies every amplitude whose wire bit is set by e^{i phi}; one oracle call.
inline void apply_oracle(StateVector& state, int wire, double phi) {
    if (wire < 0 || wire >= state.n_qubits)
        throw std::invalid_argument("apply_oracle: wire out of range");
    const cd z = std::polar(1.0, wrap_phase(phi));
    const std::size_t mask = std::size_t(1) << wire;
    for (std::size_t idx = 0; idx < state.dim(); ++idx)
        if (idx & mask) state.amplitudes[idx] *= z;
}

// Applies a 2^k unitary on k named wires (gather, multiply, scatter per
// subspace slice). Not limited to 3 wires; circuit validation imposes that cap.
inline void apply_unitary(StateVector& state, const std::vector<int>& wires,
                          const Eigen::MatrixXcd& matrix) {
    const int k = static_cast<int>(wires.size());
    if (k < 1) throw std::invalid_argument("apply_unitary: need at least one wire");
    std::size_t wire_mask = 0;
    for (int w : wires) {
        if (w < 0 || w >= state.n_qubits)
            throw std::invalid_argument("apply_unitary: wire out of range");
        const std::size_t bit = std::size_t(1) << w;
        if (wire_mask & bit) throw std::invalid_argument("apply_unitary: wires must be distinct");
        wire_mask |= bit;
    }
    const int d = 1 << k;
    if (matrix.rows() != d || matrix.cols() != d)
        throw std::invalid_argument("apply_unitary: matrix side must be 2^wires");

    std::vector<std::size_t> offsets(d);
    for (int x = 0; x < d; ++x) {
        std::size_t off = 0;
        for (int b = 0; b < k; ++b)
            if (x & (1 << b)) off |= std::size_t(1) << wires[b];
        offsets[x] = off;
    }
    Eigen::VectorXcd slice(d);
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if (base & wire_mask) continue;
        for (int x = 0; x < d; ++x) slice(x) = state.amplitudes[base | offsets[x]];
        const Eigen::VectorXcd out = matrix * slice;
        for (int x = 0; x < d; ++x) state.amplitudes[base | offsets[x]] = out(x);
    }
}

// |j> -> e^{i j phi} for j encoded in binary on the given wires (wire i = bit i),
// realized as repeated single-wire oracle calls: bit b's wire is hit 2^b times.
// Uses the fewest bits covering j <= n_oracles; returns the oracle-call count,
// 2^ceil(log2(N+1)) - 1, which equals N exactly when N+1 is a power of two.
inline int apply_power_oracle(StateVector& state, const std::vector<int>& register_wires,
                              double phi, int n_oracles) {
    if (n_oracles < 0) throw std::invalid_argument("apply_power_oracle: n_oracles must be >= 0");
    int bits = 0;
    while ((1 << bits) < n_oracles + 1) ++bits;
    if (static_cast<int>(register_wires.size()) < bits)
        throw std::invalid_argument("apply_power_oracle: register too small for n_oracles");
    for (int w : register_wires)
        if (w < 0 || w >= state.n_qubits)
            throw std::invalid_argument("apply_power_oracle: wire out of range");

    // basis states encoding j > n_oracles must be unoccupied
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        long j = 0;
        for (std::size_t b = 0; b < register_wires.size(); ++b)
            if (idx & (std::size_t(1) << register_wires[b])) j |= long(1) << b;
        if (j > n_oracles && std::abs(state.amplitudes[idx]) > 1e-12)
            throw std::invalid_argument("apply_power_oracle: amplitude on j > n_oracles");
    }

    int calls = 0;
    for (int b = 0; b < bits; ++b)
        for (int rep = 0; rep < (1 << b); ++rep) {
            apply_oracle(state, register_wires[b], phi);
            ++calls;
        }
    return calls;
}

// Size-M inverse discrete Fourier transform on a dimension-M register:
// out[y] = (1/sqrt(M)) sum_j e^{-2 pi i j y / M} in[j].
inline void inverse_fourier(std::vector<cd>& reg) {
    const int m = static_cast<int>(reg.size());
    if (m < 1) throw std::invalid_argument("inverse_fourier: empty register");
    std::vector<cd> out(m, cd(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(double(m));
    for (int y = 0; y < m; ++y) {
        cd acc = 0.0;
        for (int j = 0; j < m; ++j) acc += std::polar(1.0, -two_pi * double(j) * y / m) * reg[j];
        out[y] = scale * acc;
    }
    reg.swap(out);
}

inline Eigen::MatrixXcd inverse_fourier_matrix(int m) {
    Eigen::MatrixXcd f(m, m);
    const double scale = 1.0 / std::sqrt(double(m));
    for (int y = 0; y < m; ++y)
        for (int j = 0; j < m; ++j) f(y, j) = scale * std::polar(1.0, -two_pi * double(j) * y / m);
    return f;
}

// Applies the size-2^w inverse transform to the register formed by the given
// wires, for every setting of the remaining wires.
inline void inverse_fourier(StateVector& state, const std::vector<int>& wires) {
    apply_unitary(state, wires, inverse_fourier_matrix(1 << wires.size()));
}

// ------------------------------- fixed-form run -------------------------------

struct Procedure1Result {
    int outcome = 0;
    int oracle_calls = 0;
    std::vector<cd> register_state;  // dimension M, after the inverse transform
    OutcomeDistribution distribution;
};

// Full fixed-form pipeline on a dimension-M register: load the probe
// amplitudes, apply the phase oracle j times to basis state |j> (one call per
// staircase step t, multiplying every j >= t), apply the size-M inverse
// transform, then sample the readout. Exactly N oracle calls; deterministic
// for a given seed.
inline Procedure1Result run_procedure1(const ProbeState& state, int m_grid, double phi,
                                       std::uint64_t seed) {
    state.validate();
    const int n = state.n_copies();
    if (m_grid < n + 1) throw std::invalid_argument("run_procedure1: need m_grid >= n_copies + 1");
    const double ph = wrap_phase(phi);

    std::vector<cd> reg(m_grid, cd(0.0, 0.0));
    for (int j = 0; j <= n; ++j) reg[j] = state.amplitudes[j];

    // staircase form of U_phi: step t advances the phase of every j >= t,
    // so basis state |j> accumulates e^{i j phi} after N steps
    const cd z = std::polar(1.0, ph);
    int calls = 0;
    for (int t = 1; t <= n; ++t) {
        for (int j = t; j < m_grid; ++j) reg[j] *= z;
        ++calls;
    }

    inverse_fourier(reg);

    Procedure1Result result;
    result.oracle_calls = calls;
    result.register_state = reg;
    result.distribution.m_grid = m_grid;
    result.distribution.phase = ph;
    result.distribution.probs.resize(m_grid);
    for (int y = 0; y < m_grid; ++y)
        result.distribution.probs[y] = std::max(0.0, std::norm(reg[y]));
    rng::Engine eng = rng::make_engine(seed);
    result.outcome = sample_outcome(result.distribution, eng);
    return result;
}

// ------------------------------- general circuits -----------------------------

struct CircuitRunResult {
    StateVector state;
    int oracle_calls = 0;
};

// Applies the ops in order to |0...0>, oracles at the given phase.
inline CircuitRunResult run_general_circuit(const GeneralCircuitSpec& spec, double phi) {
    spec.validate();
    CircuitRunResult result{StateVector::zero(spec.n_qubits), 0};
    const double ph = wrap_phase(phi);
    for (const auto& op : spec.ops) {
        if (op.type == CircuitOp::Type::Oracle) {
            apply_oracle(result.state, op.wire, ph);
            ++result.oracle_calls;
        } else {
            apply_unitary(result.state, op.wires, op.matrix);
        }
    }
    return result;
}

// Marginal probabilities over the kept wires: probs[y] = sum over discarded
// settings of |amplitude|^2, with kept_wires[i] supplying bit i of y.
inline std::vector<double> trace_out_ancilla(const StateVector& state,
                                             const std::vector<int>& kept_wires) {
    std::size_t seen = 0;
    for (int w : kept_wires) {
        if (w < 0 || w >= state.n_qubits)
            throw std::invalid_argument("trace_out_ancilla: wire out of range");
        const std::size_t bit = std::size_t(1) << w;
        if (seen & bit) throw std::invalid_argument("trace_out_ancilla: wires must be distinct");
        seen |= bit;
    }
    std::vector<double> probs(std::size_t(1) << kept_wires.size(), 0.0);
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        std::size_t y = 0;
        for (std::size_t i = 0; i < kept_wires.size(); ++i)
            if (idx & (std::size_t(1) << kept_wires[i])) y |= std::size_t(1) << i;
        probs[y] += std::norm(state.amplitudes[idx]);
    }
    return probs;
}

// ----------------------------- polynomial fitting -----------------------------

struct FitOptions {
    int holdout = 64;          // held-out validation phases
    double tol = 1e-9;         // max allowed reconstruction residual
    std::uint64_t seed = 0x866f0fe5c9a1d3b2ULL;
    bool throw_on_violation = true;
    std::optional<int> degree_override;  // fit a lower degree (diagnostics only)
};

struct PolynomialFit {
    int degree = 0;
    std::vector<AmplitudePolynomial> polys;  // one per basis outcome
    double max_residual = 0.0;
    bool within_tolerance = true;
};

// Interpolates every output amplitude as a polynomial of degree N (the oracle
// count) in e^{i phi} from runs at the N+1 roots of unity, then validates the
// reconstruction at held-out random phases. A residual above tolerance means
// the amplitudes are not degree-N polynomials, which no valid circuit can
// produce; it throws unless throw_on_violation is cleared.
inline PolynomialFit fit_amplitude_polynomials(const GeneralCircuitSpec& spec,
                                               const FitOptions& options = {}) {
    spec.validate();
    const int degree = options.degree_override.value_or(spec.n_oracles());
    if (degree < 0) throw std::invalid_argument("fit_amplitude_polynomials: negative degree");
    const int points = degree + 1;
    const std::size_t dim = std::size_t(1) << spec.n_qubits;

    std::vector<std::vector<cd>> runs(points);
    for (int r = 0; r < points; ++r)
        runs[r] = run_general_circuit(spec, two_pi * r / points).state.amplitudes;

    PolynomialFit fit;
    fit.degree = degree;
    fit.polys.assign(dim, AmplitudePolynomial{degree, std::vector<cd>(points, cd(0.0, 0.0))});
    // inverse DFT over the evaluation grid recovers the coefficients
    for (std::size_t i = 0; i < dim; ++i)
        for (int j = 0; j < points; ++j) {
            cd acc = 0.0;
            for (int r = 0; r < points; ++r)
                acc += runs[r][i] * std::polar(1.0, -two_pi * double(j) * r / points);
            fit.polys[i].coeffs[j] = acc / static_cast<double>(points);
        }

    rng::Engine eng = rng::make_engine(options.seed);
    for (int h = 0; h < options.holdout; ++h) {
        const double phi = rng::uniform_phase(eng);
        const std::vector<cd> actual = run_general_circuit(spec, phi).state.amplitudes;
        for (std::size_t i = 0; i < dim; ++i) {
            const double resid = std::abs(fit.polys[i].evaluate(phi) - actual[i]);
            if (resid > fit.max_residual) fit.max_residual = resid;
        }
    }
    if (fit.max_residual > options.tol) {
        fit.within_tolerance = false;
        if (options.throw_on_violation) throw PolynomialClaimViolation(fit.max_residual);
    }
    return fit;
}

// ------------------------------ circuit builders ------------------------------

// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
// R-diagonal phases absorbed into Q.
inline Eigen::MatrixXcd random_unitary(rng::Engine& eng, int dim) {
    Eigen::MatrixXcd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = rng::complex_gaussian(eng);
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        const cd d = r(c, c);
        q.col(c) *= std::abs(d) > 0.0 ? d / std::abs(d) : cd(1.0, 0.0);
    }
    return q;
}

// Seeded random interleaving of 1-to-3-wire Haar unitaries and oracle calls.
inline GeneralCircuitSpec random_circuit(int n_qubits, int n_unitaries, int n_oracles,
                                         std::uint64_t seed) {
    if (n_qubits < 1 || n_qubits > 12)
        throw std::invalid_argument("random_circuit: n_qubits must lie in [1, 12]");
    if (n_unitaries < 0 || n_oracles < 0)
        throw std::invalid_argument("random_circuit: op counts must be >= 0");
    rng::Engine eng = rng::make_engine(seed);

    std::vector<int> kinds(n_unitaries, 0);
    kinds.insert(kinds.end(), n_oracles, 1);
    for (std::size_t i = kinds.size(); i > 1; --i)
        std::swap(kinds[i - 1], kinds[eng() % i]);  // Fisher-Yates

    GeneralCircuitSpec spec;
    spec.n_qubits = n_qubits;
    std::vector<int> all_wires(n_qubits);
    for (int w = 0; w < n_qubits; ++w) all_wires[w] = w;
    for (int kind : kinds) {
        if (kind == 1) {
            spec.ops.push_back(CircuitOp::oracle(static_cast<int>(eng() % n_qubits)));
            continue;
        }
        const int k = 1 + static_cast<int>(eng() % std::min(3, n_qubits));
        for (int i = 0; i < k; ++i)
            std::swap(all_wires[i], all_wires[i + eng() % (n_qubits - i)]);
        spec.ops.push_back(CircuitOp::unitary(
            std::vector<int>(all_wires.begin(), all_wires.begin() + k), random_unitary(eng, 1 << k)));
    }
    return spec;
}

// The fixed-form pipeline as a general circuit on n_register_qubits wires:
// a probe-loading unitary, the binary-weighted oracle schedule, and the
// size-2^w inverse transform as one register-wide matrix op. Register width
// is capped at 3 wires so every op stays within the circuit-op wire limit.
inline GeneralCircuitSpec procedure1_as_general_spec(const ProbeState& state,
                                                     int n_register_qubits) {
    state.validate();
    if (n_register_qubits < 1 || n_register_qubits > 3)
        throw std::invalid_argument("procedure1_as_general_spec: register must use 1 to 3 wires");
    const int m = 1 << n_register_qubits;
    const int n = state.n_copies();
    if (m < n + 1)
        throw std::invalid_argument("procedure1_as_general_spec: register too small for the probe");

    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(m);
    for (int j = 0; j <= n; ++j) target(j) = state.amplitudes[j];

    // unitary completion of the target first column: QR of [target | e_js],
    // then a column-phase fix so column 0 equals the target exactly
    Eigen::MatrixXcd seed_cols = Eigen::MatrixXcd::Identity(m, m);
    int drop = 0;
    for (int j = 1; j < m; ++j)
        if (std::abs(target(j)) > std::abs(target(drop))) drop = j;
    seed_cols.col(drop) = target;
    if (drop != 0) seed_cols.col(drop).swap(seed_cols.col(0));
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(seed_cols);
    Eigen::MatrixXcd prep = qr.householderQ();
    const cd lead = prep.col(0).dot(target);  // conj(col 0) . target, a unit phase
    prep.col(0) *= lead / std::abs(lead);

    GeneralCircuitSpec spec;
    spec.n_qubits = n_register_qubits;
    std::vector<int> wires(n_register_qubits);
    for (int w = 0; w < n_register_qubits; ++w) wires[w] = w;
    spec.ops.push_back(CircuitOp::unitary(wires, prep));
    for (int b = 0; b < n_register_qubits; ++b)
        for (int rep = 0; rep < (1 << b); ++rep) spec.ops.push_back(CircuitOp::oracle(b));
    spec.ops.push_back(CircuitOp::unitary(wires, inverse_fourier_matrix(m)));
    return spec;
}

}  // namespace phaseopt
