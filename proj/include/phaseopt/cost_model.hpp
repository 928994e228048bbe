#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "phaseopt/common.hpp"
#include "phaseopt/quadrature.hpp"
#include "phaseopt/rng.hpp"
#include "phaseopt/states.hpp"

namespace phaseopt {

// ----------------------------------- types -----------------------------------

enum class CostKind { Fidelity, Window, Custom };
enum class Symmetry { Even, General };

// 2pi-periodic real cost function C(phi) assigning a penalty to the estimation
// error phi = true phase - announced estimate.
struct CostSpec {
    CostKind kind = CostKind::Fidelity;
    double delta = 0.0;                       // Window half-width, in (0, pi)
    std::function<double(double)> fn;         // Custom callable
    int sample_budget = 0;                    // Custom: declared evaluation grid size
    Symmetry symmetry = Symmetry::Even;

    static CostSpec fidelity() { return CostSpec{}; }

    static CostSpec window(double delta) {
        if (!(delta > 0.0 && delta < pi))
            throw std::invalid_argument("CostSpec: window delta must lie in (0, pi)");
        CostSpec s;
        s.kind = CostKind::Window;
        s.delta = delta;
        return s;
    }

    static CostSpec custom(std::function<double(double)> fn, int sample_budget,
                           Symmetry symmetry = Symmetry::General) {
        if (!fn) throw std::invalid_argument("CostSpec: custom callable must be set");
        if (sample_budget < 1)
            throw std::invalid_argument("CostSpec: sample budget must be positive");
        CostSpec s;
        s.kind = CostKind::Custom;
        s.fn = std::move(fn);
        s.sample_budget = sample_budget;
        s.symmetry = symmetry;
        return s;
    }

    // C(phi); the boundary of the window, circle distance exactly delta, costs 1
    double evaluate(double phi) const {
        switch (kind) {
            case CostKind::Fidelity:
                return 0.5 * (1.0 - std::cos(phi));  // sin^2(phi/2)
            case CostKind::Window:
                return circle_distance(phi) >= delta ? 1.0 : 0.0;
            case CostKind::Custom: {
                const double v = fn(phi);
                if (!std::isfinite(v))
                    throw std::invalid_argument("CostSpec: custom cost returned non-finite value");
                return v;
            }
        }
        throw std::invalid_argument("CostSpec: unknown kind");
    }

    bool is_even() const { return kind != CostKind::Custom || symmetry == Symmetry::Even; }

    // Locations in [0, 2pi) where C jumps; empty for smooth costs.
    std::vector<double> breakpoints() const {
        if (kind == CostKind::Window) return {delta, two_pi - delta};
        return {};
    }
};

enum class CoeffSource { Analytic, Quadrature };

// Fourier data c_k = (1/2pi) integral C(phi) e^{-ik phi} dphi for k = 0..max_lag.
// Negative lags follow from realness of C: c_{-k} = conj(c_k).
struct FourierCoefficients {
    int max_lag = 0;
    std::vector<cd> coeffs;  // c_0..c_max_lag
    CoeffSource source = CoeffSource::Analytic;
    int quadrature_points = 0;  // grid size when source == Quadrature
};

// Hermitian Toeplitz matrix T[j][k] = c_{j-k}, stored by its first column.
// alpha^dagger T alpha is the expected cost of the probe state alpha.
struct ToeplitzCostMatrix {
    int dim = 0;
    std::vector<cd> first_column;  // (c_0, c_1, ..., c_{dim-1})
};

// --------------------------------- operations --------------------------------

inline FourierCoefficients fourier_coefficients(const CostSpec& cost, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("fourier_coefficients: max_lag must be >= 0");
    FourierCoefficients out;
    out.max_lag = max_lag;
    out.coeffs.assign(max_lag + 1, cd(0.0, 0.0));

    switch (cost.kind) {
        case CostKind::Fidelity:
            // sin^2(phi/2) = 1/2 - (e^{i phi} + e^{-i phi})/4
            out.coeffs[0] = 0.5;
            if (max_lag >= 1) out.coeffs[1] = -0.25;
            out.source = CoeffSource::Analytic;
            return out;
        case CostKind::Window:
            // indicator of circle distance >= delta:
            // c_0 = 1 - delta/pi, c_k = -sin(k delta)/(k pi)
            if (!(cost.delta > 0.0 && cost.delta < pi))
                throw std::invalid_argument("fourier_coefficients: window delta must lie in (0, pi)");
            out.coeffs[0] = 1.0 - cost.delta / pi;
            for (int k = 1; k <= max_lag; ++k)
                out.coeffs[k] = -std::sin(k * cost.delta) / (k * pi);
            out.source = CoeffSource::Analytic;
            return out;
        case CostKind::Custom: {
            if (cost.sample_budget < 8 * (max_lag + 1))
                throw std::invalid_argument(
                    "fourier_coefficients: sample budget must be >= 8 * (max_lag + 1)");
            const int n = std::max(cost.sample_budget, 8 * (max_lag + 1));
            std::vector<double> samples(n);
            for (int t = 0; t < n; ++t) samples[t] = cost.evaluate(two_pi * t / n);
            for (int k = 0; k <= max_lag; ++k) {
                cd acc = 0.0;
                for (int t = 0; t < n; ++t) acc += samples[t] * std::polar(1.0, -k * two_pi * t / n);
                out.coeffs[k] = acc / static_cast<double>(n);
            }
            out.source = CoeffSource::Quadrature;
            out.quadrature_points = n;
            return out;
        }
    }
    throw std::invalid_argument("fourier_coefficients: unknown cost kind");
}

inline ToeplitzCostMatrix toeplitz_from_coeffs(const FourierCoefficients& coeffs, int n_oracles) {
    if (n_oracles < 0) throw std::invalid_argument("toeplitz_from_coeffs: n_oracles must be >= 0");
    if (coeffs.max_lag < n_oracles)
        throw std::invalid_argument("toeplitz_from_coeffs: need max_lag >= n_oracles");
    ToeplitzCostMatrix m;
    m.dim = n_oracles + 1;
    m.first_column.assign(coeffs.coeffs.begin(), coeffs.coeffs.begin() + m.dim);
    return m;
}

namespace detail {

// T alpha for the Hermitian Toeplitz matrix given by its first column.
inline std::vector<cd> toeplitz_matvec(const std::vector<cd>& col, const std::vector<cd>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cd> y(n, cd(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
        cd acc = col[0] * x[j];
        for (int k = 0; k < j; ++k) acc += col[j - k] * x[k];          // c_{j-k}, j > k
        for (int k = j + 1; k < n; ++k) acc += std::conj(col[k - j]) * x[k];  // c_{j-k} = conj(c_{k-j})
        y[j] = acc;
    }
    return y;
}

inline Eigen::MatrixXcd dense_toeplitz(const ToeplitzCostMatrix& matrix) {
    Eigen::MatrixXcd t(matrix.dim, matrix.dim);
    for (int j = 0; j < matrix.dim; ++j)
        for (int k = 0; k < matrix.dim; ++k)
            t(j, k) = j >= k ? matrix.first_column[j - k] : std::conj(matrix.first_column[k - j]);
    return t;
}

// Rotates the global phase so the largest-magnitude entry is real positive;
// ties resolve to the lowest index.
inline void fix_global_phase(std::vector<cd>& a) {
    std::size_t best = 0;
    double best_mag = std::abs(a[0]);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const double mag = std::abs(a[i]);
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag == 0.0) return;
    const cd rot = std::conj(a[best]) / best_mag;
    for (auto& x : a) x *= rot;
}

}  // namespace detail

// alpha^dagger T alpha. Folds the Toeplitz structure into lag autocorrelations,
// so the Hermitian cancellation is exact and the result real by construction
// up to Im(c_0).
inline double expected_cost(const ProbeState& state, const ToeplitzCostMatrix& matrix) {
    state.validate();
    const int n = static_cast<int>(state.amplitudes.size());
    if (n != matrix.dim)
        throw std::invalid_argument("expected_cost: state dimension must equal matrix dim");
    const auto& a = state.amplitudes;
    double nrm2 = 0.0;
    for (const cd& x : a) nrm2 += std::norm(x);
    double total = std::real(matrix.first_column[0]) * nrm2;
    for (int l = 1; l < n; ++l) {
        const cd cl = matrix.first_column[l];
        if (cl == cd(0.0, 0.0)) continue;
        cd s = 0.0;  // autocorrelation sum_k conj(a_{k+l}) a_k
        for (int k = 0; k + l < n; ++k) s += std::conj(a[k + l]) * a[k];
        total += 2.0 * std::real(cl * s);
    }
    return total;
}

struct OptimizeOptions {
    int dense_limit = 2048;      // largest dim solved by the dense eigensolver
    double power_tol = 1e-12;    // Rayleigh-quotient residual, relative to matrix scale
    int max_outer = 500;
    std::uint64_t seed = 0x70686173656f7074ULL;  // iterative start vector
};

struct OptimizeResult {
    ProbeState state;
    double cost = 0.0;
};

// Minimal eigenpair of the cost matrix: the optimal probe state and its
// expected cost. Dense Hermitian solve up to options.dense_limit; shifted
// inverse power iteration (conjugate-gradient inner solves) above it.
inline OptimizeResult optimize_state(const ToeplitzCostMatrix& matrix,
                                     const OptimizeOptions& options = {}) {
    if (matrix.dim < 1 || static_cast<int>(matrix.first_column.size()) != matrix.dim)
        throw std::invalid_argument("optimize_state: malformed matrix");
    const int n = matrix.dim;
    std::vector<cd> vec(n);
    double value = 0.0;

    if (n <= options.dense_limit) {
        bool all_real = true;
        for (const cd& c : matrix.first_column)
            if (c.imag() != 0.0) {
                all_real = false;
                break;
            }
        if (all_real) {
            Eigen::MatrixXd t(n, n);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    t(j, k) = matrix.first_column[std::abs(j - k)].real();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
            if (solver.info() != Eigen::Success)
                throw NumericalError("optimize_state: dense eigensolver failed");
            value = solver.eigenvalues()(0);
            for (int j = 0; j < n; ++j) vec[j] = solver.eigenvectors()(j, 0);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(detail::dense_toeplitz(matrix));
            if (solver.info() != Eigen::Success)
                throw NumericalError("optimize_state: dense eigensolver failed");
            value = solver.eigenvalues()(0);
            for (int j = 0; j < n; ++j) vec[j] = solver.eigenvectors()(j, 0);
        }
    } else {
        // scale and spectrum bounds from Gershgorin discs
        double radius = 0.0;
        for (int l = 1; l < n; ++l) radius += std::abs(matrix.first_column[l]);
        radius *= 2.0;
        const double c0 = std::real(matrix.first_column[0]);
        const double scale = std::abs(c0) + radius + 1e-30;

        auto matvec = [&](const std::vector<cd>& x) {
            return detail::toeplitz_matvec(matrix.first_column, x);
        };
        auto dot = [](const std::vector<cd>& x, const std::vector<cd>& y) {
            cd s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
            return s;
        };
        auto norm = [&](const std::vector<cd>& x) { return std::sqrt(std::real(dot(x, x))); };

        // Lanczos pass (full reorthogonalization) seeds the shift and the
        // start vector; clustered extreme eigenvalues make cruder estimates
        // useless as shifts
        rng::Engine eng = rng::make_engine(options.seed);
        const int k_max = std::min(n, 400);
        std::vector<std::vector<cd>> basis;
        basis.reserve(k_max);
        basis.push_back(rng::random_unit_vector(eng, n));
        std::vector<double> diag, subdiag;
        for (int k = 0; k < k_max; ++k) {
            std::vector<cd> w = matvec(basis[k]);
            diag.push_back(std::real(dot(basis[k], w)));
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) {
                    const cd c = dot(b, w);
                    for (int i = 0; i < n; ++i) w[i] -= c * b[i];
                }
            const double b = norm(w);
            if (k + 1 >= k_max || b < 1e-13 * scale) break;
            subdiag.push_back(b);
            for (auto& v : w) v /= b;
            basis.push_back(std::move(w));
        }
        const int k_dim = static_cast<int>(diag.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(
            Eigen::Map<const Eigen::VectorXd>(diag.data(), k_dim),
            Eigen::Map<const Eigen::VectorXd>(subdiag.data(), k_dim - 1),
            Eigen::ComputeEigenvectors);
        if (tri.info() != Eigen::Success)
            throw NumericalError("optimize_state: Lanczos tridiagonal solve failed");
        const double lambda_est = tri.eigenvalues()(0);
        std::vector<cd> x(n, cd(0.0, 0.0));
        for (int j = 0; j < k_dim; ++j) {
            const double y = tri.eigenvectors()(j, 0);
            for (int i = 0; i < n; ++i) x[i] += y * basis[j][i];
        }
        {
            const double nn = norm(x);
            for (auto& v : x) v /= nn;
        }
        std::vector<cd> tx = matvec(x);
        double lambda = std::real(dot(x, tx));
        double resid0 = 0.0;
        for (int i = 0; i < n; ++i) resid0 += std::norm(tx[i] - lambda * x[i]);
        double gap = std::max(std::sqrt(resid0), 1e-10 * scale);
        double shift = lambda_est - gap;

        // conjugate gradient on (T - shift I) b = rhs; reports failure when the
        // operator is not positive definite so the caller can lower the shift
        auto cg_solve = [&](const std::vector<cd>& rhs, std::vector<cd>& sol) -> bool {
            sol.assign(n, cd(0.0, 0.0));
            std::vector<cd> r = rhs;
            std::vector<cd> p = r;
            double rs = std::real(dot(r, r));
            const double stop = std::max(1e-28, 1e-26 * rs);
            for (int it = 0; it < 20 * n + 100; ++it) {
                std::vector<cd> ap = matvec(p);
                for (int i = 0; i < n; ++i) ap[i] -= shift * p[i];
                const double curv = std::real(dot(p, ap));
                if (curv <= 0.0) return false;
                const double alpha = rs / curv;
                for (int i = 0; i < n; ++i) {
                    sol[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
                const double rs_new = std::real(dot(r, r));
                if (rs_new < stop) return true;
                const double beta = rs_new / rs;
                rs = rs_new;
                for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
            }
            return true;  // fall through with the best iterate
        };

        bool converged = false;
        for (int outer = 0; outer < options.max_outer && !converged; ++outer) {
            std::vector<cd> next;
            if (!cg_solve(x, next)) {
                gap *= 10.0;  // shift was not strictly below the spectrum
                shift = lambda - gap;
                continue;
            }
            const double nn = norm(next);
            if (!(nn > 0.0)) throw NumericalError("optimize_state: inverse iteration collapsed");
            for (auto& v : next) v /= nn;
            x.swap(next);
            tx = matvec(x);
            lambda = std::real(dot(x, tx));
            double resid2 = 0.0;
            for (int i = 0; i < n; ++i) resid2 += std::norm(tx[i] - lambda * x[i]);
            const double resid = std::sqrt(resid2);
            if (resid <= options.power_tol * scale) {
                converged = true;
            } else {
                // Rayleigh-quotient shift update, kept a residual below the
                // current estimate; the curvature guard above corrects any
                // overshoot past the minimal eigenvalue
                gap = std::max(resid, 1e-10 * scale);
                shift = lambda - gap;
            }
        }
        if (!converged) throw NumericalError("optimize_state: inverse iteration did not converge");
        vec = x;
        value = lambda;
    }

    detail::fix_global_phase(vec);
    const double nrm = l2_norm(vec);
    for (auto& v : vec) v /= nrm;
    return OptimizeResult{ProbeState(std::move(vec)), value};
}

// Builds a Custom cost from samples on the uniform grid phi_t = 2 pi t / n by
// trigonometric interpolation (DFT coefficients, Nyquist term halved for even
// n). The interpolant passes through every sample and is bandlimited to n/2,
// so downstream coefficient extraction is exact for lags within the budget.
inline CostSpec trig_interpolated_cost(const std::vector<double>& samples,
                                       Symmetry symmetry = Symmetry::General) {
    const int n = static_cast<int>(samples.size());
    if (n < 1) throw std::invalid_argument("trig_interpolated_cost: need at least one sample");
    for (double v : samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("trig_interpolated_cost: samples must be finite");

    const int half = n / 2;
    auto cos_amp = std::make_shared<std::vector<double>>(half + 1, 0.0);
    auto sin_amp = std::make_shared<std::vector<double>>(half + 1, 0.0);
    for (int k = 0; k <= half; ++k) {
        cd acc = 0.0;
        for (int t = 0; t < n; ++t) acc += samples[t] * std::polar(1.0, -two_pi * double(k) * t / n);
        acc /= static_cast<double>(n);
        double scale = (k == 0 || (n % 2 == 0 && k == half)) ? 1.0 : 2.0;
        (*cos_amp)[k] = scale * acc.real();
        (*sin_amp)[k] = -scale * acc.imag();
    }
    (*sin_amp)[0] = 0.0;
    if (n % 2 == 0) (*sin_amp)[half] = 0.0;

    auto fn = [cos_amp, sin_amp](double phi) {
        const double c1 = std::cos(phi), s1 = std::sin(phi);
        double ck = 1.0, sk = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < cos_amp->size(); ++k) {
            acc += (*cos_amp)[k] * ck + (*sin_amp)[k] * sk;
            const double cn = ck * c1 - sk * s1;  // angle addition
            sk = sk * c1 + ck * s1;
            ck = cn;
        }
        return acc;
    };
    return CostSpec::custom(std::move(fn), n, symmetry);
}

// Advisory classifier: do the truncated Fourier coefficients satisfy the
// conventional signature c_k <= 0 (and real) for all k >= 1? Truncation lag is
// 64, reduced for Custom costs to what their sample budget supports. Never
// gates any computation.
inline bool holevo_check(const CostSpec& cost) {
    int lag = 64;
    if (cost.kind == CostKind::Custom) lag = std::min(lag, cost.sample_budget / 8 - 1);
    if (lag < 1) return true;
    const FourierCoefficients fc = fourier_coefficients(cost, lag);
    for (int k = 1; k <= lag; ++k) {
        const cd c = fc.coeffs[k];
        if (c.real() > 1e-10 || std::abs(c.imag()) > 1e-10) return false;
    }
    return true;
}

}  // namespace phaseopt
