#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "phaseopt/common.hpp"

namespace phaseopt::quad {

// ------------------------------ periodic trapezoid ---------------------------

// (1/2pi) * integral over one period, by the n-point periodic trapezoid rule
// (equal weights on a uniform grid). Spectrally accurate for smooth periodic
// integrands; exact for trigonometric polynomials of degree < n.
template <class F>
double periodic_mean(F&& f, int n) {
    double s = 0.0;
    for (int t = 0; t < n; ++t) s += f(two_pi * t / n);
    return s / n;
}

template <class F>
cd periodic_mean_complex(F&& f, int n) {
    cd s = 0.0;
    for (int t = 0; t < n; ++t) s += f(two_pi * t / n);
    return s / static_cast<double>(n);
}

// Doubling variant: starts at n0 points and doubles until two successive
// resolutions agree to agree_tol, capped at n_max.
template <class F>
double periodic_mean_adaptive(F&& f, int n0 = 4096, double agree_tol = 1e-8,
                              int n_max = 1 << 16) {
    int n = n0;
    double prev = periodic_mean(f, n);
    while (n < n_max) {
        n *= 2;
        const double cur = periodic_mean(f, n);
        if (std::abs(cur - prev) <= agree_tol) return cur;
        prev = cur;
    }
    return prev;
}

// ------------------------------ Gauss-Legendre -------------------------------

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes by Newton iteration on P_n with the asymptotic cosine initial guess.
inline GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P_n'(x) by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

template <class F>
double gauss_segment(F&& f, double a, double b, const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * s;
}

// ------------------------- piecewise-smooth circle mean ----------------------

// (1/2pi) * integral over [0, 2pi) of a piecewise-smooth integrand whose
// discontinuities lie at the given breakpoints. Each smooth segment is split
// into panels sized by the integrand's bandwidth (highest trig frequency) and
// integrated by Gauss-Legendre; a higher-order pass confirms convergence.
template <class F>
double piecewise_circle_mean(F&& f, std::vector<double> breakpoints,
                             int bandwidth, double agree_tol = 1e-10) {
    if (breakpoints.empty()) breakpoints.push_back(0.0);
    for (double& b : breakpoints) b = wrap_phase(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                  [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                      breakpoints.end());
    breakpoints.push_back(breakpoints.front() + two_pi);

    const double freq = std::max(1, bandwidth);
    const auto integrate = [&](int order) {
        const GaussRule rule = gauss_legendre(order);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            const double a = breakpoints[i];
            const double b = breakpoints[i + 1];
            if (b - a < 1e-14) continue;
            // keep (panel length * frequency) small so the rule is exact
            const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * freq / 12.0)));
            const double h = (b - a) / panels;
            for (int p = 0; p < panels; ++p)
                total += gauss_segment(f, a + p * h, a + (p + 1) * h, rule);
        }
        return total / two_pi;
    };

    const double coarse = integrate(24);
    const double fine = integrate(36);
    if (std::abs(fine - coarse) > agree_tol)
        throw NumericalError("piecewise quadrature failed to converge");
    return fine;
}

}  // namespace phaseopt::quad
