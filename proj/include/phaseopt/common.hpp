#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaseopt {

using cd = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

// Raised when an iterative or dense solve fails to reach its tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a fitted amplitude polynomial fails held-out validation.
// Carries the offending residual; this is a claim falsification, not a
// recoverable condition.
struct PolynomialClaimViolation : std::runtime_error {
    double residual;
    explicit PolynomialClaimViolation(double r)
        : std::runtime_error("amplitude polynomial reconstruction residual " +
                             std::to_string(r) + " exceeds tolerance"),
          residual(r) {}
};

// Reduce an angle to [0, 2pi).
inline double wrap_phase(double phi) {
    double w = phi - two_pi * std::floor(phi / two_pi);
    if (w >= two_pi) w -= two_pi;   // guard the floor rounding edge
    if (w < 0.0) w = 0.0;
    return w;
}

// Distance on the circle to the nearest multiple of 2pi, in [0, pi].
inline double circle_distance(double phi) {
    const double w = wrap_phase(phi);
    return std::min(w, two_pi - w);
}

inline double l2_norm(const std::vector<cd>& v) {
    double s = 0.0;
    for (const cd& x : v) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace phaseopt
