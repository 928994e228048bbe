#pragma once

#include <cstdint>
#include <random>

#include "phaseopt/common.hpp"

namespace phaseopt::rng {

// splitmix64 step; used to whiten seeds before feeding mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic per-trial seed from (master seed, trial index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1). Hand-rolled so streams are identical across
// standard library implementations (std::uniform_real_distribution is not).
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_phase(Engine& eng) { return two_pi * uniform01(eng); }

// Standard normal via Box-Muller, same portability rationale as uniform01.
inline double gaussian(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline cd complex_gaussian(Engine& eng) {
    const double re = gaussian(eng);
    const double im = gaussian(eng);
    return cd(re, im);
}

// Random unit vector of dimension n (complex components).
inline std::vector<cd> random_unit_vector(Engine& eng, std::size_t n) {
    std::vector<cd> v(n);
    for (auto& x : v) x = complex_gaussian(eng);
    double nrm = l2_norm(v);
    while (nrm < 1e-12) {  // astronomically unlikely, but stay total
        for (auto& x : v) x = complex_gaussian(eng);
        nrm = l2_norm(v);
    }
    for (auto& x : v) x /= nrm;
    return v;
}

}  // namespace phaseopt::rng
