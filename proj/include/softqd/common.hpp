#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace softqd {

// Rejected input: a caller violated an operation's contract.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A domain evaluation produced something unusable (non-finite quality, ...).
struct eval_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure inside an algorithm (non-finite gradient, no convergence).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic, portable random source. Engine is std::mt19937_64 (fully
// specified by the standard); output transforms are written out here instead
// of using std:: distributions, whose bit streams vary between standard
// library implementations.
//   uniform01: (x >> 11) * 2^-53, in [0, 1)
//   normal:    Box-Muller on (1-u1, u2], spare value cached
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Integer in [0, n). Rejection-free modulo is fine here: n is tiny
    // relative to 2^64, bias is below 2^-50.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace softqd
