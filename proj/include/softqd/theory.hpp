#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softqd/soft_score.hpp"

namespace softqd {

struct PropertyReport {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst_margin = 0.0;  // min slack over trials; negative = violated

    bool passed() const { return failures == 0; }
};

// Each check draws its own populations from the seed. Monte Carlo based
// checks reuse one shared sample set per trial on a common box, which makes
// the pointwise-max comparisons exact rather than statistical.

// lower_bound_full <= quadrature score, and the gap is within eps1 + eps2.
// Random populations: size <= 6, d <= 2, sigma in [0.1, 1]. tol per trial is
// a grid-refinement estimate of the quadrature error.
PropertyReport check_bound_sandwich(std::size_t trials, std::uint64_t seed);

// Adding a solution never lowers the shared-sample MC score.
PropertyReport check_monotone_add(std::size_t trials, std::uint64_t seed);

// Raising one quality never lowers the shared-sample MC score.
PropertyReport check_monotone_quality(std::size_t trials, std::uint64_t seed);

// Diminishing returns: the marginal gain of a fixed extra solution shrinks
// as the base population grows (U subset of V, extra outside V).
PropertyReport check_submodular(std::size_t trials, std::uint64_t seed);

// S(sigma) / (2 pi sigma^2)^{d/2} -> sum of qualities as sigma -> 0 for
// distinct descriptors; asserts the deviation shrinks along a decreasing
// sigma sequence and the final sigma = r/10 (r the minimum pairwise
// distance) lands within 1%.
PropertyReport check_limit_equivalence(std::size_t populations, std::uint64_t seed);

// All five at the stated default trial counts (100/200/200/500/20).
std::vector<PropertyReport> run_all_checks(std::uint64_t seed);

}  // namespace softqd
