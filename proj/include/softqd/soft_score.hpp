#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softqd/common.hpp"
#include "softqd/population.hpp"

namespace softqd {

// Axis-aligned integration box.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
    std::size_t dim() const { return lo.size(); }
};

struct ScoreEstimate {
    double value = 0.0;
    double std_error = 0.0;   // 0 for deterministic quadrature
    std::size_t n_samples = 0;
    std::string method;
};

struct ErrorBounds {
    double eps1 = 0.0;  // third-order overlap correction
    double eps2 = 0.0;  // pairwise mismatch bound
    double total() const { return eps1 + eps2; }
};

// Best quality reachable at behavior point b: max_n f_n+ exp(-||b - b_n||^2
// / (2 sigma^2)), qualities clamped below at zero before the max.
double behavior_value(const std::vector<double>& qualities,
                      const std::vector<std::vector<double>>& descriptors,
                      const std::vector<double>& b, const KernelParams& kernel);

// Per-coordinate [min descriptor - 8 sigma, max descriptor + 8 sigma]: wide
// enough that the truncated kernel mass is negligible at double precision.
Box integration_box(const std::vector<std::vector<double>>& descriptors, double sigma);

std::vector<std::vector<double>> sample_box(const Box& box, std::size_t n, std::uint64_t seed);

// Monte Carlo integral of behavior_value over the box. The caller supplies
// the sample set so that property checks can reuse identical points across
// populations; every descriptor must sit inside the box with margin
// >= 8 sigma per coordinate.
ScoreEstimate soft_qd_score_mc(const std::vector<double>& qualities,
                               const std::vector<std::vector<double>>& descriptors,
                               const KernelParams& kernel,
                               const std::vector<std::vector<double>>& sample_points,
                               const Box& box);

// Midpoint-rule integral on a regular grid, d <= 3. Same margin contract as
// the Monte Carlo path. Deterministic; std_error is 0 by construction.
ScoreEstimate soft_qd_score_quadrature(const std::vector<double>& qualities,
                                       const std::vector<std::vector<double>>& descriptors,
                                       const KernelParams& kernel, const Box& box,
                                       std::size_t points_per_axis);

// Closed-form lower bound on the soft score:
//   (2 pi sigma^2)^{d/2} [ sum_n f_n
//       - sum_{i<j} sqrt(f_i f_j) exp(-||b_i - b_j||^2 / (8 sigma^2)) ].
// Requires nonnegative qualities (clamp before calling).
double lower_bound_full(const std::vector<double>& qualities,
                        const std::vector<std::vector<double>>& descriptors,
                        const KernelParams& kernel);

// Repulsion-regularized objective over sparse neighbor lists:
//   sum_n f_n - 1/2 sum_i sum_{j in N_i} sqrt(f_i+ f_j+)
//                                        exp(-||b_i - b_j||^2 / gamma^2).
// Qualities are clamped at zero inside the pair term only. With all-pairs
// neighbor lists each unordered pair appears twice, so the halved double sum
// reduces to the plain pairwise penalty.
double squad_objective(const std::vector<double>& qualities,
                       const std::vector<std::vector<double>>& descriptors,
                       const std::vector<std::vector<int>>& neighbor_lists, double gamma_sq);

// Upper bound on the gap between the true soft score and lower_bound_full:
//   eps1 = (2 pi sigma^2)^{d/2} sum_{i<j<k} (f_i f_j f_k)^{1/3}
//            exp(-(||b_i-b_j||^2+||b_i-b_k||^2+||b_j-b_k||^2)/(18 sigma^2))
//   eps2 = (2 pi sigma^2)^{d/2} sum_{i<j} (|f_i - f_j|
//            + min(f_i, f_j) ||b_i - b_j|| / sigma).
// The triple-overlap constant (2 pi sigma^2)^{d/2} comes from completing the
// square: the three-way product integral equals a single Gaussian of the
// same bandwidth centered at the triplet centroid.
ErrorBounds error_bounds(const std::vector<double>& qualities,
                         const std::vector<std::vector<double>>& descriptors,
                         const KernelParams& kernel);

// Truncated inclusion-exclusion estimate of E[max]: P_K = sum_{m<=K}
// (-1)^{m-1} S_m with S_m the sum of minima over m-subsets. order 2 gives a
// lower bound on the max of nonnegative values, order 3 an upper bound.
double bonferroni_partial_sums(const std::vector<double>& values, int order);

}  // namespace softqd
