#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "softqd/population.hpp"

namespace softqd {

struct SquadConfig {
    std::size_t population_size = 1024;
    std::size_t batch_size = 64;
    std::size_t neighbors = 16;  // k = 0 disables repulsion
    std::size_t epochs = 1000;
    double learning_rate = 0.05;
    double gamma_sq = 0.1;

    // Descriptor transform. Descriptors live in [0,1]^d; the repulsion term
    // acts on elementwise logit(b) with input clamped to
    // [clip_eps, 1-clip_eps]. Turning the transform off runs repulsion on
    // the raw descriptors (ablation knob).
    bool logit_transform = true;
    double clip_eps = 1e-6;

    // Neighbor search space: transformed descriptors by default, so kNN and
    // repulsion agree on geometry. Raw-space kNN kept for comparison.
    bool knn_on_transformed = true;

    // Floor inside d/df sqrt(f_i f_j); keeps the derivative finite as a
    // clamped quality approaches zero.
    double quality_grad_floor = 1e-8;

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    // Throws invalid_input naming the offending field.
    void validate(std::size_t) const;
};

// Per-solution Adam accumulators (maximization convention: params move along
// +grad). step_count is per solution; batches update members in lockstep.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<std::vector<double>> m;  // first moments, N x P
    std::vector<std::vector<double>> v;  // second moments, N x P
    std::vector<std::int64_t> step_count;

    static AdamState zeros(std::size_t n, std::size_t params, double b1 = 0.9,
                           double b2 = 0.999, double eps = 1e-8);
};

struct IterationRecord {
    std::size_t epoch = 0;
    double objective_tilde = 0.0;  // sum of per-batch objectives this epoch
    double mean_quality = 0.0;
    double max_quality = 0.0;
    double wall_time_s = 0.0;
};

struct SquadResult {
    Population population;
    std::vector<IterationRecord> history;
    std::size_t eval_count = 0;  // N * (epochs + 1) exactly
};

// Elementwise logit of the clamped descriptor; logit(0.5) = 0, inputs at or
// beyond the clamp saturate at logit(clip_eps).
std::vector<double> logit_transform(const std::vector<double>& b, double clip_eps);

// Diagonal jacobian 1/(b (1-b)) of the transform at a clamped point.
// Entries must already lie in [clip_eps, 1-clip_eps].
std::vector<double> logit_jacobian_diag(const std::vector<double>& b_clamped);

// Exact brute-force kNN under squared Euclidean distance, self excluded,
// distance ties broken toward the smaller index. Returns k indices per query
// in ascending (distance, index) order.
std::vector<std::vector<int>> knn_indices(const std::vector<std::vector<double>>& points,
                                          std::size_t k);
// Same contract, neighbor lists computed only for the query rows.
std::vector<std::vector<int>> knn_indices_for(const std::vector<std::vector<double>>& points,
                                              std::size_t k, const std::vector<int>& queries);

// Ascent gradient of the batch objective with respect to each batch member's
// parameters. Neighbor quantities outside the batch are constants; batch
// members appearing in each other's neighbor lists contribute both ways.
// neighbor_lists[i] indexes into pop for each batch member i (parallel to
// batch). Throws numeric_error naming the solution and term on non-finite
// output.
std::vector<std::vector<double>> batch_gradient(const Population& pop,
                                                const std::vector<int>& batch,
                                                const std::vector<std::vector<int>>& neighbor_lists,
                                                const SquadConfig& config,
                                                const ProblemDefinition& problem);

// One Adam ascent step for solution idx. Bias correction uses the
// post-increment step count.
void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               std::size_t idx, double learning_rate);

// Batched repulsion-regularized ascent. Per epoch, contiguous fixed-order
// batches of batch_size; per batch: kNN against the full current descriptor
// cache, batch gradient, Adam update, re-evaluation of exactly the batch.
// progress (optional) is called once per epoch after re-evaluation.
SquadResult run_squad(const ProblemDefinition& problem, const SquadConfig& config,
                      std::uint64_t seed,
                      const std::function<void(std::size_t, const Population&)>& progress = {});

// Same loop, starting from a caller-built population (must be evaluated).
SquadResult run_squad_from(const ProblemDefinition& problem, const SquadConfig& config,
                           Population pop,
                           const std::function<void(std::size_t, const Population&)>& progress = {});

}  // namespace softqd
