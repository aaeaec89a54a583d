#include "softqd/squad.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace softqd {
namespace {

double logit_one(double b, double clip_eps) {
    double c = std::clamp(b, clip_eps, 1.0 - clip_eps);
    return std::log(c / (1.0 - c));
}

// d(transform)/d(descriptor): zero where the clamp saturates, so clamped
// coordinates stop feeling repulsion (matches the finite-difference view of
// the full chain).
double transform_deriv(double b, const SquadConfig& cfg) {
    if (!cfg.logit_transform) return 1.0;
    if (b <= cfg.clip_eps || b >= 1.0 - cfg.clip_eps) return 0.0;
    return 1.0 / (b * (1.0 - b));
}

std::vector<std::vector<double>> transform_all(const std::vector<std::vector<double>>& descriptors,
                                               const SquadConfig& cfg) {
    if (!cfg.logit_transform) return descriptors;
    std::vector<std::vector<double>> out(descriptors.size());
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        out[i].resize(descriptors[i].size());
        for (std::size_t a = 0; a < descriptors[i].size(); ++a)
            out[i][a] = logit_one(descriptors[i][a], cfg.clip_eps);
    }
    return out;
}

// Objective value of one batch at the current caches:
//   sum_{i in I} f_i - 1/2 sum_{i in I} sum_{j in N_i} r(i, j).
double batch_objective_value(const Population& pop, const std::vector<int>& batch,
                             const std::vector<std::vector<int>>& neighbor_lists,
                             const SquadConfig& cfg,
                             const std::vector<std::vector<double>>& tdesc) {
    double acc = 0.0;
    for (std::size_t m = 0; m < batch.size(); ++m) {
        int i = batch[m];
        acc += pop.qualities[i];
        double fi = std::max(pop.qualities[i], 0.0);
        for (int j : neighbor_lists[m]) {
            double fj = std::max(pop.qualities[j], 0.0);
            acc -= 0.5 * std::sqrt(fi * fj) *
                   std::exp(-squared_distance(tdesc[i], tdesc[j]) / cfg.gamma_sq);
        }
    }
    return acc;
}

// Gradient core. Repulsion derivatives live in transform space and are
// chained through the transform diagonal and the descriptor jacobian;
// d sqrt(f_i f_j)/d f_i is floored to stay finite as f_i -> 0+, and vanishes
// outright once f_i is clamped (f_i <= 0).
std::vector<std::vector<double>> batch_gradient_cached(
    const Population& pop, const std::vector<int>& batch,
    const std::vector<std::vector<int>>& neighbor_lists, const SquadConfig& cfg,
    const ProblemDefinition& problem, const std::vector<std::vector<double>>& tdesc) {
    const int n = static_cast<int>(pop.size());
    const int d = pop.behavior_dim;
    const int p = pop.solution_dim;
    if (neighbor_lists.size() != batch.size())
        throw invalid_input("neighbor_lists must parallel the batch");
    for (std::size_t m = 0; m < batch.size(); ++m) {
        if (batch[m] < 0 || batch[m] >= n)
            throw invalid_input("batch index out of range: " + std::to_string(batch[m]));
        for (int j : neighbor_lists[m])
            if (j < 0 || j >= n || j == batch[m])
                throw invalid_input("bad neighbor index for batch member " + std::to_string(m));
    }

    // batch-local position of each population index, -1 for non-members
    std::vector<int> local(n, -1);
    for (std::size_t m = 0; m < batch.size(); ++m) local[batch[m]] = static_cast<int>(m);

    // df: coefficient on grad_quality; db: repulsion pull on the transformed
    // descriptor, accumulated across both directions of each pair.
    std::vector<double> df(batch.size(), 1.0);
    std::vector<std::vector<double>> db(batch.size(), std::vector<double>(d, 0.0));

    auto add_pair = [&](int self_m, int self_idx, int other_idx, double w, double sq) {
        double f_self = pop.qualities[self_idx];
        if (f_self > 0.0) {
            double f_other = std::max(pop.qualities[other_idx], 0.0);
            df[self_m] -= 0.5 * w * 0.5 * std::sqrt(f_other) /
                          std::sqrt(std::max(f_self, cfg.quality_grad_floor));
        }
        double coef = sq * w / cfg.gamma_sq;  // from -1/2 * dr/db' = +coef * (b'self - b'other)
        for (int a = 0; a < d; ++a)
            db[self_m][a] += coef * (tdesc[self_idx][a] - tdesc[other_idx][a]);
    };

    for (std::size_t m = 0; m < batch.size(); ++m) {
        int i = batch[m];
        double fi = std::max(pop.qualities[i], 0.0);
        for (int j : neighbor_lists[m]) {
            double fj = std::max(pop.qualities[j], 0.0);
            double sq = std::sqrt(fi * fj);
            double w = std::exp(-squared_distance(tdesc[i], tdesc[j]) / cfg.gamma_sq);
            add_pair(static_cast<int>(m), i, j, w, sq);
            if (local[j] >= 0) add_pair(local[j], j, i, w, sq);
        }
    }

    std::vector<std::vector<double>> grads(batch.size());
    Evaluation ev;
    std::vector<double> grad_quality, jac;
    for (std::size_t m = 0; m < batch.size(); ++m) {
        int i = batch[m];
        problem.evaluate_with_grads(pop.params[i], ev, grad_quality, jac);
        if (!all_finite(grad_quality))
            throw numeric_error("non-finite quality gradient at solution " + std::to_string(i));

        auto& g = grads[m];
        g.assign(p, 0.0);
        for (int t = 0; t < p; ++t) g[t] = df[m] * grad_quality[t];
        for (int a = 0; a < d; ++a) {
            double coef = db[m][a] * transform_deriv(ev.descriptor[a], cfg);
            if (coef == 0.0) continue;
            const double* row = jac.data() + static_cast<std::size_t>(a) * p;
            for (int t = 0; t < p; ++t) g[t] += coef * row[t];
        }
        if (!all_finite(g))
            throw numeric_error("non-finite repulsion gradient at solution " + std::to_string(i));
    }
    return grads;
}

}  // namespace

void SquadConfig::validate(std::size_t solution_dim) const {
    if (population_size == 0) throw invalid_input("population_size must be positive");
    if (batch_size == 0 || population_size % batch_size != 0)
        throw invalid_input("population_size must be divisible by batch_size");
    if (neighbors >= population_size)
        throw invalid_input("neighbors must be smaller than population_size");
    if (!(learning_rate > 0.0)) throw invalid_input("learning_rate must be positive");
    if (!(gamma_sq > 0.0)) throw invalid_input("gamma_sq must be positive");
    if (!(clip_eps > 0.0) || clip_eps >= 0.5) throw invalid_input("clip_eps must be in (0, 0.5)");
    if (solution_dim == 0) throw invalid_input("problem has no parameters");
}

AdamState AdamState::zeros(std::size_t n, std::size_t params, double b1, double b2, double eps) {
    AdamState st;
    st.beta1 = b1;
    st.beta2 = b2;
    st.epsilon = eps;
    st.m.assign(n, std::vector<double>(params, 0.0));
    st.v.assign(n, std::vector<double>(params, 0.0));
    st.step_count.assign(n, 0);
    return st;
}

std::vector<double> logit_transform(const std::vector<double>& b, double clip_eps) {
    if (!(clip_eps > 0.0) || clip_eps >= 0.5) throw invalid_input("clip_eps must be in (0, 0.5)");
    std::vector<double> out(b.size());
    for (std::size_t a = 0; a < b.size(); ++a) out[a] = logit_one(b[a], clip_eps);
    return out;
}

std::vector<double> logit_jacobian_diag(const std::vector<double>& b_clamped) {
    std::vector<double> out(b_clamped.size());
    for (std::size_t a = 0; a < b_clamped.size(); ++a) {
        if (!(b_clamped[a] > 0.0) || !(b_clamped[a] < 1.0))
            throw invalid_input("logit jacobian input outside (0, 1)");
        out[a] = 1.0 / (b_clamped[a] * (1.0 - b_clamped[a]));
    }
    return out;
}

std::vector<std::vector<int>> knn_indices_for(const std::vector<std::vector<double>>& points,
                                              std::size_t k, const std::vector<int>& queries) {
    const std::size_t n = points.size();
    if (k + 1 > n) throw invalid_input("knn: k must be smaller than the point count");

    std::vector<std::vector<int>> result(queries.size());
    if (k == 0) return result;

    std::vector<std::pair<double, int>> dist(n);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        int i = queries[q];
        if (i < 0 || static_cast<std::size_t>(i) >= n)
            throw invalid_input("knn: query index out of range");
        for (std::size_t j = 0; j < n; ++j)
            dist[j] = {squared_distance(points[i], points[j]), static_cast<int>(j)};
        // self sorts to the front as (0, i); ask for k+1 and drop it
        std::partial_sort(dist.begin(), dist.begin() + k + 1, dist.end());
        result[q].reserve(k);
        for (std::size_t t = 0; t < k + 1 && result[q].size() < k; ++t)
            if (dist[t].second != i) result[q].push_back(dist[t].second);
    }
    return result;
}

std::vector<std::vector<int>> knn_indices(const std::vector<std::vector<double>>& points,
                                          std::size_t k) {
    std::vector<int> all(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) all[i] = static_cast<int>(i);
    return knn_indices_for(points, k, all);
}

std::vector<std::vector<double>> batch_gradient(const Population& pop,
                                                const std::vector<int>& batch,
                                                const std::vector<std::vector<int>>& neighbor_lists,
                                                const SquadConfig& config,
                                                const ProblemDefinition& problem) {
    return batch_gradient_cached(pop, batch, neighbor_lists, config, problem,
                                 transform_all(pop.descriptors, config));
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               std::size_t idx, double learning_rate) {
    if (idx >= state.m.size()) throw invalid_input("adam_step: solution index out of range");
    if (grad.size() != params.size() || state.m[idx].size() != params.size())
        throw invalid_input("adam_step: dimension mismatch");

    const std::int64_t t = ++state.step_count[idx];
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
    auto& m = state.m[idx];
    auto& v = state.v[idx];
    for (std::size_t a = 0; a < params.size(); ++a) {
        m[a] = state.beta1 * m[a] + (1.0 - state.beta1) * grad[a];
        v[a] = state.beta2 * v[a] + (1.0 - state.beta2) * grad[a] * grad[a];
        params[a] += learning_rate * (m[a] / bc1) / (std::sqrt(v[a] / bc2) + state.epsilon);
    }
}

SquadResult run_squad(const ProblemDefinition& problem, const SquadConfig& config,
                      std::uint64_t seed,
                      const std::function<void(std::size_t, const Population&)>& progress) {
    config.validate(problem.solution_dim());
    auto [lo, hi] = problem.solution_bounds();
    Population pop = seeded_random_population(problem, config.population_size, seed, lo, hi);
    return run_squad_from(problem, config, std::move(pop), progress);
}

SquadResult run_squad_from(const ProblemDefinition& problem, const SquadConfig& config,
                           Population pop,
                           const std::function<void(std::size_t, const Population&)>& progress) {
    const std::size_t n = pop.size();
    if (n == 0) throw invalid_input("run_squad: empty population");
    if (n % config.batch_size != 0)
        throw invalid_input("run_squad: population size must be divisible by batch_size");
    if (config.neighbors >= n)
        throw invalid_input("run_squad: neighbors must be smaller than the population");
    if (pop.qualities.size() != n || pop.descriptors.size() != n)
        throw invalid_input("run_squad: population must arrive evaluated");

    SquadResult res;
    res.eval_count = n;  // the initial evaluation

    auto tdesc = transform_all(pop.descriptors, config);
    AdamState state = AdamState::zeros(n, pop.params.front().size(), config.adam_beta1,
                                       config.adam_beta2, config.adam_epsilon);
    if (progress) progress(0, pop);

    std::vector<int> batch(config.batch_size);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        double epoch_obj = 0.0;

        for (std::size_t start = 0; start < n; start += config.batch_size) {
            for (std::size_t m = 0; m < config.batch_size; ++m)
                batch[m] = static_cast<int>(start + m);

            const auto& knn_space = config.knn_on_transformed ? tdesc : pop.descriptors;
            auto neighbor_lists = knn_indices_for(knn_space, config.neighbors, batch);

            epoch_obj += batch_objective_value(pop, batch, neighbor_lists, config, tdesc);
            auto grads = batch_gradient_cached(pop, batch, neighbor_lists, config, problem, tdesc);

            for (std::size_t m = 0; m < config.batch_size; ++m)
                adam_step(pop.params[batch[m]], grads[m], state, batch[m], config.learning_rate);

            // re-evaluate exactly the updated members
            for (std::size_t m = 0; m < config.batch_size; ++m) {
                int i = batch[m];
                Evaluation ev = problem.evaluate(pop.params[i]);
                if (!std::isfinite(ev.quality) || !all_finite(ev.descriptor))
                    throw eval_error("non-finite re-evaluation for solution " + std::to_string(i));
                pop.qualities[i] = ev.quality;
                if (config.logit_transform)
                    tdesc[i] = logit_transform(ev.descriptor, config.clip_eps);
                else
                    tdesc[i] = ev.descriptor;
                pop.descriptors[i] = std::move(ev.descriptor);
            }
            res.eval_count += config.batch_size;
        }

        double mean_q = 0.0, max_q = pop.qualities.front();
        for (double f : pop.qualities) {
            mean_q += f;
            max_q = std::max(max_q, f);
        }
        mean_q /= static_cast<double>(n);

        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.history.push_back({epoch, epoch_obj, mean_q, max_q, wall});
        if (progress) progress(epoch, pop);
    }

    res.population = std::move(pop);
    return res;
}

}  // namespace softqd
