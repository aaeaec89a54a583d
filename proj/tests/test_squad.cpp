#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "softqd/domains.hpp"
#include "softqd/soft_score.hpp"
#include "softqd/squad.hpp"

using namespace softqd;

namespace {

// Scalar the batch gradient differentiates: batch qualities minus halved
// neighbor repulsion, descriptors transformed the way the config says.
double batch_objective(const Population& pop, const std::vector<int>& batch,
                       const std::vector<std::vector<int>>& neighbor_lists,
                       const SquadConfig& cfg) {
    std::vector<std::vector<double>> t;
    t.reserve(pop.size());
    for (const auto& b : pop.descriptors)
        t.push_back(cfg.logit_transform ? logit_transform(b, cfg.clip_eps) : b);
    double obj = 0.0;
    for (std::size_t m = 0; m < batch.size(); ++m) {
        int i = batch[m];
        obj += pop.qualities[i];
        double fi = std::max(pop.qualities[i], 0.0);
        for (int j : neighbor_lists[m]) {
            double fj = std::max(pop.qualities[j], 0.0);
            obj -= 0.5 * std::sqrt(fi * fj) *
                   std::exp(-squared_distance(t[i], t[j]) / cfg.gamma_sq);
        }
    }
    return obj;
}

double fd_batch_objective(const ProblemDefinition& problem, Population pop,
                          const std::vector<int>& batch,
                          const std::vector<std::vector<int>>& neighbor_lists,
                          const SquadConfig& cfg, int member, std::size_t coord, double delta) {
    pop.params[member][coord] += delta;
    Evaluation ev = problem.evaluate(pop.params[member]);
    pop.qualities[member] = ev.quality;
    pop.descriptors[member] = ev.descriptor;
    return batch_objective(pop, batch, neighbor_lists, cfg);
}

Population evaluated_population(const ProblemDefinition& problem,
                                const std::vector<std::vector<double>>& params) {
    Population pop;
    pop.solution_dim = problem.solution_dim();
    pop.behavior_dim = problem.behavior_dim();
    pop.params = params;
    evaluate_population(problem, pop);
    return pop;
}

}  // namespace

TEST_CASE("logit transform frozen values") {
    auto t = logit_transform({0.7, 0.5}, 1e-6);
    CHECK(t[0] == doctest::Approx(0.84729786038720367).epsilon(1e-15));
    CHECK(t[1] == 0.0);

    auto clamped = logit_transform({0.0, 1.0, -3.0, 7.0}, 1e-6);
    CHECK(clamped[0] == doctest::Approx(-13.815509557963773).epsilon(1e-15));
    // upper rail carries the rounding of 1 - (1 - eps); only symmetry to
    // within that rounding matters
    CHECK(clamped[1] == doctest::Approx(13.815509557963773).epsilon(1e-10));
    CHECK(clamped[2] == clamped[0]);
    CHECK(clamped[3] == clamped[1]);

    // round trip through the sigmoid
    for (double b : {0.2, 0.431, 0.99}) {
        double z = logit_transform({b}, 1e-6)[0];
        CHECK(1.0 / (1.0 + std::exp(-z)) == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("logit jacobian diag frozen values") {
    auto j = logit_jacobian_diag({0.5, 0.7});
    CHECK(j[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(j[1] == doctest::Approx(4.7619047619047619).epsilon(1e-15));
}

TEST_CASE("knn matches a full-sort oracle") {
    Rng rng(101);
    for (int t = 0; t < 10; ++t) {
        std::size_t n = 5 + rng.below(40);
        std::size_t d = 1 + rng.below(4);
        std::size_t k = rng.below(n);
        std::vector<std::vector<double>> pts(n, std::vector<double>(d));
        for (auto& p : pts)
            for (double& x : p) x = rng.uniform(-1.0, 1.0);
        // inject duplicates to force distance ties
        if (n > 6) {
            pts[3] = pts[1];
            pts[5] = pts[1];
        }

        auto got = knn_indices(pts, k);
        REQUIRE(got.size() == n);
        for (std::size_t q = 0; q < n; ++q) {
            std::vector<std::pair<double, int>> order;
            for (std::size_t j = 0; j < n; ++j)
                if (j != q)
                    order.emplace_back(squared_distance(pts[q], pts[j]), static_cast<int>(j));
            std::sort(order.begin(), order.end());
            REQUIRE(got[q].size() == k);
            for (std::size_t r = 0; r < k; ++r) CHECK(got[q][r] == order[r].second);
        }
    }
}

TEST_CASE("knn for selected queries and k = 0") {
    std::vector<std::vector<double>> pts = {{0.0}, {1.0}, {2.5}, {2.6}};
    auto lists = knn_indices_for(pts, 2, {2, 0});
    REQUIRE(lists.size() == 2);
    CHECK(lists[0] == std::vector<int>{3, 1});
    CHECK(lists[1] == std::vector<int>{1, 2});

    auto empty = knn_indices_for(pts, 0, {1});
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].empty());
}

TEST_CASE("batch gradient matches finite differences on the hill domain") {
    GaussianHillProblem problem;
    Rng rng(7);
    std::vector<std::vector<double>> params;
    for (int i = 0; i < 8; ++i) params.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    Population pop = evaluated_population(problem, params);

    SquadConfig cfg;
    cfg.population_size = 8;
    cfg.batch_size = 4;
    cfg.neighbors = 3;
    cfg.gamma_sq = 0.5;

    for (bool use_logit : {true, false}) {
        cfg.logit_transform = use_logit;
        std::vector<int> batch = {1, 3, 4, 6};
        std::vector<std::vector<double>> tdesc;
        for (const auto& b : pop.descriptors)
            tdesc.push_back(use_logit ? logit_transform(b, cfg.clip_eps) : b);
        auto neighbor_lists = knn_indices_for(tdesc, cfg.neighbors, batch);

        auto grads = batch_gradient(pop, batch, neighbor_lists, cfg, problem);
        REQUIRE(grads.size() == batch.size());

        const double h = 1e-6;
        for (std::size_t m = 0; m < batch.size(); ++m) {
            for (std::size_t c = 0; c < 2; ++c) {
                double fp =
                    fd_batch_objective(problem, pop, batch, neighbor_lists, cfg, batch[m], c, h);
                double fm =
                    fd_batch_objective(problem, pop, batch, neighbor_lists, cfg, batch[m], c, -h);
                double fd = (fp - fm) / (2.0 * h);
                double scale = std::max(1.0, std::abs(fd));
                CHECK(std::abs(grads[m][c] - fd) / scale < 1e-4);
            }
        }
    }
}

TEST_CASE("batch gradient matches finite differences on linear projection") {
    LinearProjectionProblem problem(8, 4);
    Rng rng(23);
    std::vector<std::vector<double>> params;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> x(8);
        for (double& xi : x) xi = rng.uniform(-4.5, 4.5);
        params.push_back(x);
    }
    Population pop = evaluated_population(problem, params);

    SquadConfig cfg;
    cfg.population_size = 6;
    cfg.batch_size = 3;
    cfg.neighbors = 2;
    cfg.gamma_sq = 1.0;

    std::vector<int> batch = {0, 2, 5};
    std::vector<std::vector<double>> tdesc;
    for (const auto& b : pop.descriptors) tdesc.push_back(logit_transform(b, cfg.clip_eps));
    auto neighbor_lists = knn_indices_for(tdesc, cfg.neighbors, batch);

    auto grads = batch_gradient(pop, batch, neighbor_lists, cfg, problem);
    const double h = 1e-6;
    for (std::size_t m = 0; m < batch.size(); ++m) {
        for (std::size_t c = 0; c < 8; ++c) {
            double fp =
                fd_batch_objective(problem, pop, batch, neighbor_lists, cfg, batch[m], c, h);
            double fm =
                fd_batch_objective(problem, pop, batch, neighbor_lists, cfg, batch[m], c, -h);
            double fd = (fp - fm) / (2.0 * h);
            double scale = std::max(1.0, std::abs(fd));
            CHECK(std::abs(grads[m][c] - fd) / scale < 1e-4);
        }
    }
}

TEST_CASE("no neighbors reduces the gradient to the quality gradient") {
    GaussianHillProblem problem;
    Population pop = evaluated_population(problem, {{0.4, -0.7}, {1.2, 0.3}});
    SquadConfig cfg;
    cfg.population_size = 2;
    cfg.batch_size = 2;
    cfg.neighbors = 0;

    std::vector<int> batch = {0, 1};
    auto grads = batch_gradient(pop, batch, {{}, {}}, cfg, problem);

    for (std::size_t m = 0; m < 2; ++m) {
        Evaluation ev;
        std::vector<double> g, jac;
        problem.evaluate_with_grads(pop.params[batch[m]], ev, g, jac);
        CHECK(grads[m][0] == doctest::Approx(g[0]).epsilon(1e-12));
        CHECK(grads[m][1] == doctest::Approx(g[1]).epsilon(1e-12));
    }
}

TEST_CASE("symmetric members get mirrored gradients") {
    GaussianHillProblem problem;
    Population pop = evaluated_population(problem, {{0.8, 0.0}, {-0.8, 0.0}});
    SquadConfig cfg;
    cfg.population_size = 2;
    cfg.batch_size = 2;
    cfg.neighbors = 1;
    cfg.gamma_sq = 0.7;

    auto grads = batch_gradient(pop, {0, 1}, {{1}, {0}}, cfg, problem);
    CHECK(grads[0][0] == doctest::Approx(-grads[1][0]).epsilon(1e-10));
    CHECK(grads[0][1] == doctest::Approx(grads[1][1]).epsilon(1e-10));
}

TEST_CASE("adam step against hand-rolled arithmetic") {
    AdamState st = AdamState::zeros(1, 2);
    std::vector<double> params = {1.0, -2.0};
    std::vector<double> grad = {0.5, -1.5};

    // replicate two updates independently
    double m0 = 0, m1 = 0, v0 = 0, v1 = 0, p0 = 1.0, p1 = -2.0;
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= 2; ++t) {
        m0 = b1 * m0 + (1 - b1) * grad[0];
        m1 = b1 * m1 + (1 - b1) * grad[1];
        v0 = b2 * v0 + (1 - b2) * grad[0] * grad[0];
        v1 = b2 * v1 + (1 - b2) * grad[1] * grad[1];
        double mh0 = m0 / (1 - std::pow(b1, t)), mh1 = m1 / (1 - std::pow(b1, t));
        double vh0 = v0 / (1 - std::pow(b2, t)), vh1 = v1 / (1 - std::pow(b2, t));
        p0 += lr * mh0 / (std::sqrt(vh0) + eps);
        p1 += lr * mh1 / (std::sqrt(vh1) + eps);
        adam_step(params, grad, st, 0, lr);
    }
    CHECK(params[0] == doctest::Approx(p0).epsilon(1e-14));
    CHECK(params[1] == doctest::Approx(p1).epsilon(1e-14));
    CHECK(st.step_count[0] == 2);

    // first step moves by ~lr in the gradient sign direction
    AdamState st2 = AdamState::zeros(1, 1);
    std::vector<double> q = {0.0};
    adam_step(q, {0.25}, st2, 0, 0.05);
    CHECK(q[0] == doctest::Approx(0.05 * 0.25 / (0.25 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("config validation names the offence") {
    SquadConfig cfg;
    cfg.population_size = 10;
    cfg.batch_size = 3;
    CHECK_THROWS_AS(cfg.validate(4), invalid_input);
    cfg.batch_size = 5;
    cfg.neighbors = 10;
    CHECK_THROWS_AS(cfg.validate(4), invalid_input);
    cfg.neighbors = 2;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(4), invalid_input);
    cfg.learning_rate = 0.1;
    cfg.gamma_sq = -1.0;
    CHECK_THROWS_AS(cfg.validate(4), invalid_input);
    cfg.gamma_sq = 0.5;
    cfg.clip_eps = 0.6;
    CHECK_THROWS_AS(cfg.validate(4), invalid_input);
    cfg.clip_eps = 1e-6;
    cfg.validate(4);
}

TEST_CASE("run_squad with zero epochs returns the seeded population") {
    GaussianHillProblem problem;
    SquadConfig cfg;
    cfg.population_size = 16;
    cfg.batch_size = 4;
    cfg.neighbors = 3;
    cfg.epochs = 0;

    SquadResult res = run_squad(problem, cfg, 33);
    Population expect = seeded_random_population(problem, 16, 33, -3.0, 3.0);
    CHECK(res.population.params == expect.params);
    CHECK(res.population.qualities == expect.qualities);
    CHECK(res.eval_count == 16);
    CHECK(res.history.empty());
}

TEST_CASE("run_squad budget, determinism and re-evaluation discipline") {
    GaussianHillProblem problem;
    SquadConfig cfg;
    cfg.population_size = 12;
    cfg.batch_size = 4;
    cfg.neighbors = 5;
    cfg.epochs = 7;
    cfg.gamma_sq = 0.3;
    cfg.learning_rate = 0.05;

    std::size_t progress_calls = 0;
    SquadResult a = run_squad(problem, cfg, 5,
                              [&](std::size_t, const Population&) { ++progress_calls; });
    SquadResult b = run_squad(problem, cfg, 5);
    CHECK(progress_calls == 8);  // epoch 0 plus one per epoch
    CHECK(a.eval_count == 12 * 8);
    CHECK(a.population.params == b.population.params);
    CHECK(a.population.qualities == b.population.qualities);
    REQUIRE(a.history.size() == 7);
    for (std::size_t e = 0; e < 7; ++e) {
        CHECK(a.history[e].epoch == e + 1);
        CHECK(std::isfinite(a.history[e].objective_tilde));
        CHECK(a.history[e].objective_tilde == b.history[e].objective_tilde);
    }

    // stored qualities/descriptors match a fresh evaluation of the params
    for (std::size_t i = 0; i < a.population.size(); ++i) {
        Evaluation ev = problem.evaluate(a.population.params[i]);
        CHECK(a.population.qualities[i] == doctest::Approx(ev.quality).epsilon(1e-12));
        for (int d = 0; d < 2; ++d)
            CHECK(a.population.descriptors[i][d] ==
                  doctest::Approx(ev.descriptor[d]).epsilon(1e-12));
    }

    // final history row agrees with the returned population
    double mean_q = 0.0, max_q = a.population.qualities[0];
    for (double q : a.population.qualities) {
        mean_q += q;
        max_q = std::max(max_q, q);
    }
    mean_q /= 12.0;
    CHECK(a.history.back().mean_quality == doctest::Approx(mean_q).epsilon(1e-12));
    CHECK(a.history.back().max_quality == doctest::Approx(max_q).epsilon(1e-12));
}

TEST_CASE("run_squad improves the hill population objective") {
    GaussianHillProblem problem;
    SquadConfig cfg;
    cfg.population_size = 32;
    cfg.batch_size = 8;
    cfg.neighbors = 4;
    cfg.epochs = 60;
    cfg.gamma_sq = 0.5;
    cfg.learning_rate = 0.05;

    SquadResult res = run_squad(problem, cfg, 11);
    CHECK(res.history.back().objective_tilde > res.history.front().objective_tilde);
    CHECK(res.history.back().mean_quality > 20.0);
}

TEST_CASE("run_squad_from continues a caller-built population") {
    GaussianHillProblem problem;
    Population pop = seeded_random_population(problem, 8, 2, -1.0, 1.0);
    SquadConfig cfg;
    cfg.population_size = 8;
    cfg.batch_size = 8;
    cfg.neighbors = 2;
    cfg.epochs = 3;
    cfg.gamma_sq = 0.4;

    SquadResult res = run_squad_from(problem, cfg, pop);
    CHECK(res.eval_count == 8 * 4);  // counts the initial evaluation plus three epochs
    CHECK(res.population.size() == 8);

    Population wrong = pop;
    wrong.params.pop_back();
    wrong.qualities.pop_back();
    wrong.descriptors.pop_back();
    CHECK_THROWS_AS(run_squad_from(problem, cfg, wrong), invalid_input);
}
