#include "softqd/population.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace softqd {

void evaluate_population(const ProblemDefinition& problem, Population& pop) {
    const int n_dim = problem.solution_dim();
    const int b_dim = problem.behavior_dim();
    pop.solution_dim = n_dim;
    pop.behavior_dim = b_dim;
    pop.qualities.resize(pop.params.size());
    pop.descriptors.resize(pop.params.size());

    for (std::size_t i = 0; i < pop.params.size(); ++i) {
        if (static_cast<int>(pop.params[i].size()) != n_dim)
            throw invalid_input("solution " + std::to_string(i) + " has dimension " +
                                std::to_string(pop.params[i].size()) + ", problem expects " +
                                std::to_string(n_dim));
        Evaluation ev = problem.evaluate(pop.params[i]);
        if (!std::isfinite(ev.quality) || !all_finite(ev.descriptor))
            throw eval_error("non-finite evaluation for solution " + std::to_string(i));
        if (static_cast<int>(ev.descriptor.size()) != b_dim)
            throw eval_error("descriptor dimension mismatch for solution " + std::to_string(i));
        pop.qualities[i] = ev.quality;
        pop.descriptors[i] = std::move(ev.descriptor);
    }
}

Population seeded_random_population(const ProblemDefinition& problem, std::size_t n,
                                    std::uint64_t seed, double lo, double hi) {
    if (hi < lo) throw invalid_input("seeded_random_population: hi < lo");
    Rng rng(seed);
    Population pop;
    pop.params.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pop.params[i].resize(problem.solution_dim());
        for (double& x : pop.params[i]) x = rng.uniform(lo, hi);
    }
    evaluate_population(problem, pop);
    return pop;
}

std::string population_to_json(const Population& pop) {
    nlohmann::ordered_json j;
    j["solution_dim"] = pop.solution_dim;
    j["behavior_dim"] = pop.behavior_dim;
    j["params"] = pop.params;
    j["qualities"] = pop.qualities;
    j["descriptors"] = pop.descriptors;
    return j.dump();
}

Population population_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input(std::string("population json: ") + e.what());
    }
    Population pop;
    try {
        pop.solution_dim = j.at("solution_dim").get<int>();
        pop.behavior_dim = j.at("behavior_dim").get<int>();
        pop.params = j.at("params").get<std::vector<std::vector<double>>>();
        pop.qualities = j.at("qualities").get<std::vector<double>>();
        pop.descriptors = j.at("descriptors").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input(std::string("population json: ") + e.what());
    }
    if (pop.qualities.size() != pop.params.size() || pop.descriptors.size() != pop.params.size())
        throw invalid_input("population json: column lengths differ");
    for (const auto& p : pop.params)
        if (static_cast<int>(p.size()) != pop.solution_dim)
            throw invalid_input("population json: params row dimension mismatch");
    for (const auto& d : pop.descriptors)
        if (static_cast<int>(d.size()) != pop.behavior_dim)
            throw invalid_input("population json: descriptor row dimension mismatch");
    return pop;
}

void save_population(const Population& pop, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << population_to_json(pop);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Population load_population(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return population_from_json(ss.str());
}

}  // namespace softqd
