#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "softqd/common.hpp"

namespace softqd {

// One evaluated solution: scalar quality plus behavior descriptor.
struct Evaluation {
    double quality = 0.0;
    std::vector<double> descriptor;
};

// Kernel bandwidth for the soft score. gamma^2 = 8 sigma^2 is the matching
// repulsion length scale of the closed-form lower bound.
struct KernelParams {
    double sigma_sq = 0.0;

    double sigma() const { return std::sqrt(sigma_sq); }
    double gamma_sq() const { return 8.0 * sigma_sq; }
};

// A problem exposes evaluation and, for gradient-based search, analytic
// derivatives. The descriptor jacobian is dense row-major, behavior_dim rows
// by solution_dim columns.
class ProblemDefinition {
  public:
    virtual ~ProblemDefinition() = default;

    virtual std::string name() const = 0;
    virtual int solution_dim() const = 0;
    virtual int behavior_dim() const = 0;

    virtual Evaluation evaluate(const std::vector<double>& params) const = 0;

    virtual void evaluate_with_grads(const std::vector<double>& params, Evaluation& out,
                                     std::vector<double>& grad_quality,
                                     std::vector<double>& jac_descriptor) const = 0;

    // Per-coordinate box solutions are initialized in; also the search box
    // archive-based baselines clamp mutated children to.
    virtual std::pair<double, double> solution_bounds() const = 0;
};

// Column layout mirrors the on-disk JSON document: params, qualities and
// descriptors share indices.
struct Population {
    int solution_dim = 0;
    int behavior_dim = 0;
    std::vector<std::vector<double>> params;
    std::vector<double> qualities;
    std::vector<std::vector<double>> descriptors;

    std::size_t size() const { return params.size(); }
};

// Evaluates every solution, filling qualities/descriptors in index order.
// Rejects dimension mismatches; reports the offending solution index when a
// domain returns a non-finite quality or descriptor.
void evaluate_population(const ProblemDefinition& problem, Population& pop);

// n solutions with coordinates uniform in [lo, hi], evaluated. lo == hi is a
// legal degenerate box (all solutions identical).
Population seeded_random_population(const ProblemDefinition& problem, std::size_t n,
                                    std::uint64_t seed, double lo, double hi);

// Bit-exact JSON round trip (doubles serialized at full precision).
std::string population_to_json(const Population& pop);
Population population_from_json(const std::string& text);
void save_population(const Population& pop, const std::string& path);
Population load_population(const std::string& path);

}  // namespace softqd
