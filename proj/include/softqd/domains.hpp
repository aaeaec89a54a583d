#pragma once

#include <memory>
#include <string>

#include "softqd/population.hpp"

namespace softqd {

// Shifted-Rastrigin quality with a chunked linear projection descriptor.
//
// quality(x) = 100 * (R_max - R(x - 2.048*1)) / R_max, R the Rastrigin
// function; R_max is the search-box maximum, found per coordinate by grid
// scan plus golden-section refinement at construction (the function is
// separable, so the box max is n times the coordinate max).
//
// descriptor: coordinates are clipped (x inside [-5.12, 5.12] passes
// through, outside maps to 5.12/x), averaged over behavior_dim contiguous
// equal chunks, then affinely mapped to [0,1]. The clip seam at |x| = 5.12
// keeps the inside branch for both value and derivative.
class LinearProjectionProblem : public ProblemDefinition {
  public:
    // formula_scaling switches the chunk statistic from the mean to
    // sum/behavior_dim (normalized by that variant's own range bound);
    // kept for comparison only.
    LinearProjectionProblem(int solution_dim, int behavior_dim, bool formula_scaling = false);

    std::string name() const override;
    int solution_dim() const override { return n_; }
    int behavior_dim() const override { return d_; }

    Evaluation evaluate(const std::vector<double>& params) const override;
    void evaluate_with_grads(const std::vector<double>& params, Evaluation& out,
                             std::vector<double>& grad_quality,
                             std::vector<double>& jac_descriptor) const override;

    std::pair<double, double> solution_bounds() const override { return {-bound_, bound_}; }

    double r_max() const { return r_max_; }

    static constexpr double kBound = 5.12;
    static constexpr double kOffset = 2.048;

  private:
    int n_;
    int d_;
    int chunk_;  // n_ / d_
    bool formula_scaling_;
    double bound_ = kBound;
    double r_max_ = 0.0;
    double raw_half_range_ = 0.0;  // descriptor normalization half-width
};

// Smooth 2-d sanity domain: one Gaussian quality hill at the origin,
// descriptor is the affine clamp of the solution into [0,1]^2. Everything
// has a closed form, which makes gradient and optimizer tests transparent.
class GaussianHillProblem : public ProblemDefinition {
  public:
    GaussianHillProblem() = default;

    std::string name() const override { return "hill"; }
    int solution_dim() const override { return 2; }
    int behavior_dim() const override { return 2; }

    Evaluation evaluate(const std::vector<double>& params) const override;
    void evaluate_with_grads(const std::vector<double>& params, Evaluation& out,
                             std::vector<double>& grad_quality,
                             std::vector<double>& jac_descriptor) const override;

    std::pair<double, double> solution_bounds() const override { return {-kBox, kBox}; }

    static constexpr double kBox = 3.0;
};

// Domain registry for the CLI: "lp-4", "lp-8", "lp-16" (1024 parameters),
// "hill". Unknown names are rejected.
std::unique_ptr<ProblemDefinition> make_problem(const std::string& name,
                                                bool formula_scaling = false);

}  // namespace softqd
