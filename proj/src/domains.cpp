#include "softqd/domains.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace softqd {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Out-of-range coordinates fold to 5.12/x: small magnitude, sign preserved,
// so boundary camping scores poorly in descriptor space.
inline double clip_coord(double x, double bound) {
    return std::abs(x) <= bound ? x : bound / x;
}

inline double clip_deriv(double x, double bound) {
    return std::abs(x) <= bound ? 1.0 : -bound / (x * x);
}

// Per-coordinate shifted-Rastrigin term and its derivative.
inline double rastrigin_term(double z) { return z * z - 10.0 * std::cos(kTwoPi * z) + 10.0; }

// Coordinate maximum of rastrigin_term over [lo, hi]: dense grid scan, then
// golden-section refinement around the best cell. The function is separable,
// so this times solution_dim is the box maximum.
double coord_max(double lo, double hi) {
    const int steps = 1000000;
    double best_t = lo, best_v = rastrigin_term(lo);
    for (int i = 0; i <= steps; ++i) {
        double t = lo + (hi - lo) * i / steps;
        double v = rastrigin_term(t);
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double a = std::max(lo, best_t - 2e-5), b = std::min(hi, best_t + 2e-5);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 120; ++it) {
        if (rastrigin_term(c) > rastrigin_term(d)) {
            b = d;
            d = c;
            c = b - gr * (b - a);
        } else {
            a = c;
            c = d;
            d = a + gr * (b - a);
        }
    }
    return std::max(best_v, rastrigin_term(0.5 * (a + b)));
}

}  // namespace

LinearProjectionProblem::LinearProjectionProblem(int solution_dim, int behavior_dim,
                                                 bool formula_scaling)
    : n_(solution_dim), d_(behavior_dim), formula_scaling_(formula_scaling) {
    if (n_ <= 0 || d_ <= 0) throw invalid_input("linear projection: dimensions must be positive");
    if (n_ % d_ != 0)
        throw invalid_input("linear projection: solution_dim " + std::to_string(n_) +
                            " not divisible by behavior_dim " + std::to_string(d_));
    chunk_ = n_ / d_;
    r_max_ = n_ * coord_max(-bound_ - kOffset, bound_ - kOffset);
    // Mean of clipped coordinates spans [-bound, bound]; the sum/d variant
    // spans +-bound*chunk/d instead.
    raw_half_range_ = formula_scaling_ ? bound_ * chunk_ / d_ : bound_;
}

std::string LinearProjectionProblem::name() const { return "lp-" + std::to_string(d_); }

Evaluation LinearProjectionProblem::evaluate(const std::vector<double>& params) const {
    Evaluation ev;
    double r = 0.0;
    for (double x : params) r += rastrigin_term(x - kOffset);
    ev.quality = 100.0 * (r_max_ - r) / r_max_;

    ev.descriptor.resize(d_);
    const double div = formula_scaling_ ? static_cast<double>(d_) : static_cast<double>(chunk_);
    for (int c = 0; c < d_; ++c) {
        double s = 0.0;
        for (int i = c * chunk_; i < (c + 1) * chunk_; ++i) s += clip_coord(params[i], bound_);
        ev.descriptor[c] = (s / div + raw_half_range_) / (2.0 * raw_half_range_);
    }
    return ev;
}

void LinearProjectionProblem::evaluate_with_grads(const std::vector<double>& params,
                                                  Evaluation& out,
                                                  std::vector<double>& grad_quality,
                                                  std::vector<double>& jac_descriptor) const {
    out.descriptor.assign(d_, 0.0);
    grad_quality.resize(n_);
    jac_descriptor.assign(static_cast<std::size_t>(d_) * n_, 0.0);

    const double div = formula_scaling_ ? static_cast<double>(d_) : static_cast<double>(chunk_);
    const double desc_scale = 1.0 / (div * 2.0 * raw_half_range_);
    double r = 0.0;
    for (int i = 0; i < n_; ++i) {
        double z = params[i] - kOffset;
        double s, c;
#if defined(__GLIBC__)
        ::sincos(kTwoPi * z, &s, &c);
#else
        s = std::sin(kTwoPi * z);
        c = std::cos(kTwoPi * z);
#endif
        r += z * z - 10.0 * c + 10.0;
        grad_quality[i] = -(100.0 / r_max_) * (2.0 * z + 10.0 * kTwoPi * s);
        int row = i / chunk_;
        out.descriptor[row] += clip_coord(params[i], bound_);
        jac_descriptor[static_cast<std::size_t>(row) * n_ + i] =
            clip_deriv(params[i], bound_) * desc_scale;
    }
    out.quality = 100.0 * (r_max_ - r) / r_max_;
    for (int c = 0; c < d_; ++c)
        out.descriptor[c] = (out.descriptor[c] / div + raw_half_range_) / (2.0 * raw_half_range_);
}

Evaluation GaussianHillProblem::evaluate(const std::vector<double>& params) const {
    Evaluation ev;
    double sq = params[0] * params[0] + params[1] * params[1];
    ev.quality = 100.0 * std::exp(-0.5 * sq);
    ev.descriptor = {std::clamp((params[0] + kBox) / (2.0 * kBox), 0.0, 1.0),
                     std::clamp((params[1] + kBox) / (2.0 * kBox), 0.0, 1.0)};
    return ev;
}

void GaussianHillProblem::evaluate_with_grads(const std::vector<double>& params, Evaluation& out,
                                              std::vector<double>& grad_quality,
                                              std::vector<double>& jac_descriptor) const {
    out = evaluate(params);
    grad_quality = {-out.quality * params[0], -out.quality * params[1]};
    jac_descriptor.assign(4, 0.0);
    for (int j = 0; j < 2; ++j) {
        bool inside = params[j] > -kBox && params[j] < kBox;
        jac_descriptor[j * 2 + j] = inside ? 1.0 / (2.0 * kBox) : 0.0;
    }
}

std::unique_ptr<ProblemDefinition> make_problem(const std::string& name, bool formula_scaling) {
    if (name == "lp-4") return std::make_unique<LinearProjectionProblem>(1024, 4, formula_scaling);
    if (name == "lp-8") return std::make_unique<LinearProjectionProblem>(1024, 8, formula_scaling);
    if (name == "lp-16")
        return std::make_unique<LinearProjectionProblem>(1024, 16, formula_scaling);
    if (name == "hill") return std::make_unique<GaussianHillProblem>();
    throw invalid_input("unknown domain '" + name + "' (expected lp-4, lp-8, lp-16 or hill)");
}

}  // namespace softqd
