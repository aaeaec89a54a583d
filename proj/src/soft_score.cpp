#include "softqd/soft_score.hpp"

#include <algorithm>
#include <cmath>

namespace softqd {
namespace {

void require_nonempty(const std::vector<double>& qualities,
                      const std::vector<std::vector<double>>& descriptors) {
    if (qualities.empty() || descriptors.empty()) throw invalid_input("empty population");
    if (qualities.size() != descriptors.size())
        throw invalid_input("qualities and descriptors differ in length");
}

void require_kernel(const KernelParams& kernel) {
    if (!(kernel.sigma_sq > 0.0)) throw invalid_input("kernel sigma_sq must be positive");
}

// Margin contract shared by both integrators: every descriptor at least
// 8 sigma from every box face (tiny slack absorbs roundoff from callers that
// build the box as min - 8 sigma exactly).
void require_margin(const std::vector<std::vector<double>>& descriptors, const Box& box,
                    double sigma) {
    const double need = 8.0 * sigma - 1e-12;
    for (const auto& b : descriptors) {
        if (b.size() != box.dim()) throw invalid_input("descriptor and box dimension differ");
        for (std::size_t a = 0; a < b.size(); ++a)
            if (b[a] - box.lo[a] < need || box.hi[a] - b[a] < need)
                throw invalid_input("integration box margin below 8 sigma");
    }
}

double gauss_norm(double sigma_sq, std::size_t d) {
    return std::pow(2.0 * M_PI * sigma_sq, 0.5 * static_cast<double>(d));
}

}  // namespace

double behavior_value(const std::vector<double>& qualities,
                      const std::vector<std::vector<double>>& descriptors,
                      const std::vector<double>& b, const KernelParams& kernel) {
    require_nonempty(qualities, descriptors);
    require_kernel(kernel);
    const double inv = 1.0 / (2.0 * kernel.sigma_sq);
    double best = 0.0;
    for (std::size_t i = 0; i < qualities.size(); ++i) {
        double f = std::max(qualities[i], 0.0);
        if (f <= best) continue;  // kernel factor <= 1 can't beat best
        double v = f * std::exp(-squared_distance(descriptors[i], b) * inv);
        if (v > best) best = v;
    }
    return best;
}

Box integration_box(const std::vector<std::vector<double>>& descriptors, double sigma) {
    if (descriptors.empty()) throw invalid_input("empty population");
    const std::size_t d = descriptors.front().size();
    Box box;
    box.lo.assign(d, 0.0);
    box.hi.assign(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        double mn = descriptors.front()[a], mx = mn;
        for (const auto& b : descriptors) {
            mn = std::min(mn, b[a]);
            mx = std::max(mx, b[a]);
        }
        box.lo[a] = mn - 8.0 * sigma;
        box.hi[a] = mx + 8.0 * sigma;
    }
    return box;
}

std::vector<std::vector<double>> sample_box(const Box& box, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) {
        p.resize(box.dim());
        for (std::size_t a = 0; a < p.size(); ++a) p[a] = rng.uniform(box.lo[a], box.hi[a]);
    }
    return pts;
}

ScoreEstimate soft_qd_score_mc(const std::vector<double>& qualities,
                               const std::vector<std::vector<double>>& descriptors,
                               const KernelParams& kernel,
                               const std::vector<std::vector<double>>& sample_points,
                               const Box& box) {
    require_nonempty(qualities, descriptors);
    require_kernel(kernel);
    if (sample_points.empty()) throw invalid_input("no sample points");
    require_margin(descriptors, box, kernel.sigma());

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : sample_points) {
        double v = behavior_value(qualities, descriptors, p, kernel);
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(sample_points.size());
    const double mean = sum / n;
    double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;

    ScoreEstimate est;
    est.value = box.volume() * mean;
    est.std_error = box.volume() * std::sqrt(var / n);
    est.n_samples = sample_points.size();
    est.method = "monte_carlo";
    return est;
}

ScoreEstimate soft_qd_score_quadrature(const std::vector<double>& qualities,
                                       const std::vector<std::vector<double>>& descriptors,
                                       const KernelParams& kernel, const Box& box,
                                       std::size_t points_per_axis) {
    require_nonempty(qualities, descriptors);
    require_kernel(kernel);
    if (points_per_axis == 0) throw invalid_input("points_per_axis must be positive");
    const std::size_t d = box.dim();
    if (d > 3) throw invalid_input("quadrature supports d <= 3, got d = " + std::to_string(d));
    require_margin(descriptors, box, kernel.sigma());

    std::vector<double> step(d), point(d);
    double cell = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
        step[a] = (box.hi[a] - box.lo[a]) / static_cast<double>(points_per_axis);
        cell *= step[a];
    }

    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= points_per_axis;

    double sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t a = 0; a < d; ++a) {
            std::size_t k = rem % points_per_axis;
            rem /= points_per_axis;
            point[a] = box.lo[a] + (static_cast<double>(k) + 0.5) * step[a];
        }
        sum += behavior_value(qualities, descriptors, point, kernel);
    }

    ScoreEstimate est;
    est.value = sum * cell;
    est.std_error = 0.0;
    est.n_samples = total;
    est.method = "grid_quadrature";
    return est;
}

double lower_bound_full(const std::vector<double>& qualities,
                        const std::vector<std::vector<double>>& descriptors,
                        const KernelParams& kernel) {
    require_nonempty(qualities, descriptors);
    require_kernel(kernel);
    for (std::size_t i = 0; i < qualities.size(); ++i)
        if (qualities[i] < 0.0)
            throw invalid_input("lower_bound_full requires nonnegative qualities (index " +
                                std::to_string(i) + ")");

    const std::size_t n = qualities.size();
    const double inv = 1.0 / (8.0 * kernel.sigma_sq);
    double acc = 0.0;
    for (double f : qualities) acc += f;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            acc -= std::sqrt(qualities[i] * qualities[j]) *
                   std::exp(-squared_distance(descriptors[i], descriptors[j]) * inv);
    return gauss_norm(kernel.sigma_sq, descriptors.front().size()) * acc;
}

double squad_objective(const std::vector<double>& qualities,
                       const std::vector<std::vector<double>>& descriptors,
                       const std::vector<std::vector<int>>& neighbor_lists, double gamma_sq) {
    require_nonempty(qualities, descriptors);
    if (!(gamma_sq > 0.0)) throw invalid_input("gamma_sq must be positive");
    if (neighbor_lists.size() != qualities.size())
        throw invalid_input("neighbor_lists length differs from population");

    const int n = static_cast<int>(qualities.size());
    double quality_term = 0.0;
    for (double f : qualities) quality_term += f;

    double repulsion = 0.0;
    for (int i = 0; i < n; ++i) {
        double fi = std::max(qualities[i], 0.0);
        for (int j : neighbor_lists[i]) {
            if (j < 0 || j >= n || j == i)
                throw invalid_input("neighbor index out of range for solution " +
                                    std::to_string(i));
            double fj = std::max(qualities[j], 0.0);
            repulsion += std::sqrt(fi * fj) *
                         std::exp(-squared_distance(descriptors[i], descriptors[j]) / gamma_sq);
        }
    }
    return quality_term - 0.5 * repulsion;
}

ErrorBounds error_bounds(const std::vector<double>& qualities,
                         const std::vector<std::vector<double>>& descriptors,
                         const KernelParams& kernel) {
    require_nonempty(qualities, descriptors);
    require_kernel(kernel);
    for (std::size_t i = 0; i < qualities.size(); ++i)
        if (qualities[i] < 0.0)
            throw invalid_input("error_bounds requires nonnegative qualities (index " +
                                std::to_string(i) + ")");

    const std::size_t n = qualities.size();
    const std::size_t d = descriptors.front().size();
    const double norm = gauss_norm(kernel.sigma_sq, d);
    const double sigma = kernel.sigma();

    std::vector<double> pair_sq(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pair_sq[i * n + j] = squared_distance(descriptors[i], descriptors[j]);

    double eps1 = 0.0;
    const double inv18 = 1.0 / (18.0 * kernel.sigma_sq);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                eps1 += std::cbrt(qualities[i] * qualities[j] * qualities[k]) *
                        std::exp(-(pair_sq[i * n + j] + pair_sq[i * n + k] + pair_sq[j * n + k]) *
                                 inv18);
    eps1 *= norm;

    double eps2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            eps2 += std::abs(qualities[i] - qualities[j]) +
                    std::min(qualities[i], qualities[j]) * std::sqrt(pair_sq[i * n + j]) / sigma;
    eps2 *= norm;

    return {eps1, eps2};
}

double bonferroni_partial_sums(const std::vector<double>& values, int order) {
    if (values.empty()) throw invalid_input("empty value list");
    if (order != 2 && order != 3) throw invalid_input("order must be 2 or 3");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] >= 0.0))
            throw invalid_input("bonferroni_partial_sums requires nonnegative values (index " +
                                std::to_string(i) + ")");
    const std::size_t n = values.size();

    double s1 = 0.0;
    for (double v : values) s1 += v;

    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s2 += std::min(values[i], values[j]);
    if (order == 2) return s1 - s2;

    double s3 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                s3 += std::min(values[i], std::min(values[j], values[k]));
    return s1 - s2 + s3;
}

}  // namespace softqd
