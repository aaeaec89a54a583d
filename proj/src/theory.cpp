#include "softqd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace softqd {
namespace {

struct EvalSet {
    std::vector<double> qualities;
    std::vector<std::vector<double>> descriptors;
};

EvalSet random_eval_set(Rng& rng, std::size_t n, std::size_t d, double q_lo = 0.0,
                        double q_hi = 10.0) {
    EvalSet set;
    set.qualities.resize(n);
    set.descriptors.assign(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        set.qualities[i] = rng.uniform(q_lo, q_hi);
        for (double& x : set.descriptors[i]) x = rng.uniform01();
    }
    return set;
}

// Joint box over several descriptor sets, margin 8 sigma, so shared samples
// are legal for every subset involved in a comparison.
Box joint_box(const std::vector<const std::vector<std::vector<double>>*>& groups, double sigma) {
    std::vector<std::vector<double>> all;
    for (const auto* g : groups) all.insert(all.end(), g->begin(), g->end());
    return integration_box(all, sigma);
}

std::size_t grid_points(const Box& box, double sigma, double step_frac, std::size_t cap) {
    double width = 0.0;
    for (std::size_t a = 0; a < box.dim(); ++a) width = std::max(width, box.hi[a] - box.lo[a]);
    auto pts = static_cast<std::size_t>(std::ceil(width / (sigma * step_frac)));
    return std::clamp<std::size_t>(pts, 16, cap);
}

void record(PropertyReport& rep, double margin) {
    ++rep.trials;
    if (!(margin >= 0.0)) ++rep.failures;
    rep.worst_margin = std::min(rep.worst_margin, margin);
}

}  // namespace

PropertyReport check_bound_sandwich(std::size_t trials, std::uint64_t seed) {
    PropertyReport rep{"bound_sandwich", 0, 0, std::numeric_limits<double>::infinity()};
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n = 1 + rng.below(6);
        std::size_t d = 1 + rng.below(2);
        double sigma = rng.uniform(0.1, 1.0);
        KernelParams kernel{sigma * sigma};
        EvalSet set = random_eval_set(rng, n, d);

        Box box = integration_box(set.descriptors, kernel.sigma());
        std::size_t pts = grid_points(box, kernel.sigma(), 1.0 / 6.0, 1400);
        double coarse =
            soft_qd_score_quadrature(set.qualities, set.descriptors, kernel, box, pts).value;
        double fine =
            soft_qd_score_quadrature(set.qualities, set.descriptors, kernel, box, 2 * pts).value;
        double tol = 4.0 * std::abs(fine - coarse) + 1e-9;

        double lb = lower_bound_full(set.qualities, set.descriptors, kernel);
        ErrorBounds eps = error_bounds(set.qualities, set.descriptors, kernel);

        // both inequalities must hold; the trial margin is the tighter one
        record(rep, std::min(fine + tol - lb, eps.total() + tol - (fine - lb)));
    }
    return rep;
}

PropertyReport check_monotone_add(std::size_t trials, std::uint64_t seed) {
    PropertyReport rep{"monotone_add", 0, 0, std::numeric_limits<double>::infinity()};
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n = 1 + rng.below(6);
        std::size_t d = 1 + rng.below(2);
        KernelParams kernel{rng.uniform(0.01, 1.0)};
        EvalSet base = random_eval_set(rng, n, d);
        EvalSet grown = base;
        grown.qualities.push_back(rng.uniform(0.0, 10.0));
        grown.descriptors.push_back(random_eval_set(rng, 1, d).descriptors.front());

        Box box = joint_box({&grown.descriptors}, kernel.sigma());
        auto samples = sample_box(box, 2048, rng.raw());
        double before =
            soft_qd_score_mc(base.qualities, base.descriptors, kernel, samples, box).value;
        double after =
            soft_qd_score_mc(grown.qualities, grown.descriptors, kernel, samples, box).value;
        record(rep, after - before);
    }
    return rep;
}

PropertyReport check_monotone_quality(std::size_t trials, std::uint64_t seed) {
    PropertyReport rep{"monotone_quality", 0, 0, std::numeric_limits<double>::infinity()};
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n = 1 + rng.below(6);
        std::size_t d = 1 + rng.below(2);
        KernelParams kernel{rng.uniform(0.01, 1.0)};
        // qualities may start negative: the clamp inside the kernel turns
        // small raises of a negative quality into exact equality
        EvalSet base = random_eval_set(rng, n, d, -2.0, 10.0);
        EvalSet raised = base;
        raised.qualities[rng.below(n)] += rng.uniform(0.0, 5.0);

        Box box = joint_box({&base.descriptors}, kernel.sigma());
        auto samples = sample_box(box, 2048, rng.raw());
        double before =
            soft_qd_score_mc(base.qualities, base.descriptors, kernel, samples, box).value;
        double after =
            soft_qd_score_mc(raised.qualities, raised.descriptors, kernel, samples, box).value;
        record(rep, after - before);
    }
    return rep;
}

PropertyReport check_submodular(std::size_t trials, std::uint64_t seed) {
    PropertyReport rep{"submodular", 0, 0, std::numeric_limits<double>::infinity()};
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n = 2 + rng.below(7);  // ground set size
        std::size_t d = 1 + rng.below(2);
        KernelParams kernel{rng.uniform(0.01, 1.0)};
        EvalSet ground = random_eval_set(rng, n + 1, d);  // last entry = extra

        // U subset of V subset of ground \ {extra}
        std::vector<std::size_t> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        std::size_t nv = rng.below(n + 1);
        std::size_t nu = nv == 0 ? 0 : rng.below(nv + 1);

        auto subset = [&](std::size_t count) {
            EvalSet s;
            for (std::size_t i = 0; i < count; ++i) {
                s.qualities.push_back(ground.qualities[shuffled[i]]);
                s.descriptors.push_back(ground.descriptors[shuffled[i]]);
            }
            return s;
        };
        EvalSet u = subset(nu), v = subset(nv);
        double fe = std::max(ground.qualities[n], 0.0);
        const auto& be = ground.descriptors[n];

        Box box = joint_box({&ground.descriptors}, kernel.sigma());
        auto samples = sample_box(box, 2048, rng.raw());

        // Pointwise marginal gain of the extra solution; per-sample terms
        // already satisfy gain_u >= gain_v exactly, so the averaged margin
        // is sign-exact.
        const double inv = 1.0 / (2.0 * kernel.sigma_sq);
        double margin_sum = 0.0;
        for (const auto& s : samples) {
            double ge = fe * std::exp(-squared_distance(be, s) * inv);
            double vu = u.qualities.empty()
                            ? 0.0
                            : behavior_value(u.qualities, u.descriptors, s, kernel);
            double vv = v.qualities.empty()
                            ? 0.0
                            : behavior_value(v.qualities, v.descriptors, s, kernel);
            double gain_u = ge > vu ? ge - vu : 0.0;
            double gain_v = ge > vv ? ge - vv : 0.0;
            margin_sum += gain_u - gain_v;
        }
        record(rep, box.volume() * margin_sum / static_cast<double>(samples.size()));
    }
    return rep;
}

PropertyReport check_limit_equivalence(std::size_t populations, std::uint64_t seed) {
    PropertyReport rep{"limit_equivalence", 0, 0, std::numeric_limits<double>::infinity()};
    Rng rng(seed);
    for (std::size_t t = 0; t < populations; ++t) {
        std::size_t d = 1 + rng.below(2);
        // d = 1 holds at most a handful of well-separated points, so the
        // size range shrinks with the dimension; the whole set is redrawn
        // until the spacing holds (incremental rejection can strand itself
        // in a configuration no further point fits)
        std::size_t n = 2 + rng.below(d == 1 ? 2 : 4);
        const double min_dist_sq = 0.2 * 0.2;
        EvalSet set;
        set.qualities.resize(n);
        for (double& q : set.qualities) q = rng.uniform(0.5, 10.0);
        for (bool spaced = false; !spaced;) {
            set.descriptors.assign(n, std::vector<double>(d));
            for (auto& b : set.descriptors)
                for (double& x : b) x = rng.uniform01();
            spaced = true;
            for (std::size_t i = 0; i < n && spaced; ++i)
                for (std::size_t j = i + 1; j < n && spaced; ++j)
                    spaced = squared_distance(set.descriptors[i], set.descriptors[j]) >=
                             min_dist_sq;
        }

        double r_sq = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                r_sq = std::min(r_sq, squared_distance(set.descriptors[i], set.descriptors[j]));
        const double r = std::sqrt(r_sq);

        double f_sum = 0.0;
        for (double q : set.qualities) f_sum += q;

        double prev_dev = std::numeric_limits<double>::infinity();
        double final_dev = 0.0;
        bool shrinking = true;
        for (double sigma : {r / 2.0, r / 4.0, r / 10.0}) {
            KernelParams kernel{sigma * sigma};
            Box box = integration_box(set.descriptors, sigma);
            std::size_t pts = grid_points(box, sigma, 1.0 / 8.0, d == 1 ? 4000 : 700);
            double s =
                soft_qd_score_quadrature(set.qualities, set.descriptors, kernel, box, pts).value;
            double scaled = s / std::pow(2.0 * M_PI * sigma * sigma, 0.5 * d);
            double dev = std::abs(scaled - f_sum);
            shrinking = shrinking && dev <= prev_dev * 1.01 + 1e-9;
            prev_dev = dev;
            final_dev = dev;
        }

        double margin = 0.01 * f_sum - final_dev;
        if (!shrinking) margin = std::min(margin, -1.0);
        record(rep, margin);
    }
    return rep;
}

std::vector<PropertyReport> run_all_checks(std::uint64_t seed) {
    return {check_bound_sandwich(100, seed), check_monotone_add(200, seed + 1),
            check_monotone_quality(200, seed + 2), check_submodular(500, seed + 3),
            check_limit_equivalence(20, seed + 4)};
}

}  // namespace softqd
