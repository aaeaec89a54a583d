#include "softqd/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace softqd {

void MapElitesConfig::validate() const {
    if (archive_cells == 0) throw invalid_input("archive_cells must be positive");
    if (total_evals == 0) throw invalid_input("total_evals must be positive");
    if (sigma_line < 0.0) throw invalid_input("sigma_line must be nonnegative");
    if (gradient_assist && eta_g < 0.0) throw invalid_input("eta_g must be nonnegative");
}

std::vector<double> iso_line_mutate(const std::vector<double>& x1, const std::vector<double>& x2,
                                    double sigma_iso, double sigma_line, Rng& rng) {
    if (x1.size() != x2.size()) throw invalid_input("iso_line_mutate: parent dimensions differ");
    if (sigma_iso < 0.0 || sigma_line < 0.0)
        throw invalid_input("iso_line_mutate: sigmas must be nonnegative");
    std::vector<double> child(x1.size());
    for (std::size_t a = 0; a < x1.size(); ++a) child[a] = x1[a] + sigma_iso * rng.normal();
    double u = rng.normal();
    for (std::size_t a = 0; a < x1.size(); ++a) child[a] += sigma_line * u * (x2[a] - x1[a]);
    return child;
}

namespace {

void clamp_to_box(std::vector<double>& x, double lo, double hi) {
    for (double& v : x) v = std::clamp(v, lo, hi);
}

}  // namespace

MapElitesResult run_map_elites_in(const ProblemDefinition& problem, const MapElitesConfig& config,
                                  std::uint64_t seed, CvtArchive archive,
                                  const MapElitesProgress& progress) {
    config.validate();
    if (archive.dim != problem.behavior_dim())
        throw invalid_input("archive dimension differs from the problem");
    auto [lo, hi] = problem.solution_bounds();
    const double sigma_iso = config.sigma_iso > 0.0 ? config.sigma_iso : 0.01 * (hi - lo);

    MapElitesResult res;
    res.archive = std::move(archive);
    res.elite_params.assign(res.archive.cells(), {});
    std::vector<std::size_t> occupied_cells;
    occupied_cells.reserve(res.archive.cells());

    Rng rng(seed);
    const int p = problem.solution_dim();
    std::vector<double> x1, x2;

    auto random_solution = [&]() {
        std::vector<double> x(p);
        for (double& v : x) v = rng.uniform(lo, hi);
        return x;
    };

    // Gradient-assisted children consume a gradient evaluation at the
    // mutated point plus the plain evaluation of the stepped child; a lone
    // trailing budget unit falls back to a plain child, so the budget is
    // consumed exactly.
    Evaluation grad_ev;
    std::vector<double> grad_quality, jac;
    std::size_t next_report =
        config.report_every > 0 ? config.report_every : config.total_evals + 1;

    while (res.eval_count < config.total_evals) {
        bool assist =
            config.gradient_assist && res.eval_count + 2 <= config.total_evals;

        if (occupied_cells.size() < 2) {
            x1 = random_solution();
            x2 = random_solution();
        } else {
            x1 = res.elite_params[occupied_cells[rng.below(occupied_cells.size())]];
            x2 = res.elite_params[occupied_cells[rng.below(occupied_cells.size())]];
        }

        std::vector<double> child = iso_line_mutate(x1, x2, sigma_iso, config.sigma_line, rng);
        clamp_to_box(child, lo, hi);

        if (assist) {
            problem.evaluate_with_grads(child, grad_ev, grad_quality, jac);
            ++res.eval_count;
            for (int a = 0; a < p; ++a) child[a] += config.eta_g * grad_quality[a];
            clamp_to_box(child, lo, hi);
        }

        Evaluation ev = problem.evaluate(child);
        if (!std::isfinite(ev.quality) || !all_finite(ev.descriptor))
            throw eval_error("non-finite evaluation in map-elites");
        ++res.eval_count;
        std::size_t cell = nearest_cell(res.archive, ev.descriptor);
        bool was_occupied = res.archive.occupied[cell] != 0;
        if (!was_occupied || ev.quality > res.archive.cell_quality[cell]) {
            res.archive.occupied[cell] = 1;
            res.archive.cell_quality[cell] = ev.quality;
            res.archive.cell_descriptor[cell] = std::move(ev.descriptor);
            res.archive.solution_ref[cell] = static_cast<std::int64_t>(cell);
            res.elite_params[cell] = std::move(child);
            if (!was_occupied) occupied_cells.push_back(cell);
        }

        if (progress && res.eval_count >= next_report) {
            progress(res.eval_count, res);
            next_report = res.eval_count + std::max<std::size_t>(config.report_every, 1);
        }
    }
    if (progress) progress(res.eval_count, res);
    return res;
}

MapElitesResult run_map_elites(const ProblemDefinition& problem, const MapElitesConfig& config,
                               std::uint64_t seed, const MapElitesProgress& progress) {
    config.validate();
    CvtArchive archive = build_cvt(problem.behavior_dim(), config.archive_cells, config.cvt_seed);
    return run_map_elites_in(problem, config, seed, std::move(archive), progress);
}

}  // namespace softqd
