#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "softqd/metrics.hpp"
#include "softqd/population.hpp"

namespace softqd {

struct MapElitesConfig {
    std::size_t archive_cells = 10000;
    std::size_t total_evals = 0;       // must be set by the caller
    double sigma_iso = 0.0;            // <= 0: default 0.01 * box width
    double sigma_line = 0.2;
    bool gradient_assist = false;      // GA-ME: one quality-gradient step per child
    double eta_g = 0.05;
    std::uint64_t cvt_seed = 42;
    std::size_t report_every = 0;      // progress cadence in evals; 0 = end only

    void validate() const;
};

struct MapElitesResult {
    CvtArchive archive;
    std::vector<std::vector<double>> elite_params;  // indexed by cell
    std::size_t eval_count = 0;
};

using MapElitesProgress = std::function<void(std::size_t, const MapElitesResult&)>;

// Iso+line variation: child = x1 + sigma_iso * g + sigma_line * u * (x2 - x1)
// with g a standard normal vector and u a scalar standard normal.
std::vector<double> iso_line_mutate(const std::vector<double>& x1, const std::vector<double>& x2,
                                    double sigma_iso, double sigma_line, Rng& rng);

// CVT MAP-Elites: sample two elites (uniform random solutions while the
// archive holds fewer than two), mutate, clamp to the search box, optionally
// take one quality-gradient step (counted as an evaluation), evaluate,
// insert elitist. Consumes exactly total_evals evaluations.
MapElitesResult run_map_elites(const ProblemDefinition& problem, const MapElitesConfig& config,
                               std::uint64_t seed, const MapElitesProgress& progress = {});

// Same loop with a caller-supplied (typically cached) archive tessellation.
MapElitesResult run_map_elites_in(const ProblemDefinition& problem, const MapElitesConfig& config,
                                  std::uint64_t seed, CvtArchive archive,
                                  const MapElitesProgress& progress = {});

}  // namespace softqd
