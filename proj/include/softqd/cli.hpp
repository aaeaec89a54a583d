#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softqd/population.hpp"

namespace softqd {

// Flat key = value run configuration. Unset numeric fields keep defaults;
// gamma_sq = 0 selects the per-domain default (lp-4: 0.1, lp-8: 0.5,
// lp-16: 1.0, hill: 0.1).
struct RunConfig {
    std::string domain = "lp-4";
    std::string algorithm = "squad";  // squad | map-elites | ga-me
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string out_dir = "runs/out";

    // optimizer
    std::size_t population_size = 1024;
    std::size_t batch_size = 64;
    std::size_t neighbors = 16;
    std::size_t epochs = 1000;
    double learning_rate = 0.05;
    double gamma_sq = 0.0;
    bool logit_transform = true;
    bool knn_on_transformed = true;
    double clip_eps = 1e-6;

    // metrics
    std::size_t metric_interval = 100;
    std::size_t metrics_cells = 512;
    std::uint64_t metrics_cvt_seed = 42;
    double sigma_v_sq = 0.0;        // 0: default d/6
    std::size_t vendi_max_n = 1024; // archives larger than this are strided
    std::string cvt_cache_dir;      // empty: out_dir

    // baselines
    std::size_t archive_cells = 10000;
    std::size_t total_evals = 0;  // 0: parity with population_size*(epochs+1)
    double sigma_iso = 0.0;       // 0: default 0.01 * box width
    double sigma_line = 0.2;
    double eta_g = 0.05;
    std::uint64_t me_cvt_seed = 42;

    // domain
    bool descriptor_formula_scaling = false;

    bool write_svg = true;
};

// Parses `key = value` lines ('#' comments, blank lines ok). Unknown keys and
// malformed values are rejected with the offending line in the message.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

double default_gamma_sq(const std::string& domain);

// Subcommand bodies; each returns a process exit code (0 ok, 1 usage,
// 2 runtime, 3 property failure) and writes outputs under config.out_dir.
int cmd_run(RunConfig config);
int cmd_sweep(RunConfig config, const std::string& parameter,
              const std::vector<std::string>& values);
int cmd_check(std::uint64_t seed);

}  // namespace softqd
