#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "softqd/cli.hpp"
#include "softqd/domains.hpp"
#include "softqd/metrics.hpp"
#include "softqd/population.hpp"

using namespace softqd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

// Drops the trailing wall-time cell of every data row.
std::string strip_last_column(const std::string& csv) {
    std::ostringstream out;
    for (const auto& line : lines_of(csv)) out << line.substr(0, line.rfind(',')) << "\n";
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("softqd_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path shared_cvt_cache() {
    static fs::path p = fs::temp_directory_path() / "softqd_cli_cvt_cache";
    fs::create_directories(p);
    return p;
}

RunConfig small_hill_config(const std::string& out) {
    RunConfig cfg;
    cfg.domain = "hill";
    cfg.algorithm = "squad";
    cfg.seeds = {1};
    cfg.out_dir = out;
    cfg.population_size = 16;
    cfg.batch_size = 4;
    cfg.neighbors = 3;
    cfg.epochs = 5;
    cfg.gamma_sq = 0.5;
    cfg.metric_interval = 2;
    cfg.metrics_cells = 16;
    cfg.cvt_cache_dir = shared_cvt_cache().string();
    cfg.write_svg = false;
    return cfg;
}

}  // namespace

TEST_CASE("config text parses keys, comments and seed lists") {
    RunConfig cfg = parse_config_text(
        "# comment\n"
        "domain = lp-16\n"
        "\n"
        "algorithm = map-elites\n"
        "seeds = 4, 5,6\n"
        "learning_rate = 0.125\n"
        "logit_transform = false\n"
        "epochs = 42\n");
    CHECK(cfg.domain == "lp-16");
    CHECK(cfg.algorithm == "map-elites");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5, 6});
    CHECK(cfg.learning_rate == 0.125);
    CHECK(cfg.logit_transform == false);
    CHECK(cfg.epochs == 42);
    // untouched keys keep defaults
    CHECK(cfg.population_size == 1024);
    CHECK(cfg.gamma_sq == 0.0);
}

TEST_CASE("config text rejects malformed input with the offending line") {
    CHECK_THROWS_WITH_AS(parse_config_text("nonsense_key = 3\n"),
                         doctest::Contains("unknown key 'nonsense_key'"), invalid_input);
    CHECK_THROWS_WITH_AS(parse_config_text("epochs = twelve\n"),
                         doctest::Contains("bad integer"), invalid_input);
    CHECK_THROWS_WITH_AS(parse_config_text("learning_rate = fast\n"),
                         doctest::Contains("bad number"), invalid_input);
    CHECK_THROWS_WITH_AS(parse_config_text("logit_transform = maybe\n"),
                         doctest::Contains("bad boolean"), invalid_input);
    CHECK_THROWS_WITH_AS(parse_config_text("domain lp-4\n"), doctest::Contains("line 1"),
                         invalid_input);
    CHECK_THROWS_AS(parse_config_text("seeds = \n"), invalid_input);
}

TEST_CASE("default gamma squared per domain") {
    CHECK(default_gamma_sq("lp-4") == 0.1);
    CHECK(default_gamma_sq("lp-8") == 0.5);
    CHECK(default_gamma_sq("lp-16") == 1.0);
    CHECK(default_gamma_sq("hill") == 0.1);
}

TEST_CASE("load_config reads files and rejects missing ones") {
    TempDir tmp("loadcfg");
    fs::path file = tmp.path / "run.cfg";
    std::ofstream(file) << "domain = lp-8\nepochs = 3\n";
    RunConfig cfg = load_config(file.string());
    CHECK(cfg.domain == "lp-8");
    CHECK(cfg.epochs == 3);
    CHECK_THROWS_AS(load_config((tmp.path / "absent.cfg").string()), invalid_input);
}

TEST_CASE("cmd_run with zero epochs reports the initial population") {
    TempDir tmp("zeroep");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.epochs = 0;
    CHECK(cmd_run(cfg) == 0);

    auto metrics = lines_of(slurp(tmp.path / "out" / "metrics_1.csv"));
    REQUIRE(metrics.size() == 2);  // header plus the single epoch-0 row
    CHECK(metrics[0] ==
          "epoch,qd_score,coverage,vendi,qvs,mean_obj,max_obj,s_tilde");
    CHECK(metrics[1].substr(0, 2) == "0,");

    auto iters = lines_of(slurp(tmp.path / "out" / "iterations_1.csv"));
    CHECK(iters.size() == 1);  // header only

    Population pop = load_population((tmp.path / "out" / "population_1.json").string());
    Population expect = seeded_random_population(*make_problem("hill"), 16, 1, -3.0, 3.0);
    CHECK(pop.params == expect.params);
    CHECK(pop.qualities == expect.qualities);

    CHECK(slurp(tmp.path / "out" / "summary.json").find("\"qd_score\"") != std::string::npos);
}

TEST_CASE("cmd_run is deterministic across repeats") {
    TempDir tmp("determ");
    RunConfig a = small_hill_config((tmp.path / "a").string());
    RunConfig b = small_hill_config((tmp.path / "b").string());
    CHECK(cmd_run(a) == 0);
    CHECK(cmd_run(b) == 0);

    CHECK(slurp(tmp.path / "a" / "metrics_1.csv") == slurp(tmp.path / "b" / "metrics_1.csv"));
    CHECK(slurp(tmp.path / "a" / "population_1.json") ==
          slurp(tmp.path / "b" / "population_1.json"));
    CHECK(slurp(tmp.path / "a" / "summary.json") == slurp(tmp.path / "b" / "summary.json"));
    // iteration logs match once the wall-time column is stripped
    CHECK(strip_last_column(slurp(tmp.path / "a" / "iterations_1.csv")) ==
          strip_last_column(slurp(tmp.path / "b" / "iterations_1.csv")));

    auto iters = lines_of(slurp(tmp.path / "a" / "iterations_1.csv"));
    CHECK(iters.size() == 6);  // header plus five epochs
}

TEST_CASE("metric cadence covers first, interval and final epochs") {
    TempDir tmp("cadence");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.epochs = 5;
    cfg.metric_interval = 2;
    CHECK(cmd_run(cfg) == 0);
    auto metrics = lines_of(slurp(tmp.path / "out" / "metrics_1.csv"));
    REQUIRE(metrics.size() == 5);  // header + epochs 0, 2, 4, 5
    CHECK(metrics[1].substr(0, 2) == "0,");
    CHECK(metrics[2].substr(0, 2) == "2,");
    CHECK(metrics[3].substr(0, 2) == "4,");
    CHECK(metrics[4].substr(0, 2) == "5,");
}

TEST_CASE("cmd_run drives the baselines with budget parity") {
    TempDir tmp("mapelites");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.algorithm = "map-elites";
    cfg.archive_cells = 16;
    cfg.epochs = 4;          // parity: 16 * 5 = 80 evaluations
    cfg.metric_interval = 2;  // report every 32 evaluations
    CHECK(cmd_run(cfg) == 0);

    auto metrics = lines_of(slurp(tmp.path / "out" / "metrics_1.csv"));
    CHECK(metrics.size() >= 3);
    Population pop = load_population((tmp.path / "out" / "population_1.json").string());
    CHECK(pop.size() > 0);
    CHECK(pop.size() <= 16);

    RunConfig ga = small_hill_config((tmp.path / "ga").string());
    ga.algorithm = "ga-me";
    ga.archive_cells = 16;
    ga.epochs = 4;
    CHECK(cmd_run(ga) == 0);
    CHECK(fs::exists(tmp.path / "ga" / "summary.json"));
}

TEST_CASE("cmd_run rejects unknown algorithms and domains") {
    TempDir tmp("badalgo");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.algorithm = "annealing";
    CHECK_THROWS_AS(cmd_run(cfg), invalid_input);
    cfg.algorithm = "squad";
    cfg.domain = "lp-5";
    CHECK_THROWS_AS(cmd_run(cfg), invalid_input);
    // config errors surface before any output directory appears
    CHECK_FALSE(fs::exists(tmp.path / "out"));
}

TEST_CASE("cmd_sweep writes one tidy row per value and seed") {
    TempDir tmp("sweep");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.seeds = {1, 2};
    cfg.epochs = 2;
    CHECK(cmd_sweep(cfg, "gamma_sq", {"0.1", "1.0"}) == 0);

    auto rows = lines_of(slurp(tmp.path / "out" / "sweep.csv"));
    REQUIRE(rows.size() == 5);  // header + 2 values x 2 seeds
    CHECK(rows[0] ==
          "parameter,value,seed,qd_score,coverage,vendi,qvs,mean_obj,max_obj,s_tilde");
    CHECK(rows[1].substr(0, 12) == "gamma_sq,0.1");
    CHECK(rows[3].substr(0, 12) == "gamma_sq,1.0");
    CHECK(fs::exists(tmp.path / "out" / "gamma_sq_0.1" / "metrics_2.csv"));
    CHECK(fs::exists(tmp.path / "out" / "gamma_sq_1.0" / "metrics_1.csv"));

    CHECK_THROWS_AS(cmd_sweep(cfg, "domain", {"lp-4"}), invalid_input);
    CHECK_THROWS_AS(cmd_sweep(cfg, "gamma_sq", {}), invalid_input);
}

TEST_CASE("logit_transform sweep accepts boolean values") {
    TempDir tmp("sweepbool");
    RunConfig cfg = small_hill_config((tmp.path / "out").string());
    cfg.epochs = 1;
    CHECK(cmd_sweep(cfg, "logit_transform", {"true", "false"}) == 0);
    auto rows = lines_of(slurp(tmp.path / "out" / "sweep.csv"));
    CHECK(rows.size() == 3);
}
