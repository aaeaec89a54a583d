#include "softqd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "softqd/baselines.hpp"
#include "softqd/domains.hpp"
#include "softqd/metrics.hpp"
#include "softqd/soft_score.hpp"
#include "softqd/squad.hpp"
#include "softqd/theory.hpp"

namespace fs = std::filesystem;

namespace softqd {
namespace {

// Shortest round-trip decimal; keeps reruns byte-identical and JSON/CSV
// loads bit-exact.
std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw invalid_input("config: bad boolean for '" + key + "': " + v);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw invalid_input("config: bad number for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw invalid_input("config: bad integer for '" + key + "': " + v);
    }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) seeds.push_back(parse_u64(item, "seeds"));
    }
    if (seeds.empty()) throw invalid_input("config: 'seeds' needs at least one value");
    return seeds;
}

struct FinalMetrics {
    MetricsReport rep;
    double s_tilde = 0.0;
};

// Exact all-pairs objective on the population, in the space the optimizer
// repels in.
double all_pairs_objective(const Population& pop, const RunConfig& cfg, double gamma_sq) {
    const std::size_t n = pop.size();
    std::vector<std::vector<double>> desc;
    const std::vector<std::vector<double>>* space = &pop.descriptors;
    if (cfg.logit_transform) {
        desc.reserve(n);
        for (const auto& b : pop.descriptors) desc.push_back(logit_transform(b, cfg.clip_eps));
        space = &desc;
    }
    double quality = 0.0, repulsion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quality += pop.qualities[i];
        double fi = std::max(pop.qualities[i], 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            double fj = std::max(pop.qualities[j], 0.0);
            repulsion += std::sqrt(fi * fj) *
                         std::exp(-squared_distance((*space)[i], (*space)[j]) / gamma_sq);
        }
    }
    return quality - repulsion;
}

class CsvWriter {
  public:
    CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// Quality-colored descriptor scatter (first two coordinates), fixed-size SVG.
void write_scatter_svg(const fs::path& path, const Population& pop) {
    if (pop.behavior_dim < 2 || pop.size() == 0) return;
    double q_lo = pop.qualities.front(), q_hi = q_lo;
    for (double q : pop.qualities) {
        q_lo = std::min(q_lo, q);
        q_hi = std::max(q_hi, q);
    }
    const double span = q_hi > q_lo ? q_hi - q_lo : 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const int size = 640, pad = 40, plot = size - 2 * pad;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << " " << size << "\">\n"
        << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n"
        << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << plot << "\" height=\""
        << plot << "\" fill=\"none\" stroke=\"#444\"/>\n";
    char buf[256];
    for (std::size_t i = 0; i < pop.size(); ++i) {
        double x = pad + plot * std::clamp(pop.descriptors[i][0], 0.0, 1.0);
        double y = size - pad - plot * std::clamp(pop.descriptors[i][1], 0.0, 1.0);
        double tnorm = (pop.qualities[i] - q_lo) / span;
        // blue (low) through yellow to red (high)
        int r, g, b;
        if (tnorm < 0.5) {
            double u = tnorm * 2.0;
            r = static_cast<int>(44 + u * (255 - 44));
            g = static_cast<int>(123 + u * (255 - 123));
            b = static_cast<int>(182 + u * (191 - 182));
        } else {
            double u = (tnorm - 0.5) * 2.0;
            r = static_cast<int>(255 - u * (255 - 215));
            g = static_cast<int>(255 - u * (255 - 25));
            b = static_cast<int>(191 - u * (191 - 28));
        }
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"rgb(%d,%d,%d)\" "
                      "fill-opacity=\"0.8\"/>\n",
                      x, y, r, g, b);
        out << buf;
    }
    out << "<text x=\"" << size / 2 << "\" y=\"" << size - 10
        << "\" text-anchor=\"middle\" font-size=\"14\">descriptor 1</text>\n"
        << "<text x=\"14\" y=\"" << size / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
        << "transform=\"rotate(-90 14 " << size / 2 << ")\">descriptor 2</text>\n</svg>\n";
}

// CVT tessellations are expensive at 10^4 cells; cache them as JSON keyed by
// (dim, cells, seed) so repeated runs and the sweep share one build.
CvtArchive cached_cvt(int dim, std::size_t cells, std::uint64_t seed, const fs::path& cache_dir) {
    fs::create_directories(cache_dir);
    fs::path file = cache_dir / ("cvt_d" + std::to_string(dim) + "_c" + std::to_string(cells) +
                                 "_s" + std::to_string(seed) + ".json");
    if (fs::exists(file)) return load_cvt(file.string());
    CvtArchive archive = build_cvt(dim, cells, seed);
    save_cvt(archive, file.string());
    return archive;
}

Population elites_population(const MapElitesResult& me, int behavior_dim) {
    Population pop;
    pop.behavior_dim = behavior_dim;
    for (std::size_t c = 0; c < me.archive.cells(); ++c) {
        if (!me.archive.occupied[c]) continue;
        pop.params.push_back(me.elite_params[c]);
        pop.qualities.push_back(me.archive.cell_quality[c]);
        pop.descriptors.push_back(me.archive.cell_descriptor[c]);
    }
    pop.solution_dim = pop.params.empty() ? 0 : static_cast<int>(pop.params.front().size());
    return pop;
}

// Large elite sets are strided down before the Vendi eigendecomposition;
// QD score and coverage always use the full set.
Population stride_cap(const Population& pop, std::size_t cap) {
    if (pop.size() <= cap) return pop;
    Population out;
    out.solution_dim = pop.solution_dim;
    out.behavior_dim = pop.behavior_dim;
    const double step = static_cast<double>(pop.size()) / static_cast<double>(cap);
    for (std::size_t i = 0; i < cap; ++i) {
        auto idx = static_cast<std::size_t>(i * step);
        out.params.push_back(pop.params[idx]);
        out.qualities.push_back(pop.qualities[idx]);
        out.descriptors.push_back(pop.descriptors[idx]);
    }
    return out;
}

struct SeedOutcome {
    FinalMetrics final;
    std::size_t eval_count = 0;
};

SquadConfig squad_config_from(const RunConfig& cfg) {
    SquadConfig sq;
    sq.population_size = cfg.population_size;
    sq.batch_size = cfg.batch_size;
    sq.neighbors = cfg.neighbors;
    sq.epochs = cfg.epochs;
    sq.learning_rate = cfg.learning_rate;
    sq.gamma_sq = cfg.gamma_sq > 0.0 ? cfg.gamma_sq : default_gamma_sq(cfg.domain);
    sq.logit_transform = cfg.logit_transform;
    sq.knn_on_transformed = cfg.knn_on_transformed;
    sq.clip_eps = cfg.clip_eps;
    return sq;
}

MapElitesConfig map_elites_config_from(const RunConfig& cfg) {
    MapElitesConfig me;
    me.archive_cells = cfg.archive_cells;
    me.total_evals =
        cfg.total_evals > 0 ? cfg.total_evals : cfg.population_size * (cfg.epochs + 1);
    me.sigma_iso = cfg.sigma_iso;
    me.sigma_line = cfg.sigma_line;
    me.gradient_assist = cfg.algorithm == "ga-me";
    me.eta_g = cfg.eta_g;
    me.cvt_seed = cfg.me_cvt_seed;
    me.report_every =
        cfg.metric_interval > 0 ? cfg.metric_interval * cfg.population_size : me.total_evals;
    return me;
}

void validate_algorithm_config(const RunConfig& cfg, const ProblemDefinition& problem) {
    if (cfg.algorithm == "squad") {
        squad_config_from(cfg).validate(problem.solution_dim());
    } else if (cfg.algorithm == "map-elites" || cfg.algorithm == "ga-me") {
        map_elites_config_from(cfg).validate();
    } else {
        throw invalid_input("unknown algorithm '" + cfg.algorithm +
                            "' (expected squad, map-elites or ga-me)");
    }
}

SeedOutcome run_one_seed(const RunConfig& cfg, const ProblemDefinition& problem,
                         const CvtArchive& metrics_archive, std::uint64_t seed,
                         const fs::path& out_dir) {
    const double gamma_sq = cfg.gamma_sq > 0.0 ? cfg.gamma_sq : default_gamma_sq(cfg.domain);
    const std::string tag = std::to_string(seed);
    CsvWriter metrics_csv(out_dir / ("metrics_" + tag + ".csv"),
                          "epoch,qd_score,coverage,vendi,qvs,mean_obj,max_obj,s_tilde");
    SeedOutcome outcome;

    auto metrics_row = [&](std::size_t epoch, const Population& pop) {
        MetricsReport rep;
        if (pop.size() <= cfg.vendi_max_n) {
            rep = compute_metrics(pop, metrics_archive, cfg.sigma_v_sq);
        } else {
            // vendi needs an eigendecomposition, so it runs on a strided
            // subset; archive stats and objective stats use the full set
            rep = compute_metrics(stride_cap(pop, cfg.vendi_max_n), metrics_archive,
                                  cfg.sigma_v_sq);
            CvtArchive work = metrics_archive;
            for (std::size_t i = 0; i < pop.size(); ++i)
                archive_insert(work, pop.qualities[i], pop.descriptors[i]);
            rep.qd_score = qd_score(work);
            rep.coverage_percent = coverage_percent(work);
            rep.mean_objective = 0.0;
            rep.max_objective = pop.qualities.front();
            for (double f : pop.qualities) {
                rep.mean_objective += f;
                rep.max_objective = std::max(rep.max_objective, f);
            }
            rep.mean_objective /= static_cast<double>(pop.size());
            rep.qvs = std::max(rep.mean_objective * rep.vendi, 0.0);
        }
        double s_tilde = all_pairs_objective(pop, cfg, gamma_sq);
        metrics_csv.row({std::to_string(epoch), fmt(rep.qd_score), fmt(rep.coverage_percent),
                         fmt(rep.vendi), fmt(rep.qvs), fmt(rep.mean_objective),
                         fmt(rep.max_objective), fmt(s_tilde)});
        outcome.final = {rep, s_tilde};
    };

    if (cfg.algorithm == "squad") {
        SquadConfig sq = squad_config_from(cfg);
        auto progress = [&](std::size_t epoch, const Population& pop) {
            bool due = epoch == 0 || epoch == cfg.epochs ||
                       (cfg.metric_interval > 0 && epoch % cfg.metric_interval == 0);
            if (due) metrics_row(epoch, pop);
        };
        SquadResult res = run_squad(problem, sq, seed, progress);
        outcome.eval_count = res.eval_count;

        CsvWriter iter_csv(out_dir / ("iterations_" + tag + ".csv"),
                           "epoch,objective_tilde,mean_quality,max_quality,wall_time_s");
        for (const auto& rec : res.history)
            iter_csv.row({std::to_string(rec.epoch), fmt(rec.objective_tilde),
                          fmt(rec.mean_quality), fmt(rec.max_quality), fmt(rec.wall_time_s)});
        save_population(res.population, (out_dir / ("population_" + tag + ".json")).string());
        if (cfg.write_svg) write_scatter_svg(out_dir / ("scatter_" + tag + ".svg"), res.population);
        return outcome;
    }

    if (cfg.algorithm == "map-elites" || cfg.algorithm == "ga-me") {
        MapElitesConfig me = map_elites_config_from(cfg);
        fs::path cache = cfg.cvt_cache_dir.empty() ? out_dir : fs::path(cfg.cvt_cache_dir);
        CvtArchive search_archive =
            cached_cvt(problem.behavior_dim(), cfg.archive_cells, cfg.me_cvt_seed, cache);

        CsvWriter iter_csv(out_dir / ("iterations_" + tag + ".csv"),
                           "epoch,objective_tilde,mean_quality,max_quality,wall_time_s");
        auto t0 = std::chrono::steady_clock::now();
        auto progress = [&](std::size_t evals, const MapElitesResult& partial) {
            Population pop = elites_population(partial, problem.behavior_dim());
            std::size_t epoch = evals / cfg.population_size;
            if (pop.size() > 0) metrics_row(epoch, pop);
            double mean_q = 0.0, max_q = 0.0;
            if (pop.size() > 0) {
                max_q = pop.qualities.front();
                for (double f : pop.qualities) {
                    mean_q += f;
                    max_q = std::max(max_q, f);
                }
                mean_q /= static_cast<double>(pop.size());
            }
            double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            iter_csv.row({std::to_string(epoch), fmt(qd_score(partial.archive)), fmt(mean_q),
                          fmt(max_q), fmt(wall)});
        };
        MapElitesResult res =
            run_map_elites_in(problem, me, seed, std::move(search_archive), progress);
        outcome.eval_count = res.eval_count;

        Population pop = elites_population(res, problem.behavior_dim());
        save_population(pop, (out_dir / ("population_" + tag + ".json")).string());
        if (cfg.write_svg) write_scatter_svg(out_dir / ("scatter_" + tag + ".svg"), pop);
        return outcome;
    }

    throw invalid_input("unknown algorithm '" + cfg.algorithm +
                        "' (expected squad, map-elites or ga-me)");
}

nlohmann::ordered_json stat_block(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    double stderr_ = xs.size() > 1
                         ? std::sqrt(var / static_cast<double>(xs.size() - 1) /
                                     static_cast<double>(xs.size()))
                         : 0.0;
    nlohmann::ordered_json j;
    j["mean"] = mean;
    j["stderr"] = stderr_;
    j["per_seed"] = xs;
    return j;
}

}  // namespace

double default_gamma_sq(const std::string& domain) {
    if (domain == "lp-4" || domain == "hill") return 0.1;
    if (domain == "lp-8") return 0.5;
    if (domain == "lp-16") return 1.0;
    return 0.1;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::function<void(const std::string&)>> setters;
    setters["domain"] = [&](const std::string& v) { cfg.domain = v; };
    setters["algorithm"] = [&](const std::string& v) { cfg.algorithm = v; };
    setters["seeds"] = [&](const std::string& v) { cfg.seeds = parse_seed_list(v); };
    setters["out_dir"] = [&](const std::string& v) { cfg.out_dir = v; };
    setters["population_size"] = [&](const std::string& v) {
        cfg.population_size = parse_u64(v, "population_size");
    };
    setters["batch_size"] = [&](const std::string& v) {
        cfg.batch_size = parse_u64(v, "batch_size");
    };
    setters["neighbors"] = [&](const std::string& v) { cfg.neighbors = parse_u64(v, "neighbors"); };
    setters["epochs"] = [&](const std::string& v) { cfg.epochs = parse_u64(v, "epochs"); };
    setters["learning_rate"] = [&](const std::string& v) {
        cfg.learning_rate = parse_double(v, "learning_rate");
    };
    setters["gamma_sq"] = [&](const std::string& v) { cfg.gamma_sq = parse_double(v, "gamma_sq"); };
    setters["logit_transform"] = [&](const std::string& v) {
        cfg.logit_transform = parse_bool(v, "logit_transform");
    };
    setters["knn_on_transformed"] = [&](const std::string& v) {
        cfg.knn_on_transformed = parse_bool(v, "knn_on_transformed");
    };
    setters["clip_eps"] = [&](const std::string& v) { cfg.clip_eps = parse_double(v, "clip_eps"); };
    setters["metric_interval"] = [&](const std::string& v) {
        cfg.metric_interval = parse_u64(v, "metric_interval");
    };
    setters["metrics_cells"] = [&](const std::string& v) {
        cfg.metrics_cells = parse_u64(v, "metrics_cells");
    };
    setters["metrics_cvt_seed"] = [&](const std::string& v) {
        cfg.metrics_cvt_seed = parse_u64(v, "metrics_cvt_seed");
    };
    setters["sigma_v_sq"] = [&](const std::string& v) {
        cfg.sigma_v_sq = parse_double(v, "sigma_v_sq");
    };
    setters["vendi_max_n"] = [&](const std::string& v) {
        cfg.vendi_max_n = parse_u64(v, "vendi_max_n");
    };
    setters["cvt_cache_dir"] = [&](const std::string& v) { cfg.cvt_cache_dir = v; };
    setters["archive_cells"] = [&](const std::string& v) {
        cfg.archive_cells = parse_u64(v, "archive_cells");
    };
    setters["total_evals"] = [&](const std::string& v) {
        cfg.total_evals = parse_u64(v, "total_evals");
    };
    setters["sigma_iso"] = [&](const std::string& v) {
        cfg.sigma_iso = parse_double(v, "sigma_iso");
    };
    setters["sigma_line"] = [&](const std::string& v) {
        cfg.sigma_line = parse_double(v, "sigma_line");
    };
    setters["eta_g"] = [&](const std::string& v) { cfg.eta_g = parse_double(v, "eta_g"); };
    setters["me_cvt_seed"] = [&](const std::string& v) {
        cfg.me_cvt_seed = parse_u64(v, "me_cvt_seed");
    };
    setters["descriptor_formula_scaling"] = [&](const std::string& v) {
        cfg.descriptor_formula_scaling = parse_bool(v, "descriptor_formula_scaling");
    };
    setters["write_svg"] = [&](const std::string& v) { cfg.write_svg = parse_bool(v, "write_svg"); };

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw invalid_input("config line " + std::to_string(lineno) +
                                ": expected 'key = value', got: " + s);
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw invalid_input("config line " + std::to_string(lineno) + ": unknown key '" +
                                key + "'");
        it->second(value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

int cmd_run(RunConfig cfg) {
    auto problem = make_problem(cfg.domain, cfg.descriptor_formula_scaling);
    // reject bad configs before the (possibly expensive) tessellation build
    validate_algorithm_config(cfg, *problem);
    fs::path out_dir(cfg.out_dir);
    fs::create_directories(out_dir);
    fs::path cache = cfg.cvt_cache_dir.empty() ? out_dir : fs::path(cfg.cvt_cache_dir);
    CvtArchive metrics_archive =
        cached_cvt(problem->behavior_dim(), cfg.metrics_cells, cfg.metrics_cvt_seed, cache);

    std::vector<FinalMetrics> finals;
    for (std::uint64_t seed : cfg.seeds) {
        SeedOutcome out = run_one_seed(cfg, *problem, metrics_archive, seed, out_dir);
        finals.push_back(out.final);
        std::cout << "seed " << seed << ": qd_score=" << fmt(out.final.rep.qd_score)
                  << " coverage=" << fmt(out.final.rep.coverage_percent)
                  << " vendi=" << fmt(out.final.rep.vendi)
                  << " mean_obj=" << fmt(out.final.rep.mean_objective)
                  << " evals=" << out.eval_count << "\n";
    }

    auto collect = [&](auto get) {
        std::vector<double> xs;
        for (const auto& f : finals) xs.push_back(get(f));
        return xs;
    };
    nlohmann::ordered_json summary;
    summary["domain"] = cfg.domain;
    summary["algorithm"] = cfg.algorithm;
    summary["seeds"] = cfg.seeds;
    summary["final"]["qd_score"] = stat_block(collect([](auto& f) { return f.rep.qd_score; }));
    summary["final"]["coverage"] =
        stat_block(collect([](auto& f) { return f.rep.coverage_percent; }));
    summary["final"]["vendi"] = stat_block(collect([](auto& f) { return f.rep.vendi; }));
    summary["final"]["qvs"] = stat_block(collect([](auto& f) { return f.rep.qvs; }));
    summary["final"]["mean_obj"] =
        stat_block(collect([](auto& f) { return f.rep.mean_objective; }));
    summary["final"]["max_obj"] = stat_block(collect([](auto& f) { return f.rep.max_objective; }));
    summary["final"]["s_tilde"] = stat_block(collect([](auto& f) { return f.s_tilde; }));

    std::ofstream out(out_dir / "summary.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << summary.dump(2) << "\n";
    return 0;
}

int cmd_sweep(RunConfig cfg, const std::string& parameter,
              const std::vector<std::string>& values) {
    if (values.empty()) throw invalid_input("sweep: no values given");
    static const std::vector<std::string> allowed = {
        "gamma_sq", "batch_size", "neighbors", "population_size", "logit_transform"};
    if (std::find(allowed.begin(), allowed.end(), parameter) == allowed.end())
        throw invalid_input("sweep: unsupported parameter '" + parameter + "'");

    fs::path root(cfg.out_dir);
    fs::create_directories(root);
    CsvWriter sweep_csv(root / "sweep.csv",
                        "parameter,value,seed,qd_score,coverage,vendi,qvs,mean_obj,max_obj,"
                        "s_tilde");

    auto problem = make_problem(cfg.domain, cfg.descriptor_formula_scaling);
    fs::path cache = cfg.cvt_cache_dir.empty() ? root : fs::path(cfg.cvt_cache_dir);
    CvtArchive metrics_archive =
        cached_cvt(problem->behavior_dim(), cfg.metrics_cells, cfg.metrics_cvt_seed, cache);

    for (const std::string& value : values) {
        RunConfig point = cfg;
        if (parameter == "gamma_sq")
            point.gamma_sq = parse_double(value, parameter);
        else if (parameter == "batch_size")
            point.batch_size = parse_u64(value, parameter);
        else if (parameter == "neighbors")
            point.neighbors = parse_u64(value, parameter);
        else if (parameter == "population_size")
            point.population_size = parse_u64(value, parameter);
        else
            point.logit_transform = parse_bool(value, parameter);
        validate_algorithm_config(point, *problem);

        fs::path sub = root / (parameter + "_" + value);
        fs::create_directories(sub);
        for (std::uint64_t seed : cfg.seeds) {
            SeedOutcome out = run_one_seed(point, *problem, metrics_archive, seed, sub);
            sweep_csv.row({parameter, value, std::to_string(seed), fmt(out.final.rep.qd_score),
                           fmt(out.final.rep.coverage_percent), fmt(out.final.rep.vendi),
                           fmt(out.final.rep.qvs), fmt(out.final.rep.mean_objective),
                           fmt(out.final.rep.max_objective), fmt(out.final.s_tilde)});
            std::cout << parameter << "=" << value << " seed " << seed
                      << ": vendi=" << fmt(out.final.rep.vendi)
                      << " mean_obj=" << fmt(out.final.rep.mean_objective) << "\n";
        }
    }
    return 0;
}

int cmd_check(std::uint64_t seed) {
    auto reports = run_all_checks(seed);
    bool ok = true;
    std::printf("%-20s %8s %8s %14s\n", "property", "trials", "failures", "worst_margin");
    for (const auto& r : reports) {
        std::printf("%-20s %8zu %8zu %14.6g\n", r.name.c_str(), r.trials, r.failures,
                    r.worst_margin);
        ok = ok && r.passed();
    }
    return ok ? 0 : 3;
}

}  // namespace softqd
