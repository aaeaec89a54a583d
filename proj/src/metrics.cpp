#include "softqd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace softqd {

std::size_t CvtArchive::occupied_count() const {
    std::size_t c = 0;
    for (char o : occupied) c += o != 0;
    return c;
}

CvtArchive build_cvt(int dim, std::size_t cells, std::uint64_t seed, std::size_t samples) {
    if (dim <= 0) throw invalid_input("build_cvt: dim must be positive");
    if (cells == 0) throw invalid_input("build_cvt: cells must be positive");
    if (samples < cells) throw invalid_input("build_cvt: need at least one sample per cell");

    Rng rng(seed);
    std::vector<double> pts(samples * dim);
    for (double& x : pts) x = rng.uniform01();

    // Lloyd iterations; centroids seeded with the first k samples.
    std::vector<double> cent(pts.begin(), pts.begin() + cells * dim);
    std::vector<double> sums(cells * dim);
    std::vector<std::size_t> counts(cells);
    std::vector<int> assign(samples);

    for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t s = 0; s < samples; ++s) {
            const double* x = &pts[s * dim];
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cells; ++c) {
                const double* m = &cent[c * dim];
                double acc = 0.0;
                for (int a = 0; a < dim; ++a) {
                    double diff = x[a] - m[a];
                    acc += diff * diff;
                    if (acc >= best_d) break;  // partial-distance pruning
                }
                if (acc < best_d) {
                    best_d = acc;
                    best = static_cast<int>(c);
                }
            }
            assign[s] = best;
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < samples; ++s) {
            double* acc = &sums[static_cast<std::size_t>(assign[s]) * dim];
            const double* x = &pts[s * dim];
            for (int a = 0; a < dim; ++a) acc[a] += x[a];
            ++counts[assign[s]];
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            if (counts[c] == 0) continue;  // empty cell keeps its centroid
            for (int a = 0; a < dim; ++a) {
                double next = sums[c * dim + a] / static_cast<double>(counts[c]);
                shift = std::max(shift, std::abs(next - cent[c * dim + a]));
                cent[c * dim + a] = next;
            }
        }
        if (shift < 1e-6) break;
    }

    CvtArchive archive;
    archive.dim = dim;
    archive.centroids.assign(cells, std::vector<double>(dim));
    for (std::size_t c = 0; c < cells; ++c)
        for (int a = 0; a < dim; ++a) archive.centroids[c][a] = cent[c * dim + a];
    archive.cell_quality.assign(cells, 0.0);
    archive.occupied.assign(cells, 0);
    archive.cell_descriptor.assign(cells, {});
    archive.solution_ref.assign(cells, -1);
    return archive;
}

void save_cvt(const CvtArchive& archive, const std::string& path) {
    nlohmann::ordered_json j;
    j["dim"] = archive.dim;
    j["centroids"] = archive.centroids;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump();
    if (!out) throw std::runtime_error("write failed: " + path);
}

CvtArchive load_cvt(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input(std::string("cvt json: ") + e.what());
    }
    CvtArchive archive;
    archive.dim = j.at("dim").get<int>();
    archive.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    for (const auto& c : archive.centroids)
        if (static_cast<int>(c.size()) != archive.dim)
            throw invalid_input("cvt json: centroid dimension mismatch");
    archive.cell_quality.assign(archive.centroids.size(), 0.0);
    archive.occupied.assign(archive.centroids.size(), 0);
    archive.cell_descriptor.assign(archive.centroids.size(), {});
    archive.solution_ref.assign(archive.centroids.size(), -1);
    return archive;
}

std::size_t nearest_cell(const CvtArchive& archive, const std::vector<double>& descriptor) {
    if (archive.cells() == 0) throw invalid_input("empty archive");
    if (static_cast<int>(descriptor.size()) != archive.dim)
        throw invalid_input("descriptor dimension differs from archive");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < archive.cells(); ++c) {
        double acc = 0.0;
        const auto& m = archive.centroids[c];
        for (std::size_t a = 0; a < descriptor.size(); ++a) {
            double diff = descriptor[a] - m[a];
            acc += diff * diff;
            if (acc >= best_d) break;
        }
        if (acc < best_d) {  // strict: ties stay with the smaller index
            best_d = acc;
            best = c;
        }
    }
    return best;
}

bool archive_insert(CvtArchive& archive, double quality, const std::vector<double>& descriptor,
                    std::int64_t solution_ref) {
    std::size_t cell = nearest_cell(archive, descriptor);
    if (archive.occupied[cell] && quality <= archive.cell_quality[cell]) return false;
    archive.occupied[cell] = 1;
    archive.cell_quality[cell] = quality;
    archive.cell_descriptor[cell] = descriptor;
    archive.solution_ref[cell] = solution_ref;
    return true;
}

double qd_score(const CvtArchive& archive) {
    double s = 0.0;
    for (std::size_t c = 0; c < archive.cells(); ++c)
        if (archive.occupied[c]) s += archive.cell_quality[c];
    return s;
}

double coverage_percent(const CvtArchive& archive) {
    if (archive.cells() == 0) return 0.0;
    return 100.0 * static_cast<double>(archive.occupied_count()) /
           static_cast<double>(archive.cells());
}

// Cyclic Jacobi, eigenvalues only. Rotations sweep the strict upper triangle
// in row order; entries already insignificant against both diagonal
// neighbors are flushed to zero instead of rotated (their total weight is
// far below the convergence tolerance).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n,
                                          double off_diag_tol) {
    if (n == 0) throw invalid_input("empty matrix");
    if (a.size() != n * n) throw invalid_input("matrix size mismatch");

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p * n + q] * a[p * n + q];
        return std::sqrt(s);
    };

    bool converged = n == 1;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        if (off_norm() <= off_diag_tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (apq == 0.0) continue;
                double app = a[p * n + p], aqq = a[q * n + q];
                double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(app) + g == std::abs(app) &&
                    std::abs(aqq) + g == std::abs(aqq)) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }

                double tau = (aqq - app) / (2.0 * apq);
                double t = std::abs(tau) > 1e150
                               ? 0.5 / tau
                               : (tau >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (std::size_t r = 0; r < n; ++r) {
                    double arp = a[r * n + p], arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double apr = a[p * n + r], aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    if (!converged && off_norm() > off_diag_tol)
        throw numeric_error("jacobi eigensolver failed to converge");

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

namespace {

// Nonzero eigenvalues of the normalized kernel matrix K/N without forming
// all of it. K/N is PSD with a rapidly decaying spectrum, so a diagonally
// pivoted Cholesky K/N = P L L^T P^T terminates after r << N columns (the
// discarded diagonal mass is below 1e-13, negligible against the entropy);
// the Jacobi eigensolver then runs on the r x r Gram matrix L^T L, whose
// spectrum equals the nonzero spectrum of K/N.
std::vector<double> kernel_eigenvalues(const std::vector<std::vector<double>>& descriptors,
                                       double inv_sigma_sq) {
    const std::size_t n = descriptors.size();
    const double scale = 1.0 / static_cast<double>(n);
    auto entry = [&](std::size_t i, std::size_t j) {
        if (i == j) return scale;
        return std::exp(-squared_distance(descriptors[i], descriptors[j]) * inv_sigma_sq) * scale;
    };

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::vector<double> diag(n, scale);  // residual diagonal, permuted order
    std::vector<double> low;             // L, column-major, n rows per column
    low.reserve(64 * n);

    std::size_t rank = 0;
    double remaining = 1.0;  // trace of K/N is exactly 1
    while (rank < n && remaining > 1e-13) {
        std::size_t piv = rank;
        for (std::size_t i = rank + 1; i < n; ++i)
            if (diag[i] > diag[piv]) piv = i;
        if (diag[piv] <= 1e-14) break;
        std::swap(perm[rank], perm[piv]);
        std::swap(diag[rank], diag[piv]);
        for (std::size_t c = 0; c < rank; ++c)
            std::swap(low[c * n + rank], low[c * n + piv]);

        low.resize((rank + 1) * n, 0.0);
        double* col = &low[rank * n];
        const double pivot = std::sqrt(diag[rank]);
        col[rank] = pivot;
        remaining = 0.0;
        for (std::size_t i = rank + 1; i < n; ++i) {
            double v = entry(perm[i], perm[rank]);
            for (std::size_t c = 0; c < rank; ++c) v -= low[c * n + i] * low[c * n + rank];
            col[i] = v / pivot;
            diag[i] = std::max(0.0, diag[i] - col[i] * col[i]);
            remaining += diag[i];
        }
        ++rank;
    }

    if (rank == 0) return std::vector<double>(n, 0.0);

    // Gram matrix of the factor; its eigenvalues are K/N's nonzero ones.
    std::vector<double> gram(rank * rank);
    for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b = a; b < rank; ++b) {
            double s = 0.0;
            const double* ca = &low[a * n];
            const double* cb = &low[b * n];
            for (std::size_t i = 0; i < n; ++i) s += ca[i] * cb[i];
            gram[a * rank + b] = s;
            gram[b * rank + a] = s;
        }

    auto eig = symmetric_eigenvalues(std::move(gram), rank);
    eig.resize(n, 0.0);  // pad the dropped null space
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace

double vendi_score(const std::vector<std::vector<double>>& descriptors, double sigma_v_sq) {
    if (descriptors.empty()) throw invalid_input("empty population");
    if (!(sigma_v_sq > 0.0)) throw invalid_input("sigma_v_sq must be positive");

    auto eig = kernel_eigenvalues(descriptors, 1.0 / sigma_v_sq);
    double entropy = 0.0;
    for (double lam : eig) {
        if (lam < -1e-10)
            throw numeric_error("kernel eigenvalue " + std::to_string(lam) +
                                " below the PSD tolerance");
        if (lam <= 0.0) continue;  // 0 log 0 = 0
        entropy -= lam * std::log(lam);
    }
    return std::exp(entropy);
}

double qvs(const std::vector<double>& qualities,
           const std::vector<std::vector<double>>& descriptors, double sigma_v_sq) {
    if (qualities.empty() || qualities.size() != descriptors.size())
        throw invalid_input("qualities and descriptors must be nonempty and parallel");
    double mean = 0.0;
    for (double f : qualities) mean += f;
    mean /= static_cast<double>(qualities.size());
    if (mean < 0.0) return 0.0;
    return mean * vendi_score(descriptors, sigma_v_sq);
}

MetricsReport compute_metrics(const Population& pop, const CvtArchive& archive,
                              double sigma_v_sq) {
    MetricsReport rep;
    if (pop.size() == 0) return rep;
    if (sigma_v_sq <= 0.0) sigma_v_sq = static_cast<double>(pop.behavior_dim) / 6.0;

    CvtArchive work = archive;
    for (std::size_t i = 0; i < pop.size(); ++i)
        archive_insert(work, pop.qualities[i], pop.descriptors[i], static_cast<std::int64_t>(i));

    rep.qd_score = qd_score(work);
    rep.coverage_percent = coverage_percent(work);
    rep.vendi = vendi_score(pop.descriptors, sigma_v_sq);
    rep.qvs = qvs(pop.qualities, pop.descriptors, sigma_v_sq);
    rep.mean_objective = 0.0;
    rep.max_objective = pop.qualities.front();
    for (double f : pop.qualities) {
        rep.mean_objective += f;
        rep.max_objective = std::max(rep.max_objective, f);
    }
    rep.mean_objective /= static_cast<double>(pop.size());
    return rep;
}

}  // namespace softqd
