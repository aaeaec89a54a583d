#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softqd/population.hpp"

namespace softqd {

// Centroidal Voronoi tessellation archive over [0,1]^d. Cells hold the best
// quality seen per centroid (elitist). solution_ref is an opaque caller
// index (-1 when unused); the archive itself never stores parameters.
struct CvtArchive {
    int dim = 0;
    std::vector<std::vector<double>> centroids;
    std::vector<double> cell_quality;        // NaN-free; valid iff occupied
    std::vector<char> occupied;
    std::vector<std::vector<double>> cell_descriptor;
    std::vector<std::int64_t> solution_ref;

    std::size_t cells() const { return centroids.size(); }
    std::size_t occupied_count() const;
};

// Lloyd's k-means over uniform samples of [0,1]^d (100k samples by default):
// centroids init to the first k samples, iterate until the max centroid
// shift drops below 1e-6 or 100 iterations. Deterministic per seed.
CvtArchive build_cvt(int dim, std::size_t cells, std::uint64_t seed,
                     std::size_t samples = 100000);

// JSON persistence for centroid reuse across runs (bit-exact doubles).
void save_cvt(const CvtArchive& archive, const std::string& path);
CvtArchive load_cvt(const std::string& path);

// Nearest centroid by squared distance, ties toward the smaller cell index.
std::size_t nearest_cell(const CvtArchive& archive, const std::vector<double>& descriptor);

// Elitist insert: returns true iff the cell was empty or strictly improved.
// Equal quality keeps the incumbent.
bool archive_insert(CvtArchive& archive, double quality, const std::vector<double>& descriptor,
                    std::int64_t solution_ref = -1);

double qd_score(const CvtArchive& archive);
double coverage_percent(const CvtArchive& archive);

// Vendi score exp(entropy of eigenvalues of K/N), K_ij =
// exp(-||b_i - b_j||^2 / sigma_v_sq). The spectrum comes from a lazy pivoted
// Cholesky factorization of K/N (kernel entries computed on demand, stopped
// at residual trace 1e-13) followed by a Jacobi eigensolve of the small Gram
// factor; truncation sits far below the entropy's sensitivity. Tiny negative
// eigenvalues from roundoff are clamped to zero, anything below -1e-10 is a
// numeric error.
double vendi_score(const std::vector<std::vector<double>>& descriptors, double sigma_v_sq);

// Quality-weighted Vendi: mean quality times Vendi, floored at 0 when the
// mean quality is negative.
double qvs(const std::vector<double>& qualities,
           const std::vector<std::vector<double>>& descriptors, double sigma_v_sq);

struct MetricsReport {
    double qd_score = 0.0;
    double coverage_percent = 0.0;
    double vendi = 0.0;
    double qvs = 0.0;
    double mean_objective = 0.0;
    double max_objective = 0.0;
};

// Inserts the whole population into a fresh copy of the archive, then reads
// off QD score and coverage; Vendi/QVS use the population directly.
// sigma_v_sq <= 0 selects the default d/6.
MetricsReport compute_metrics(const Population& pop, const CvtArchive& archive,
                              double sigma_v_sq = 0.0);

// Jacobi eigenvalues of a dense symmetric matrix (row-major n x n), ascending.
// Exposed for tests and the Vendi score.
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix, std::size_t n,
                                          double off_diag_tol = 1e-10);

}  // namespace softqd
