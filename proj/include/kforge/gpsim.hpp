#pragma once

#include "kforge/kernels.hpp"
#include "kforge/measures.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kforge {

/// Feature functions k_x together with a measure mu, claimed to satisfy
/// K(x, y) = int conj(k_x) k_y dmu.
struct FactorizationPair {
    std::string name;
    std::function<Complex(const Point& x, double s)> feature;
    MeasureModel measure;
    /// Bound on the quadrature error of int conj(k_x) k_y dmu at a given resolution
    /// over the grid. Absent means no bound is known.
    std::function<double(const std::vector<Point>& grid, int resolution)> quadrature_bound;
};

/// k_x = indicator of [0, x] against Lebesgue measure (Brownian motion).
FactorizationPair brownian_pair();
/// k_z(t) = 1 / (1 - z conj(e(t))) against Lebesgue measure on the circle.
FactorizationPair szego_pair();
/// k_z(t) = prod_{n<N} (1 + z^{4^n} conj(e(4^n t))) against the Cantor measure.
FactorizationPair cantor_pair(int truncation);
/// Indicator features against the Cantor measure; factors the overlap kernel of mu4, not x ^ y.
FactorizationPair mismatched_pair();

/// Simulated paths: row p holds path p evaluated on the grid.
struct PathEnsemble {
    std::vector<Point> grid;
    ComplexMatrix paths;
    std::uint64_t seed = 0;
    int partition_resolution = -1;

    [[nodiscard]] Eigen::Index n_paths() const noexcept { return paths.rows(); }
    [[nodiscard]] bool is_real() const { return (paths.imag().array() == 0.0).all(); }
};

/// Paths L Z with L a Cholesky factor of G (ridge 1e-12 trace if G is only semidefinite).
/// Complex G draws circular complex Gaussians with E conj(V_x) V_y = G(x, y).
PathEnsemble sample_gaussian_vector(const GramMatrix& g, std::size_t n_paths, std::uint64_t seed,
                                    unsigned threads = 1);

/// Independent increments W_{A_i} ~ N(0, m_i) on the cells at the given resolution.
/// Row p holds path p.
RealMatrix wiener_increments(const MeasureModel& m, int resolution, std::size_t n_paths, std::uint64_t seed,
                             unsigned threads = 1);

/// W([0, x]) as the sum of increments of the cells whose left endpoint is < x.
PathEnsemble cumulative_path(const RealMatrix& increments, const PartitionCells& partition,
                             std::span<const double> x_grid);

/// Discretized Ito integral V_x = sum_i k_x(s_i) W_{A_i}, s_i the cell left endpoints.
PathEnsemble ito_synthesize(const FactorizationPair& pair, int resolution, const std::vector<Point>& grid,
                            std::size_t n_paths, std::uint64_t seed, unsigned threads = 1);

/// V_x = sum_n g_n(x) zeta_n with zeta_n i.i.d. N(0, 1).
PathEnsemble frame_synthesize(const std::vector<std::function<Complex(const Point&)>>& g,
                              const std::vector<Point>& grid, std::size_t n_paths, std::uint64_t seed,
                              unsigned threads = 1);

/// C(x, y) = (1/P) sum_p conj(V_x^p) V_y^p, mean-zero convention, Hermitian by construction.
ComplexMatrix empirical_covariance(const PathEnsemble& e);

/// Largest |mean| over grid points.
double max_abs_mean(const PathEnsemble& e);

struct DualityReport {
    std::string pair_name;
    std::string kernel_name;
    int resolution = 0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double max_abs_kernel = 0.0;
    double quadrature_error = 0.0;
    double quadrature_tolerance = 0.0;
    bool quadrature_pass = false;
    double mc_error = 0.0;
    double mc_tolerance = 0.0;
    bool mc_pass = false;

    [[nodiscard]] bool pass() const noexcept { return quadrature_pass && mc_pass; }
};

/// Checks that pair factors spec on the grid, deterministically (quadrature of
/// int conj(k_x) k_y dmu against K) and stochastically (empirical covariance of the
/// synthesized process against K, tolerance 5 max|K| / sqrt(P)).
DualityReport duality_check(const FactorizationPair& pair, const KernelSpec& spec, const std::vector<Point>& grid,
                            int resolution, std::size_t n_paths, std::uint64_t seed, unsigned threads = 1);

struct QuadraticVariationLevel {
    int resolution = 0;
    std::size_t cells = 0;
    double measure = 0.0;         // mu(A)
    double mean_q = 0.0;          // empirical mean of Q = sum (W_{A_i})^2
    double mean_tolerance = 0.0;  // 5 sqrt(2 sum m_i^2 / P)
    double mse = 0.0;             // empirical E |mu(A) - Q|^2
    double mse_theory = 0.0;      // 2 sum m_i^2
};

/// Quadratic variation of the Wiener process over [a, b]; [a, b] must be a union of
/// cells at every listed resolution.
std::vector<QuadraticVariationLevel> quadratic_variation(const MeasureModel& m, double a, double b,
                                                         std::span<const int> resolutions, std::size_t n_paths,
                                                         std::uint64_t seed, unsigned threads = 1);

/// (T* f)(x) = int f(s) conj(k_x(s)) dmu(s) by left-endpoint quadrature.
std::vector<Complex> transform_adjoint(const FactorizationPair& pair, const std::function<Complex(double)>& f,
                                       const std::vector<Point>& grid, int resolution);

/// Thread count from KERNEL_FORGE_THREADS, or 1.
unsigned default_threads();

}  // namespace kforge
