#include "kforge/gpsim.hpp"

#include "kforge/error.hpp"
#include "kforge/factorize.hpp"
#include "kforge/rng.hpp"

#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace kforge {

namespace {

constexpr std::size_t block_size = 256;

// Runs fn(begin, end) over fixed blocks of [0, n). Blocks never depend on the thread
// count, and each path only writes its own row, so results are identical for any count.
template <typename Fn>
void for_each_block(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t blocks = (n + block_size - 1) / block_size;
    const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(blocks, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t b = next++; b < blocks; b = next++) {
            fn(b * block_size, std::min(n, (b + 1) * block_size));
        }
    };
    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
}

Complex unit_phase(double f) {
    f -= std::floor(f);
    return {boost::math::cos_pi(2.0 * f), boost::math::sin_pi(2.0 * f)};
}

// Feature values scaled by sqrt(cell mass), laid out cell-major: phi[i * G + g].
struct FeatureTable {
    std::size_t cells = 0;
    std::size_t grid = 0;
    std::vector<double> re;
    std::vector<double> im;
    bool real = true;
};

FeatureTable feature_table(const FactorizationPair& pair, const PartitionCells& part, const std::vector<Point>& grid) {
    FeatureTable t;
    t.cells = part.size();
    t.grid = grid.size();
    t.re.resize(t.cells * t.grid);
    t.im.resize(t.cells * t.grid);
    for (std::size_t i = 0; i < t.cells; ++i) {
        const double w = std::sqrt(part.cells[i].mass);
        const double s = part.representative(i);
        for (std::size_t g = 0; g < t.grid; ++g) {
            const Complex v = pair.feature(grid[g], s) * w;
            t.re[i * t.grid + g] = v.real();
            t.im[i * t.grid + g] = v.imag();
            if (v.imag() != 0.0) t.real = false;
        }
    }
    return t;
}

}  // namespace

unsigned default_threads() {
    if (const char* env = std::getenv("KERNEL_FORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

FactorizationPair brownian_pair() {
    FactorizationPair p;
    p.name = "ex1";
    p.measure = MeasureModel::lebesgue();
    p.feature = [](const Point& x, double s) { return Complex(s <= x.x() ? 1.0 : 0.0, 0.0); };
    p.quadrature_bound = [](const std::vector<Point>&, int r) { return std::ldexp(1.0, -r); };
    return p;
}

FactorizationPair szego_pair() {
    FactorizationPair p;
    p.name = "ex2";
    p.measure = MeasureModel::lebesgue();
    p.feature = [](const Point& x, double t) { return 1.0 / (1.0 - x.z() * std::conj(unit_phase(t))); };
    p.quadrature_bound = [](const std::vector<Point>& grid, int r) {
        double rho = 0.0;
        for (const auto& x : grid) rho = std::max(rho, std::abs(x.z()));
        const double rm = std::pow(rho, std::ldexp(1.0, r));
        return 2.0 * rm / ((1.0 - rm) * (1.0 - rho * rho)) + 1e-12;
    };
    return p;
}

FactorizationPair cantor_pair(int truncation) {
    if (truncation < 1) throw InputError("cantor pair truncation must be >= 1");
    FactorizationPair p;
    p.name = "ex3";
    p.measure = MeasureModel::cantor4();
    p.feature = [truncation](const Point& x, double t) {
        Complex prod{1.0, 0.0};
        Complex zp = x.z();
        double freq = 1.0;
        for (int n = 0; n < truncation; ++n) {
            prod *= 1.0 + zp * std::conj(unit_phase(freq * t));
            zp *= zp;
            zp *= zp;
            freq *= 4.0;
        }
        return prod;
    };
    p.quadrature_bound = [truncation](const std::vector<Point>& grid, int r) {
        // At depth >= N the discrete measure is exactly orthogonal on the frequencies involved.
        double rho = 0.0;
        for (const auto& x : grid) rho = std::max(rho, std::abs(x.z()));
        double prod = 1.0;
        double sq = 1.0;
        double term = rho;
        for (int n = 0; n < truncation; ++n) {
            prod *= 1.0 + term;
            sq *= 1.0 + term * term;
            term = std::pow(term, 4.0);
        }
        if (r >= truncation) return 1e-12 * prod * prod;
        return prod * prod - sq + 1e-12;
    };
    return p;
}

FactorizationPair mismatched_pair() {
    auto p = brownian_pair();
    p.name = "mismatch";
    p.measure = MeasureModel::cantor4();
    return p;
}

PathEnsemble sample_gaussian_vector(const GramMatrix& g, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    const Eigen::Index n = g.n();
    const bool complex = !g.is_real();
    RealMatrix cov = complex ? real_embedding(g.entries.conjugate()) : g.real();
    const Eigen::Index m = cov.rows();

    RealMatrix L;
    try {
        L = cholesky_real(cov, 0.0);
    } catch (const NumericalError&) {
        const double trace = cov.trace();
        if (trace == 0.0 && cov.cwiseAbs().maxCoeff() == 0.0) {
            L = RealMatrix::Zero(m, m);
        } else {
            RealMatrix ridged = cov;
            ridged.diagonal().array() += 1e-12 * trace;
            L = cholesky_real(ridged, 0.0);
        }
    }
    if (complex) L *= std::sqrt(0.5);

    PathEnsemble out;
    out.grid = g.points.points();
    out.seed = seed;
    out.paths = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_paths), n);
    for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        RealVector z(m);
        for (std::size_t p = begin; p < end; ++p) {
            const rng::CounterStream stream(seed, p, rng::salt_gaussian_vector);
            for (Eigen::Index j = 0; j < m; ++j) z(j) = stream.normal(static_cast<std::uint64_t>(j));
            for (Eigen::Index i = 0; i < n; ++i) {
                double re = 0.0;
                double im = 0.0;
                for (Eigen::Index k = 0; k <= i; ++k) re += L(i, k) * z(k);
                if (complex) {
                    for (Eigen::Index k = 0; k <= n + i; ++k) im += L(n + i, k) * z(k);
                }
                out.paths(static_cast<Eigen::Index>(p), i) = {re, im};
            }
        }
    });
    return out;
}

RealMatrix wiener_increments(const MeasureModel& m, int resolution, std::size_t n_paths, std::uint64_t seed,
                             unsigned threads) {
    const auto part = cells(m, resolution);
    RealMatrix w(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(part.size()));
    for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const rng::CounterStream stream(seed, p, rng::salt_wiener + static_cast<std::uint64_t>(resolution));
            for (std::size_t i = 0; i < part.size(); ++i) {
                w(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
                    std::sqrt(part.cells[i].mass) * stream.normal(i);
            }
        }
    });
    return w;
}

PathEnsemble cumulative_path(const RealMatrix& increments, const PartitionCells& partition,
                             std::span<const double> x_grid) {
    if (static_cast<std::size_t>(increments.cols()) != partition.size()) {
        throw InputError("increments do not match the partition");
    }
    std::vector<std::size_t> counts;
    PathEnsemble out;
    for (double x : x_grid) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cumulative path grid must lie in [0,1]");
        const auto it = std::lower_bound(partition.cells.begin(), partition.cells.end(), x,
                                         [](const Cell& c, double v) { return c.a < v; });
        counts.push_back(static_cast<std::size_t>(it - partition.cells.begin()));
        out.grid.push_back(Point::real(x, Domain::unit_interval));
    }
    const Eigen::Index P = increments.rows();
    out.paths = ComplexMatrix::Zero(P, static_cast<Eigen::Index>(x_grid.size()));
    std::vector<double> prefix(partition.size() + 1);
    for (Eigen::Index p = 0; p < P; ++p) {
        prefix[0] = 0.0;
        for (std::size_t i = 0; i < partition.size(); ++i) {
            prefix[i + 1] = prefix[i] + increments(p, static_cast<Eigen::Index>(i));
        }
        for (std::size_t g = 0; g < counts.size(); ++g) out.paths(p, static_cast<Eigen::Index>(g)) = prefix[counts[g]];
    }
    return out;
}

PathEnsemble ito_synthesize(const FactorizationPair& pair, int resolution, const std::vector<Point>& grid,
                            std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    const auto part = cells(pair.measure, resolution);
    const auto table = feature_table(pair, part, grid);
    const std::size_t G = table.grid;

    PathEnsemble out;
    out.grid = grid;
    out.seed = seed;
    out.partition_resolution = resolution;
    out.paths = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(G));
    for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc_re(G);
        std::vector<double> acc_im(G);
        for (std::size_t p = begin; p < end; ++p) {
            const rng::CounterStream stream(seed, p, rng::salt_wiener + static_cast<std::uint64_t>(resolution));
            std::fill(acc_re.begin(), acc_re.end(), 0.0);
            std::fill(acc_im.begin(), acc_im.end(), 0.0);
            for (std::size_t i = 0; i < table.cells; ++i) {
                const double z = stream.normal(i);
                const double* re = &table.re[i * G];
                for (std::size_t g = 0; g < G; ++g) acc_re[g] += re[g] * z;
                if (!table.real) {
                    const double* im = &table.im[i * G];
                    for (std::size_t g = 0; g < G; ++g) acc_im[g] += im[g] * z;
                }
            }
            for (std::size_t g = 0; g < G; ++g) {
                out.paths(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g)) = {acc_re[g], acc_im[g]};
            }
        }
    });
    return out;
}

PathEnsemble frame_synthesize(const std::vector<std::function<Complex(const Point&)>>& g,
                              const std::vector<Point>& grid, std::size_t n_paths, std::uint64_t seed,
                              unsigned threads) {
    const std::size_t N = g.size();
    const std::size_t G = grid.size();
    ComplexMatrix values(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(G));
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t x = 0; x < G; ++x) values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x)) = g[n](grid[x]);
    }
    PathEnsemble out;
    out.grid = grid;
    out.seed = seed;
    out.paths = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(G));
    for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> zeta(N);
        for (std::size_t p = begin; p < end; ++p) {
            const rng::CounterStream stream(seed, p, rng::salt_frame);
            for (std::size_t n = 0; n < N; ++n) zeta[n] = stream.normal(n);
            for (std::size_t x = 0; x < G; ++x) {
                Complex v{0.0, 0.0};
                for (std::size_t n = 0; n < N; ++n) v += values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x)) * zeta[n];
                out.paths(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(x)) = v;
            }
        }
    });
    return out;
}

ComplexMatrix empirical_covariance(const PathEnsemble& e) {
    const Eigen::Index P = e.paths.rows();
    const Eigen::Index G = e.paths.cols();
    if (P == 0) throw InputError("empirical covariance of an empty ensemble");
    ComplexMatrix c(G, G);
    std::vector<Complex> terms(static_cast<std::size_t>(P));
    for (Eigen::Index i = 0; i < G; ++i) {
        for (Eigen::Index j = i; j < G; ++j) {
            for (Eigen::Index p = 0; p < P; ++p) {
                terms[static_cast<std::size_t>(p)] = std::conj(e.paths(p, i)) * e.paths(p, j);
            }
            const Complex v = pairwise_sum(terms) / static_cast<double>(P);
            c(i, j) = (i == j) ? Complex(v.real(), 0.0) : v;
            c(j, i) = std::conj(c(i, j));
        }
    }
    return c;
}

double max_abs_mean(const PathEnsemble& e) {
    double worst = 0.0;
    std::vector<Complex> col(static_cast<std::size_t>(e.paths.rows()));
    for (Eigen::Index g = 0; g < e.paths.cols(); ++g) {
        for (Eigen::Index p = 0; p < e.paths.rows(); ++p) col[static_cast<std::size_t>(p)] = e.paths(p, g);
        worst = std::max(worst, std::abs(pairwise_sum(col)) / static_cast<double>(col.size()));
    }
    return worst;
}

DualityReport duality_check(const FactorizationPair& pair, const KernelSpec& spec, const std::vector<Point>& grid,
                            int resolution, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    DualityReport r;
    r.pair_name = pair.name;
    r.kernel_name = spec.name();
    r.resolution = resolution;
    r.n_paths = n_paths;
    r.seed = seed;

    const auto G = static_cast<Eigen::Index>(grid.size());
    ComplexMatrix K(G, G);
    for (Eigen::Index i = 0; i < G; ++i) {
        for (Eigen::Index j = 0; j < G; ++j) K(i, j) = eval_kernel(spec, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
    }
    r.max_abs_kernel = G == 0 ? 0.0 : K.cwiseAbs().maxCoeff();

    // Deterministic half: quadrature of int conj(k_x) k_y dmu.
    const auto part = cells(pair.measure, resolution);
    ComplexMatrix features(static_cast<Eigen::Index>(part.size()), G);
    for (std::size_t i = 0; i < part.size(); ++i) {
        for (Eigen::Index g = 0; g < G; ++g) {
            features(static_cast<Eigen::Index>(i), g) = pair.feature(grid[static_cast<std::size_t>(g)], part.representative(i));
        }
    }
    std::vector<Complex> terms(part.size());
    for (Eigen::Index x = 0; x < G; ++x) {
        for (Eigen::Index y = 0; y < G; ++y) {
            for (std::size_t i = 0; i < part.size(); ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                terms[i] = part.cells[i].mass * std::conj(features(ii, x)) * features(ii, y);
            }
            r.quadrature_error = std::max(r.quadrature_error, std::abs(pairwise_sum(terms) - K(x, y)));
        }
    }
    r.quadrature_tolerance = pair.quadrature_bound ? pair.quadrature_bound(grid, resolution) : 0.0;
    r.quadrature_pass = r.quadrature_error <= r.quadrature_tolerance;

    // Stochastic half: empirical covariance of the synthesized process.
    if (n_paths > 0) {
        const auto ensemble = ito_synthesize(pair, resolution, grid, n_paths, seed, threads);
        const auto C = empirical_covariance(ensemble);
        r.mc_error = G == 0 ? 0.0 : (C - K).cwiseAbs().maxCoeff();
        r.mc_tolerance = 5.0 * r.max_abs_kernel / std::sqrt(static_cast<double>(n_paths));
        r.mc_pass = r.mc_error <= r.mc_tolerance;
    }
    return r;
}

std::vector<QuadraticVariationLevel> quadratic_variation(const MeasureModel& m, double a, double b,
                                                         std::span<const int> resolutions, std::size_t n_paths,
                                                         std::uint64_t seed, unsigned threads) {
    if (!(a < b)) throw InputError("quadratic variation needs an interval with a < b");
    if (n_paths == 0) throw InputError("quadratic variation needs at least one path");
    std::vector<QuadraticVariationLevel> out;
    constexpr double eps = 1e-12;
    for (int r : resolutions) {
        const auto part = cells(m, r);
        std::vector<std::size_t> inside;
        for (std::size_t i = 0; i < part.size(); ++i) {
            const auto& c = part.cells[i];
            const bool contains = a <= c.a + eps && c.b <= b + eps;
            const bool disjoint = b <= c.a + eps || a >= c.b - eps;
            if (!contains && !disjoint) {
                throw InputError("interval is not a union of cells at resolution " + std::to_string(r));
            }
            if (contains) inside.push_back(i);
        }

        QuadraticVariationLevel lvl;
        lvl.resolution = r;
        lvl.cells = inside.size();
        std::vector<double> masses;
        std::vector<double> mass_sq;
        for (auto i : inside) {
            masses.push_back(part.cells[i].mass);
            mass_sq.push_back(part.cells[i].mass * part.cells[i].mass);
        }
        lvl.measure = pairwise_sum(masses);
        lvl.mse_theory = 2.0 * pairwise_sum(mass_sq);
        lvl.mean_tolerance = 5.0 * std::sqrt(lvl.mse_theory / static_cast<double>(n_paths));

        std::vector<double> q(n_paths);
        for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end) {
            std::vector<double> sq(inside.size());
            for (std::size_t p = begin; p < end; ++p) {
                const rng::CounterStream stream(seed, p, rng::salt_wiener + static_cast<std::uint64_t>(r));
                for (std::size_t k = 0; k < inside.size(); ++k) {
                    const double w = std::sqrt(part.cells[inside[k]].mass) * stream.normal(inside[k]);
                    sq[k] = w * w;
                }
                q[p] = pairwise_sum(sq);
            }
        });
        std::vector<double> dev(n_paths);
        for (std::size_t p = 0; p < n_paths; ++p) dev[p] = (lvl.measure - q[p]) * (lvl.measure - q[p]);
        lvl.mean_q = pairwise_sum(q) / static_cast<double>(n_paths);
        lvl.mse = pairwise_sum(dev) / static_cast<double>(n_paths);
        out.push_back(lvl);
    }
    return out;
}

std::vector<Complex> transform_adjoint(const FactorizationPair& pair, const std::function<Complex(double)>& f,
                                       const std::vector<Point>& grid, int resolution) {
    const auto part = cells(pair.measure, resolution);
    std::vector<Complex> fvals(part.size());
    for (std::size_t i = 0; i < part.size(); ++i) fvals[i] = f(part.representative(i));
    std::vector<Complex> out;
    std::vector<Complex> terms(part.size());
    for (const auto& x : grid) {
        for (std::size_t i = 0; i < part.size(); ++i) {
            terms[i] = part.cells[i].mass * fvals[i] * std::conj(pair.feature(x, part.representative(i)));
        }
        out.push_back(pairwise_sum(terms));
    }
    return out;
}

}  // namespace kforge
