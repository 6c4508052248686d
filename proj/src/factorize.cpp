#include "kforge/factorize.hpp"

#include "kforge/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace kforge {

namespace {

RealMatrix embed_or_real(const GramMatrix& g, bool& embedded) {
    embedded = !g.is_real();
    return embedded ? real_embedding(g.entries) : g.real();
}

// Solves L y = b in place.
void forward_substitute(const RealMatrix& L, RealVector& b) {
    const Eigen::Index n = L.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = b(i);
        for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * b(k);
        b(i) = s / L(i, i);
    }
}

// Solves L^T x = y in place.
void backward_substitute(const RealMatrix& L, RealVector& y) {
    const Eigen::Index n = L.rows();
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = y(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= L(k, i) * y(k);
        y(i) = s / L(i, i);
    }
}

std::vector<double> sorted_descending(std::vector<double> v) {
    std::stable_sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
    return v;
}

// Each eigenvalue of the real embedding of a Hermitian matrix appears twice.
std::vector<double> deduplicate_pairs(const std::vector<double>& sorted) {
    std::vector<double> out;
    out.reserve(sorted.size() / 2);
    for (std::size_t i = 0; i + 1 < sorted.size(); i += 2) out.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    return out;
}

}  // namespace

RealMatrix cholesky_real(const RealMatrix& a, double tol) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw InputError("cholesky needs a square matrix");
    RealMatrix L = RealMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
        if (!(pivot >= tol) || pivot <= 0.0) {
            throw NumericalError("matrix is not positive definite: pivot " + std::to_string(j) + " = " +
                                 std::to_string(pivot) + " below tolerance");
        }
        const double d = std::sqrt(pivot);
        L(j, j) = d;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / d;
        }
    }
    return L;
}

CholeskyFactor cholesky(const GramMatrix& g, double ridge, double tol) {
    if (ridge < 0.0) throw InputError("ridge must be >= 0");
    CholeskyFactor f;
    RealMatrix a = embed_or_real(g, f.embedded);
    if (ridge > 0.0) a.diagonal().array() += ridge;
    f.L = cholesky_real(a, tol);
    f.ridge_used = ridge;
    return f;
}

CholeskyFactor brownian_cholesky_closed_form(const SampleSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    CholeskyFactor f;
    f.L = RealMatrix::Zero(n, n);
    double prev = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
        const double x = points[static_cast<std::size_t>(m)].x();
        if (!(x > prev)) throw InputError("closed-form Brownian factor needs 0 < x_1 < x_2 < ...");
        const double step = std::sqrt(x - prev);
        for (Eigen::Index r = m; r < n; ++r) f.L(r, m) = step;
        prev = x;
    }
    return f;
}

ComplexVector cholesky_solve(const CholeskyFactor& f, const ComplexVector& rhs) {
    const Eigen::Index n = rhs.size();
    if (f.embedded) {
        if (f.L.rows() != 2 * n) throw InputError("right-hand side size does not match the factor");
        RealVector b(2 * n);
        b.head(n) = rhs.real();
        b.tail(n) = rhs.imag();
        forward_substitute(f.L, b);
        backward_substitute(f.L, b);
        ComplexVector out(n);
        for (Eigen::Index i = 0; i < n; ++i) out(i) = {b(i), b(n + i)};
        return out;
    }
    if (f.L.rows() != n) throw InputError("right-hand side size does not match the factor");
    RealVector re = rhs.real();
    RealVector im = rhs.imag();
    forward_substitute(f.L, re);
    backward_substitute(f.L, re);
    const bool has_imag = (rhs.imag().array() != 0.0).any();
    if (has_imag) {
        forward_substitute(f.L, im);
        backward_substitute(f.L, im);
    }
    ComplexVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = {re(i), has_imag ? im(i) : 0.0};
    return out;
}

ComplexMatrix inverse_gram(const GramMatrix& g) {
    const Eigen::Index n = g.n();
    if (n == 0) return ComplexMatrix(0, 0);
    const double scale = g.max_diagonal();
    if (!(scale > 0.0)) throw NumericalError("singular Gram matrix: zero diagonal");
    CholeskyFactor f;
    try {
        f = cholesky(g, 0.0, 1e-12 * scale);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("singular Gram matrix: ") + e.what());
    }

    // L^{-1} column by column, then G^{-1} = L^{-T} L^{-1}.
    const Eigen::Index m = f.L.rows();
    RealMatrix linv = RealMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        RealVector e = RealVector::Zero(m);
        e(j) = 1.0;
        forward_substitute(f.L, e);
        linv.col(j) = e;
    }
    const auto product = [&](Eigen::Index i, Eigen::Index j) {
        double s = 0.0;
        for (Eigen::Index k = std::max(i, j); k < m; ++k) s += linv(k, i) * linv(k, j);
        return s;
    };

    ComplexMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double re = product(i, j);
            const double im = f.embedded ? product(n + i, j) : 0.0;
            out(i, j) = {re, i == j ? 0.0 : im};
            out(j, i) = std::conj(out(i, j));
        }
    }
    return out;
}

double gram_determinant(const GramMatrix& g) {
    if (g.n() == 0) return 1.0;
    const auto f = cholesky(g, 0.0, 0.0);
    double det = 1.0;
    for (Eigen::Index i = 0; i < f.L.rows(); ++i) det *= f.L(i, i) * f.L(i, i);
    return f.embedded ? std::sqrt(det) : det;
}

SpectralResult alt_cholesky_eigs(const GramMatrix& g, int max_iter, double tol) {
    SpectralResult out;
    bool embedded = false;
    RealMatrix b = embed_or_real(g, embedded);
    const Eigen::Index n = b.rows();
    if (n == 0) {
        out.converged = true;
        return out;
    }
    const double trace = b.trace();
    const double threshold = tol * trace;

    // Shifted steps B - s I = A A^T -> A^T A + s I on the leading active block. The last
    // diagonal entry tends to the smallest eigenvalue of the block; once its row is below
    // the threshold it is split off.
    Eigen::Index m = n;
    while (true) {
        while (m > 1 && b.row(m - 1).head(m - 1).cwiseAbs().maxCoeff() < threshold) {
            b.row(m - 1).head(m - 1).setZero();
            b.col(m - 1).head(m - 1).setZero();
            --m;
        }
        if (m <= 1) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter) break;

        // Smaller eigenvalue of the trailing 2x2 block: an upper bound for the block's
        // smallest eigenvalue, so backing off from it gives admissible shifts.
        const double p = b(m - 2, m - 2);
        const double q = b(m - 1, m - 1);
        const double r = b(m - 1, m - 2);
        const double base = std::max(0.0, 0.5 * (p + q) - std::hypot(0.5 * (p - q), r));

        // A singular block (semidefinite input) only factors under a small negative shift.
        std::array<double, 10> shifts{};
        std::size_t ns = 0;
        for (double back : {1e-10, 1e-6, 1e-3, 0.05, 0.3, 1.0}) shifts[ns++] = base * (1.0 - back);
        for (double neg : {1e-14, 1e-12, 1e-10, 1e-8}) shifts[ns++] = -neg * std::abs(trace);

        RealMatrix a;
        double shift = 0.0;
        for (std::size_t t = 0; t < ns; ++t) {
            shift = shifts[t];
            RealMatrix block = b.topLeftCorner(m, m);
            block.diagonal().array() -= shift;
            try {
                a = cholesky_real(block, 0.0);
                break;
            } catch (const NumericalError&) {
                if (t + 1 == ns) throw;
            }
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i; j < m; ++j) {
                double s = 0.0;
                for (Eigen::Index k = j; k < m; ++k) s += a(k, i) * a(k, j);
                if (i == j) s += shift;
                b(i, j) = s;
                b(j, i) = s;
            }
        }
        ++out.iterations;
    }

    std::vector<double> diag(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = b(i, i);
        if (v < 0.0 && v > -1e-10 * std::abs(trace)) v = 0.0;
        diag[static_cast<std::size_t>(i)] = v;
    }
    diag = sorted_descending(std::move(diag));
    out.eigenvalues = embedded ? deduplicate_pairs(diag) : std::move(diag);
    return out;
}

SpectralResult jacobi_eigs_real(const RealMatrix& input, double tol) {
    SpectralResult out;
    RealMatrix a = input;
    const Eigen::Index n = a.rows();
    const double frob = a.norm();
    const auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j) s += a(i, j) * a(i, j);
            }
        }
        return std::sqrt(s);
    };

    constexpr int max_sweeps = 100;
    while (true) {
        if (off_norm() <= tol * frob) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_sweeps) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
        ++out.iterations;
    }

    std::vector<double> diag(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = a(i, i);
    out.eigenvalues = sorted_descending(std::move(diag));
    return out;
}

SpectralResult jacobi_eigs(const GramMatrix& g, double tol) {
    if (g.is_real()) return jacobi_eigs_real(g.real(), tol);
    auto r = jacobi_eigs_real(real_embedding(g.entries), tol);
    r.eigenvalues = deduplicate_pairs(r.eigenvalues);
    return r;
}

}  // namespace kforge
