#pragma once

#include "kforge/gram.hpp"
#include "kforge/measures.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kforge {

enum class KernelFamily {
    brownian_min,   // x ^ y on [0, inf)
    brownian_line,  // |x| ^ |y| for xy >= 0, else 0
    szego,          // 1 / (1 - conj(z) w) on the unit disk
    cantor_product, // prod_{n<N} (1 + (conj(z) w)^{4^n}) on the unit disk
    shannon,        // sinc(pi (x - y))
    drury_arveson,  // 1 / (1 - <z, w>) on the unit ball of C^k
    overlap,        // mu(A n B) on interval sets
    green_1d,       // x ^ y - x y on (0, 1)
};

/// A kernel family together with its parameters.
///
/// Every complex kernel is conjugate-linear in its first argument, so that
/// K(x, y) = <k_x, k_y> for a factorization pair and K(x, y) = conj(K(y, x)).
struct KernelSpec {
    KernelFamily family = KernelFamily::brownian_min;
    int truncation = 8;        // cantor_product: number of factors
    std::size_t dimension = 1; // drury_arveson: k
    double scale = 1.0;        // overall positive multiplier
    MeasureModel measure{};    // overlap

    static KernelSpec brownian_min() { return {KernelFamily::brownian_min}; }
    static KernelSpec brownian_line() { return {KernelFamily::brownian_line}; }
    static KernelSpec szego() { return {KernelFamily::szego}; }
    static KernelSpec cantor_product(int n) {
        KernelSpec s{KernelFamily::cantor_product};
        s.truncation = n;
        return s;
    }
    static KernelSpec shannon() { return {KernelFamily::shannon}; }
    static KernelSpec drury_arveson(std::size_t k) {
        KernelSpec s{KernelFamily::drury_arveson};
        s.dimension = k;
        return s;
    }
    static KernelSpec overlap(MeasureModel m) {
        KernelSpec s{KernelFamily::overlap};
        s.measure = m;
        return s;
    }
    static KernelSpec green_1d() { return {KernelFamily::green_1d}; }

    [[nodiscard]] std::string name() const;
    /// True when the family only produces real values.
    [[nodiscard]] bool is_real() const;
    /// Throws DomainError if p is not an admissible argument.
    void check_domain(const Point& p) const;
};

KernelFamily parse_family(const std::string& name);
std::string family_name(KernelFamily f);

/// K(x, y). Throws DomainError on a tag mismatch or a point outside the domain.
Complex eval_kernel(const KernelSpec& spec, const Point& x, const Point& y);

/// Bound on |log| of the neglected tail of the cantor product at truncation N:
/// 2 |conj(z) w|^{4^N}, valid for |conj(z) w| < 1.
double cantor_tail_bound(Complex zw, int truncation);

/// Gram matrix of spec on points; entry (i, j) is evaluated once for i <= j and mirrored
/// with conjugation. Throws InputError on duplicate points.
GramMatrix gram(const KernelSpec& spec, const SampleSet& points);

/// Cross Gram: entry (i, j) = K(rows_i, cols_j).
ComplexMatrix cross_gram(const KernelSpec& spec, const std::vector<Point>& rows, const SampleSet& cols);

struct PsdVerdict {
    bool psd = true;
    double min_eigenvalue = 0.0;  // +inf for the empty matrix
};

/// min eigenvalue >= -tol * max(1, max diagonal), eigenvalues from the Jacobi oracle.
PsdVerdict validate_psd(const GramMatrix& g, double tol = 1e-8);

struct OverlapNorm {
    double l2_norm = 0.0;            // ||phi|| in L^2(mu)
    std::vector<double> set_values;  // Phi(A) = integral of phi over A, per input set
    double gram_norm = 0.0;          // ||Phi|| from the Gram of the cell-indicator sets
};

/// Norm of Phi(A) = int_A phi dmu in the RKHS of the overlap kernel mu(A n B).
///
/// phi is given by one value per cell of cells(measure, measure.depth); every set must be
/// a union of whole cells. The norm is computed twice: as the L^2 norm of phi, and as
/// sup over the cell-indicator sets F of <Phi_F, K_F^{-1} Phi_F>.
OverlapNorm overlap_rkhs_norm(const MeasureModel& measure, std::span<const double> phi,
                              const std::vector<Point>& sets);

}  // namespace kforge
