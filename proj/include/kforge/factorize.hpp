#pragma once

#include "kforge/gram.hpp"

#include <vector>

namespace kforge {

/// Lower-triangular factor with G + ridge I = L L^T.
///
/// For complex Hermitian input, L factors the 2n x 2n real embedding and
/// `embedded` is set.
struct CholeskyFactor {
    RealMatrix L;
    double ridge_used = 0.0;
    bool embedded = false;
};

struct SpectralResult {
    std::vector<double> eigenvalues;  // descending
    int iterations = 0;
    bool converged = false;
};

/// Dense Cholesky of a real symmetric matrix. Throws NumericalError when a pivot
/// falls below tol.
RealMatrix cholesky_real(const RealMatrix& a, double tol);

/// Cholesky of a Gram matrix (real, or via the real embedding when complex).
CholeskyFactor cholesky(const GramMatrix& g, double ridge = 0.0, double tol = 1e-12);

/// Closed-form factor of the Brownian Gram on 0 < x_1 < ... < x_N:
/// L(n, m) = sqrt(x_m - x_{m-1}) for m <= n, with x_0 = 0.
CholeskyFactor brownian_cholesky_closed_form(const SampleSet& points);

/// Solves G u = rhs using a Cholesky factor of G (complex handled by the embedding).
ComplexVector cholesky_solve(const CholeskyFactor& f, const ComplexVector& rhs);

/// G^{-1} from Cholesky solves, Hermitian by construction. Throws NumericalError
/// when G is singular at pivot tolerance 1e-12 (relative to the largest diagonal).
ComplexMatrix inverse_gram(const GramMatrix& g);

/// det(G) as the squared product of the Cholesky diagonal.
double gram_determinant(const GramMatrix& g);

/// Eigenvalues by the alternating Cholesky iteration B = A A^T -> A^T A, with shifts
/// B - s I = A A^T -> A^T A + s I (s below the smallest eigenvalue) and deflation of
/// converged trailing rows. Each step is a similarity, so the spectrum is preserved.
///
/// Stops once the largest off-diagonal magnitude drops below tol * trace; iterations
/// counts Cholesky steps. On non-convergence returns the current diagonal with
/// converged = false. Singular semidefinite blocks are factored under a small negative
/// shift (at most 1e-8 * trace); throws NumericalError when G is indefinite beyond that.
SpectralResult alt_cholesky_eigs(const GramMatrix& g, int max_iter = 500, double tol = 1e-12);

/// Reference eigenvalues by cyclic Jacobi rotations; stops when the off-diagonal
/// Frobenius norm is below tol times the Frobenius norm of G.
SpectralResult jacobi_eigs(const GramMatrix& g, double tol = 1e-14);

/// Jacobi on a real symmetric matrix; eigenvalues descending.
SpectralResult jacobi_eigs_real(const RealMatrix& a, double tol = 1e-14);

}  // namespace kforge
