#pragma once

#include "kforge/factorize.hpp"
#include "kforge/kernels.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kforge {

/// Finite kernel expansion sum_y c_y K(., y) over a set of centers.
class RkhsFunction {
public:
    RkhsFunction(KernelSpec spec, SampleSet centers, ComplexVector coeffs);

    [[nodiscard]] Complex operator()(const Point& t) const;
    [[nodiscard]] std::vector<Complex> evaluate(const std::vector<Point>& ts) const;
    /// c^* K_F c.
    [[nodiscard]] double norm_sq() const;

    [[nodiscard]] const SampleSet& centers() const noexcept { return centers_; }
    [[nodiscard]] const ComplexVector& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] const KernelSpec& kernel() const noexcept { return spec_; }

private:
    KernelSpec spec_;
    SampleSet centers_;
    ComplexVector coeffs_;
};

/// Orthogonal projection onto span{K(., y) : y in F}, from the samples h|_F:
/// P_F h = sum_y (K_F^{-1} h_F)(y) K(., y).
RkhsFunction project(const KernelSpec& spec, const SampleSet& F, std::span<const Complex> h_values);
std::vector<Complex> project(const KernelSpec& spec, const SampleSet& F, std::span<const Complex> h_values,
                             const std::vector<Point>& eval_points);

struct NormSequence {
    std::vector<double> sequence;  // <h_F, K_F^{-1} h_F> per chain level
    double sup = 0.0;
    bool monotone = true;          // nondecreasing up to slack 1e-10 * max(1, value)
};

/// Squared norms of the projections along a chain. h_values holds h at every chain point
/// (levels are prefixes, so level i uses the first chain_sizes()[i] values).
NormSequence rkhs_norm_sq(const KernelSpec& spec, const SampleSet& chain, std::span<const Complex> h_values);

enum class Membership { member, diverging, undetermined };
std::string membership_name(Membership m);

struct DeltaOptions {
    double cap = 1e6;      // diverging once (K_F^{-1})_{xx} exceeds this
    double growth = 1.5;   // diverging once the final ratio exceeds this
    double rtol = 1e-9;    // member once the final two levels agree to this
};

struct DeltaReport {
    std::vector<double> sequence;  // (K_F^{-1})_{xx} per level
    std::vector<std::size_t> level_sizes;
    double sup = 0.0;
    Membership verdict = Membership::undetermined;
};

/// Tests whether the Dirac mass at x has finite norm, via (K_F^{-1})_{xx} along the chain.
DeltaReport delta_membership(const KernelSpec& spec, const Point& x, const SampleSet& chain,
                             const DeltaOptions& options = {});

/// (K_S^{-1} h|_S)(x) for x in S.
std::vector<Complex> laplacian_apply(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> h_values);

struct GraphEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    Complex weight;
};

struct InducedGraph {
    SampleSet vertices;
    ComplexMatrix weights;  // K_S^{-1}
    std::vector<GraphEdge> edges;  // i < j, |D_ij| > threshold
    double threshold = 0.0;
};

/// Graph with weights D = K_S^{-1}; the default threshold is 1e-8 * max |D|.
InducedGraph induced_graph(const KernelSpec& spec, const SampleSet& S, std::optional<double> threshold = {});

/// Minimal-norm extension of h from S; the same operator as project with F = S.
std::vector<Complex> extend_spline(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> h_values,
                                   const std::vector<Point>& eval_points);

/// Piecewise-linear function through (0,0) and the knots, constant after the last knot.
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

    [[nodiscard]] double operator()(double x) const;
    /// Integral of |f'|^2.
    [[nodiscard]] double energy() const;
    [[nodiscard]] const std::vector<double>& xs() const noexcept { return xs_; }
    [[nodiscard]] const std::vector<double>& ys() const noexcept { return ys_; }

private:
    std::vector<double> xs_;  // starts at 0
    std::vector<double> ys_;
};

struct Interpolant {
    PiecewiseLinear f;
    double norm_sq = 0.0;
};

/// Minimal Cameron-Martin norm interpolant of 0 < x_1 < ... < x_N with f(0) = 0.
Interpolant min_norm_interpolant(std::span<const std::pair<double, double>> data);

}  // namespace kforge
