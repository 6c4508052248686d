#pragma once

#include "kforge/kernels.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kforge {

enum class ParsevalVerdict { parseval, not_parseval, inconclusive };
std::string verdict_name(ParsevalVerdict v);

struct ParsevalPoint {
    Point x;
    double diagonal = 0.0;     // K(x, x)
    double partial_sum = 0.0;  // sum over the truncated set of |K(x, s)|^2
    double deficit = 0.0;      // |K(x, x) - partial_sum|
    std::optional<double> tail_bound;
};

/// Parseval test of {K(., s)} over a truncated sample set, plus frame bounds on its span
/// when the set is small enough for a dense eigen-decomposition.
struct FrameReport {
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
    double parseval_deficit = 0.0;  // max over test points
    std::size_t truncation = 0;
    double tolerance = 0.0;
    std::vector<ParsevalPoint> points;
    ParsevalVerdict verdict = ParsevalVerdict::inconclusive;
};

/// Compares K(x, x) with sum_{s in S} |K(x, s)|^2 at each test point. For shannon on
/// S = {-N, ..., N} the neglected tail is bounded by 2 / (pi^2 (N - |x|)).
///
/// Verdict: parseval when every deficit is within tol plus its tail bound; not_parseval
/// when a partial sum already exceeds K(x, x) + tol, or the deficit exceeds a known tail;
/// inconclusive otherwise.
FrameReport parseval_check(const KernelSpec& spec, const SampleSet& S, const std::vector<Point>& test_points,
                           std::size_t truncation, double tol = 1e-10);

/// Sample set {-N, ..., N} or {1, ..., N} on the real line.
SampleSet integer_samples(std::size_t n, bool positive_only = false);

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// [lambda_min(K_S), lambda_max(K_S)], the range of sum_s |f(s)|^2 / ||f||^2 on
/// span{K(., s)}. Throws NumericalError when K_S is singular.
FrameBounds frame_bounds(const KernelSpec& spec, const SampleSet& S);

/// sum_s (K_S^{-1} f_S)(s) K(t, s) at each t, through an explicit inverse of K_S.
std::vector<Complex> frame_reconstruct(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> f_samples,
                                       const std::vector<Point>& eval_points);

/// Nonzero finite-energy function vanishing at every knot: a tent of slope c_n on each
/// [x_n, x_{n+1}].
struct SawtoothWitness {
    std::vector<double> knots;
    std::vector<double> slopes;  // one per gap
    double norm_sq = 0.0;        // sum c_n^2 (x_{n+1} - x_n)
    std::vector<double> norm_sq_partial;

    [[nodiscard]] double operator()(double x) const;
    /// <f, K(., x_n)> for brownian-min, as the signed sum of the rising and falling
    /// halves of every tent left of x_n; one value per knot.
    [[nodiscard]] std::vector<double> inner_products() const;
};

/// Harmonic slopes c_n = 1 / (n sqrt(x_{n+1} - x_n)), so norm_sq partial sums are sum 1/n^2.
SawtoothWitness sawtooth_witness(std::span<const double> knots);
/// Custom slopes, one per gap.
SawtoothWitness sawtooth_witness(std::span<const double> knots, std::span<const double> slopes);

}  // namespace kforge
