#pragma once

#include "kforge/gram.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kforge {

enum class MeasureKind { lebesgue, cantor4 };

/// Lebesgue measure on [0,1] or the 4-adic Cantor measure, fixed by the maps
/// x/4 and (x+2)/4 with equal weights.
struct MeasureModel {
    MeasureKind kind = MeasureKind::lebesgue;
    int depth = 0;  // default partition resolution

    static MeasureModel lebesgue(int depth = 0) { return {MeasureKind::lebesgue, depth}; }
    static MeasureModel cantor4(int depth = 0) { return {MeasureKind::cantor4, depth}; }

    [[nodiscard]] std::string name() const;
    /// Measure of the closed interval [a, b] (clipped to [0,1]); zero when b < a.
    [[nodiscard]] double interval_mass(double a, double b) const;

    friend bool operator==(const MeasureModel&, const MeasureModel&) = default;
};

MeasureModel parse_measure(const std::string& name, int depth);

struct Cell {
    double a = 0.0;
    double b = 0.0;
    double mass = 0.0;
};

/// Disjoint cells ordered left to right; the representative of a cell is its left endpoint.
struct PartitionCells {
    std::vector<Cell> cells;

    [[nodiscard]] std::size_t size() const noexcept { return cells.size(); }
    [[nodiscard]] double representative(std::size_t i) const { return cells[i].a; }
    [[nodiscard]] double total_mass() const;
};

/// Lebesgue: 2^resolution dyadic cells. Cantor: the 2^resolution images of [0,1]
/// under all words of the two contractions, each of length 4^-resolution.
PartitionCells cells(const MeasureModel& m, int resolution);

/// Distribution function of the Cantor measure via its base-4 digit walk.
double mu4_cdf(double x);

/// Ascending nonnegative integers below limit whose base-4 digits are all 0 or 1.
std::vector<std::uint64_t> lambda4(std::uint64_t limit);

/// True when every base-4 digit of v is 0 or 1.
bool in_lambda4(std::uint64_t v);

struct GeneratingFunction {
    Complex product;   // prod_{n<N} (1 + s^{4^n})
    Complex sum;       // sum of s^l over spectrum elements l < 4^N
    double gap_bound;  // bound on |F(s) - product|
};

/// Truncated generating function of the spectrum; throws DomainError when |s| >= 1.
GeneratingFunction generating_function(Complex s, int truncation);

struct Mu4Fourier {
    Complex displayed;   // prod_{k=1}^{N} (1 + e^{i pi t / 4^k}) / 2
    Complex ifs;         // prod_{k=1}^{N} (1 + e(2 t / 4^k)) / 2, from the defining maps with e(t) = e^{2 pi i t}
    Complex quadrature;  // sum over cells at the given resolution of mass * e(t * left endpoint)
};

Mu4Fourier mu4_fourier(double t, int truncation, int resolution);

/// Left-endpoint quadrature sum_i m_i f(a_i), reduced pairwise in cell order.
double integrate(const MeasureModel& m, const std::function<double(double)>& f, int resolution);
Complex integrate_complex(const MeasureModel& m, const std::function<Complex(double)>& f, int resolution);

/// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> v);
Complex pairwise_sum(std::span<const Complex> v);

/// Gram matrix of e(l t), l in lams, in L^2 of the Cantor measure by quadrature.
/// Entries off the spectrum are rejected unless allow_any is set.
GramMatrix fourier_gram(std::span<const std::uint64_t> lams, int resolution, bool allow_any = false);

}  // namespace kforge
