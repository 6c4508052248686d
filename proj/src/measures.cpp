#include "kforge/measures.hpp"

#include "kforge/error.hpp"

#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kforge {

namespace {

constexpr int max_lebesgue_resolution = 30;
constexpr int max_cantor_resolution = 24;

// e(f) = exp(2 pi i f).
Complex unit_phase(double f) {
    return {boost::math::cos_pi(2.0 * f), boost::math::sin_pi(2.0 * f)};
}

template <typename T>
T pairwise_sum_impl(std::span<const T> v) {
    if (v.size() <= 8) {
        T s{};
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum_impl(v.first(half)) + pairwise_sum_impl(v.subspan(half));
}

}  // namespace

std::string MeasureModel::name() const {
    return kind == MeasureKind::lebesgue ? "lebesgue" : "cantor4";
}

double MeasureModel::interval_mass(double a, double b) const {
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    if (b <= a) return 0.0;
    return kind == MeasureKind::lebesgue ? b - a : mu4_cdf(b) - mu4_cdf(a);
}

MeasureModel parse_measure(const std::string& name, int depth) {
    if (depth < 0) throw InputError("measure depth must be >= 0");
    if (name == "lebesgue" || name == "lambda1") return MeasureModel::lebesgue(depth);
    if (name == "cantor4" || name == "mu4") return MeasureModel::cantor4(depth);
    throw InputError("unknown measure '" + name + "'");
}

double PartitionCells::total_mass() const {
    std::vector<double> m(cells.size());
    std::transform(cells.begin(), cells.end(), m.begin(), [](const Cell& c) { return c.mass; });
    return pairwise_sum(m);
}

PartitionCells cells(const MeasureModel& m, int resolution) {
    if (resolution < 0) throw InputError("resolution must be >= 0");
    PartitionCells out;
    const std::size_t count = std::size_t{1} << resolution;
    const double mass = std::ldexp(1.0, -resolution);
    if (m.kind == MeasureKind::lebesgue) {
        if (resolution > max_lebesgue_resolution) throw InputError("lebesgue resolution too large");
        out.cells.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            out.cells.push_back({static_cast<double>(i) * mass, static_cast<double>(i + 1) * mass, mass});
        }
        return out;
    }
    if (resolution > max_cantor_resolution) throw InputError("cantor4 resolution too large");
    const double width = std::ldexp(1.0, -2 * resolution);
    out.cells.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        // Most significant bit of k selects the first map; bit 1 means (x+2)/4.
        double left = 0.0;
        for (int j = 1; j <= resolution; ++j) {
            if ((k >> (resolution - j)) & 1U) left += std::ldexp(2.0, -2 * j);
        }
        out.cells.push_back({left, left + width, mass});
    }
    return out;
}

double mu4_cdf(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("mu4_cdf argument must lie in [0,1]");
    if (x == 1.0) return 1.0;
    double acc = 0.0;
    double w = 1.0;
    double y = x;
    for (int i = 0; i < 64 && y != 0.0; ++i) {
        y *= 4.0;
        const double d = std::floor(y);
        y -= d;
        switch (static_cast<int>(d)) {
            case 0: w *= 0.5; break;
            case 1: return acc + 0.5 * w;
            case 2:
                acc += 0.5 * w;
                w *= 0.5;
                break;
            default: return acc + w;
        }
    }
    return acc;
}

bool in_lambda4(std::uint64_t v) {
    for (; v != 0; v /= 4) {
        if (v % 4 > 1) return false;
    }
    return true;
}

std::vector<std::uint64_t> lambda4(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0;; ++i) {
        // Binary digits of i become base-4 digits.
        std::uint64_t v = 0;
        for (int bit = 0; bit < 32; ++bit) {
            if ((i >> bit) & 1U) v |= std::uint64_t{1} << (2 * bit);
        }
        if (v >= limit) break;
        out.push_back(v);
    }
    return out;
}

GeneratingFunction generating_function(Complex s, int truncation) {
    if (!(std::abs(s) < 1.0)) throw DomainError("generating function needs |s| < 1");
    if (truncation < 1 || truncation > 24) throw InputError("truncation must lie in [1, 24]");

    std::vector<Complex> powers(static_cast<std::size_t>(truncation));  // s^{4^n}
    Complex p = s;
    for (auto& v : powers) {
        v = p;
        p *= p;
        p *= p;
    }

    GeneratingFunction out;
    out.product = 1.0;
    for (const auto& v : powers) out.product *= 1.0 + v;

    const std::size_t terms = std::size_t{1} << truncation;
    std::vector<Complex> summands(terms);
    for (std::size_t i = 0; i < terms; ++i) {
        Complex t{1.0, 0.0};
        for (int bit = 0; bit < truncation; ++bit) {
            if ((i >> bit) & 1U) t *= powers[static_cast<std::size_t>(bit)];
        }
        summands[i] = t;
    }
    out.sum = pairwise_sum(summands);

    const double rn = std::pow(std::abs(s), std::pow(4.0, truncation));
    out.gap_bound = std::abs(out.product) * std::expm1(rn / (1.0 - rn));
    return out;
}

Mu4Fourier mu4_fourier(double t, int truncation, int resolution) {
    if (truncation < 1) throw InputError("truncation must be >= 1");
    Mu4Fourier out{Complex{1.0, 0.0}, Complex{1.0, 0.0}, Complex{}};
    for (int k = 1; k <= truncation; ++k) {
        const double scale = std::ldexp(1.0, -2 * k);
        out.displayed *= 0.5 * (1.0 + std::exp(Complex(0.0, std::numbers::pi * t * scale)));
        out.ifs *= 0.5 * (1.0 + unit_phase(2.0 * t * scale));
    }
    out.quadrature = integrate_complex(MeasureModel::cantor4(resolution),
                                       [t](double x) { return unit_phase(t * x); }, resolution);
    return out;
}

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v); }
Complex pairwise_sum(std::span<const Complex> v) { return pairwise_sum_impl(v); }

double integrate(const MeasureModel& m, const std::function<double(double)>& f, int resolution) {
    const auto part = cells(m, resolution);
    std::vector<double> terms(part.size());
    for (std::size_t i = 0; i < part.size(); ++i) terms[i] = part.cells[i].mass * f(part.cells[i].a);
    return pairwise_sum(terms);
}

Complex integrate_complex(const MeasureModel& m, const std::function<Complex(double)>& f, int resolution) {
    const auto part = cells(m, resolution);
    std::vector<Complex> terms(part.size());
    for (std::size_t i = 0; i < part.size(); ++i) terms[i] = part.cells[i].mass * f(part.cells[i].a);
    return pairwise_sum(terms);
}

GramMatrix fourier_gram(std::span<const std::uint64_t> lams, int resolution, bool allow_any) {
    for (auto l : lams) {
        if (!allow_any && !in_lambda4(l)) {
            throw InputError("frequency " + std::to_string(l) + " is not in the Cantor spectrum");
        }
    }
    const auto part = cells(MeasureModel::cantor4(resolution), resolution);
    const auto n = static_cast<Eigen::Index>(lams.size());
    ComplexMatrix m(n, n);
    std::vector<Complex> terms(part.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double diff = static_cast<double>(static_cast<std::int64_t>(lams[static_cast<std::size_t>(j)]) -
                                                    static_cast<std::int64_t>(lams[static_cast<std::size_t>(i)]));
            for (std::size_t k = 0; k < part.size(); ++k) {
                const double phase = diff * part.cells[k].a;
                terms[k] = part.cells[k].mass * unit_phase(phase - std::floor(phase));
            }
            const Complex v = pairwise_sum(terms);
            m(i, j) = (i == j) ? Complex(v.real(), 0.0) : v;
            m(j, i) = std::conj(m(i, j));
        }
    }
    std::vector<Point> pts;
    for (auto l : lams) pts.push_back(Point::real(static_cast<double>(l)));
    return GramMatrix(std::move(m), SampleSet(std::move(pts)));
}

}  // namespace kforge
