#include "kforge/kernels.hpp"

#include "kforge/error.hpp"
#include "kforge/factorize.hpp"

#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kforge {

namespace {

bool is_real_domain(Domain d) { return d == Domain::real_line || d == Domain::unit_interval; }

double overlap_mass(const MeasureModel& m, const Point& a, const Point& b) {
    double total = 0.0;
    for (const auto& [a0, a1] : a.parts()) {
        for (const auto& [b0, b1] : b.parts()) {
            const double lo = std::max(a0, b0);
            const double hi = std::min(a1, b1);
            if (lo < hi) total += m.interval_mass(lo, hi);
        }
    }
    return total;
}

Complex cantor_partial_product(Complex zw, int truncation) {
    Complex prod{1.0, 0.0};
    Complex term = zw;
    for (int n = 0; n < truncation; ++n) {
        prod *= 1.0 + term;
        term *= term;
        term *= term;
    }
    return prod;
}

}  // namespace

std::string family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::brownian_min: return "brownian-min";
        case KernelFamily::brownian_line: return "brownian-line";
        case KernelFamily::szego: return "szego";
        case KernelFamily::cantor_product: return "cantor-product";
        case KernelFamily::shannon: return "shannon";
        case KernelFamily::drury_arveson: return "drury-arveson";
        case KernelFamily::overlap: return "overlap";
        case KernelFamily::green_1d: return "green-1d";
    }
    return "unknown";
}

KernelFamily parse_family(const std::string& name) {
    for (auto f : {KernelFamily::brownian_min, KernelFamily::brownian_line, KernelFamily::szego,
                   KernelFamily::cantor_product, KernelFamily::shannon, KernelFamily::drury_arveson,
                   KernelFamily::overlap, KernelFamily::green_1d}) {
        if (family_name(f) == name) return f;
    }
    throw InputError("unknown kernel family '" + name + "'");
}

std::string KernelSpec::name() const {
    std::string s = family_name(family);
    switch (family) {
        case KernelFamily::cantor_product: s += "(N=" + std::to_string(truncation) + ")"; break;
        case KernelFamily::drury_arveson: s += "(k=" + std::to_string(dimension) + ")"; break;
        case KernelFamily::overlap: s += "(" + measure.name() + ")"; break;
        default: break;
    }
    return s;
}

bool KernelSpec::is_real() const {
    switch (family) {
        case KernelFamily::szego:
        case KernelFamily::cantor_product:
        case KernelFamily::drury_arveson: return false;
        default: return true;
    }
}

void KernelSpec::check_domain(const Point& p) const {
    const auto fail = [&](const std::string& why) {
        throw DomainError(name() + ": " + why + " at " + p.to_string());
    };
    switch (family) {
        case KernelFamily::brownian_min:
            if (!is_real_domain(p.domain())) fail("expected a real point");
            if (!(p.x() >= 0.0)) fail("argument must be >= 0");
            break;
        case KernelFamily::brownian_line:
        case KernelFamily::shannon:
            if (!is_real_domain(p.domain())) fail("expected a real point");
            if (!std::isfinite(p.x())) fail("argument must be finite");
            break;
        case KernelFamily::green_1d:
            if (!is_real_domain(p.domain())) fail("expected a real point");
            if (!(p.x() >= 0.0 && p.x() <= 1.0)) fail("argument must lie in [0,1]");
            break;
        case KernelFamily::szego:
        case KernelFamily::cantor_product:
            if (p.domain() != Domain::complex_disk) fail("expected a complex-disk point");
            if (!(std::norm(p.z()) < 1.0)) fail("|z| must be < 1");
            break;
        case KernelFamily::drury_arveson: {
            if (p.domain() != Domain::complex_vector || p.dimension() != dimension) {
                fail("expected a complex-vector(" + std::to_string(dimension) + ") point");
            }
            double r2 = 0.0;
            for (const auto& z : p.zs()) r2 += std::norm(z);
            if (!(r2 < 1.0)) fail("sum |z_j|^2 must be < 1");
            break;
        }
        case KernelFamily::overlap:
            if (p.domain() != Domain::interval_set) fail("expected an interval-set point");
            break;
    }
}

Complex eval_kernel(const KernelSpec& spec, const Point& x, const Point& y) {
    spec.check_domain(x);
    spec.check_domain(y);
    Complex v;
    switch (spec.family) {
        case KernelFamily::brownian_min: v = std::min(x.x(), y.x()); break;
        case KernelFamily::brownian_line: {
            const double a = x.x();
            const double b = y.x();
            v = (a * b < 0.0) ? 0.0 : std::min(std::abs(a), std::abs(b));
            break;
        }
        case KernelFamily::szego: v = 1.0 / (1.0 - std::conj(x.z()) * y.z()); break;
        case KernelFamily::cantor_product:
            if (spec.truncation < 1) throw InputError("cantor-product truncation must be >= 1");
            v = cantor_partial_product(std::conj(x.z()) * y.z(), spec.truncation);
            break;
        case KernelFamily::shannon: {
            const double d = x.x() - y.x();
            v = (d == 0.0) ? 1.0 : boost::math::sin_pi(d) / (std::numbers::pi * d);
            break;
        }
        case KernelFamily::drury_arveson: {
            const auto zs = x.zs();
            const auto ws = y.zs();
            Complex inner{0.0, 0.0};
            for (std::size_t j = 0; j < zs.size(); ++j) inner += std::conj(zs[j]) * ws[j];
            v = 1.0 / (1.0 - inner);
            break;
        }
        case KernelFamily::overlap: v = overlap_mass(spec.measure, x, y); break;
        case KernelFamily::green_1d: {
            const double a = x.x();
            const double b = y.x();
            v = std::min(a, b) - a * b;
            break;
        }
    }
    return spec.scale * v;
}

double cantor_tail_bound(Complex zw, int truncation) {
    const double r = std::abs(zw);
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::pow(r, std::pow(4.0, truncation));
}

GramMatrix gram(const KernelSpec& spec, const SampleSet& points) {
    points.require_distinct();
    for (const auto& p : points) spec.check_domain(p);
    const auto n = static_cast<Eigen::Index>(points.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& xi = points[static_cast<std::size_t>(i)];
        m(i, i) = Complex(eval_kernel(spec, xi, xi).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = eval_kernel(spec, xi, points[static_cast<std::size_t>(j)]);
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return GramMatrix(std::move(m), points);
}

ComplexMatrix cross_gram(const KernelSpec& spec, const std::vector<Point>& rows, const SampleSet& cols) {
    ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval_kernel(spec, rows[i], cols[j]);
        }
    }
    return m;
}

PsdVerdict validate_psd(const GramMatrix& g, double tol) {
    if (g.n() == 0) return {true, std::numeric_limits<double>::infinity()};
    const auto spectrum = jacobi_eigs(g);
    const double lo = spectrum.eigenvalues.back();
    return {lo >= -tol * std::max(1.0, g.max_diagonal()), lo};
}

OverlapNorm overlap_rkhs_norm(const MeasureModel& measure, std::span<const double> phi,
                              const std::vector<Point>& sets) {
    const auto partition = cells(measure, measure.depth);
    if (phi.size() != partition.size()) {
        throw InputError("phi needs one value per cell (" + std::to_string(partition.size()) + ")");
    }

    OverlapNorm out;
    std::vector<double> weighted(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) weighted[i] = phi[i] * phi[i] * partition.cells[i].mass;
    out.l2_norm = std::sqrt(pairwise_sum(weighted));

    constexpr double eps = 1e-12;
    for (const auto& set : sets) {
        double value = 0.0;
        for (std::size_t i = 0; i < partition.size(); ++i) {
            const auto& c = partition.cells[i];
            bool inside = false;
            for (const auto& [a, b] : set.parts()) {
                const bool contains = a <= c.a + eps && c.b <= b + eps;
                const bool disjoint = b <= c.a + eps || a >= c.b - eps;
                if (!contains && !disjoint) {
                    throw InputError("set " + set.to_string() + " is not a union of whole cells");
                }
                inside = inside || contains;
            }
            if (inside) value += phi[i] * c.mass;
        }
        out.set_values.push_back(value);
    }

    // Finite-Gram route on the cell indicators.
    std::vector<Point> indicators;
    ComplexVector values(static_cast<Eigen::Index>(partition.size()));
    for (std::size_t i = 0; i < partition.size(); ++i) {
        const std::pair<double, double> part{partition.cells[i].a, partition.cells[i].b};
        indicators.push_back(Point::intervals(std::span(&part, 1)));
        values(static_cast<Eigen::Index>(i)) = phi[i] * partition.cells[i].mass;
    }
    const auto g = gram(KernelSpec::overlap(measure), SampleSet(std::move(indicators)));
    const auto factor = cholesky(g, 0.0, 1e-300);
    const auto coeffs = cholesky_solve(factor, values);
    out.gram_norm = std::sqrt(std::max(0.0, values.dot(coeffs).real()));
    return out;
}

}  // namespace kforge
