#include "kforge/error.hpp"
#include "kforge/kernels.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

using namespace kforge;

namespace {

Point disk(double re, double im = 0.0) { return Point::complex({re, im}); }

Point set_of(std::initializer_list<std::pair<double, double>> parts) {
    std::vector<std::pair<double, double>> v(parts);
    return Point::intervals(v);
}

double min_eig(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("eval_kernel reference values") {
    CHECK(eval_kernel(KernelSpec::brownian_min(), Point::real(2), Point::real(3)) == Complex(2.0));
    CHECK(eval_kernel(KernelSpec::brownian_line(), Point::real(-1), Point::real(2)) == Complex(0.0));
    CHECK(eval_kernel(KernelSpec::brownian_line(), Point::real(-1), Point::real(-3)) == Complex(1.0));
    CHECK(eval_kernel(KernelSpec::szego(), disk(0), disk(0.3, -0.4)) == Complex(1.0));
    CHECK(eval_kernel(KernelSpec::shannon(), Point::real(0.7), Point::real(0.7)) == Complex(1.0));
    CHECK(eval_kernel(KernelSpec::shannon(), Point::real(0), Point::real(3)) == Complex(0.0));
    CHECK(eval_kernel(KernelSpec::green_1d(), Point::real(0.25), Point::real(0.5)).real() ==
          doctest::Approx(0.25 - 0.125));

    // Direct partial product 1.25 * 1.00390625 * (1 + 2^-32) * ...
    long double oracle = 1.0L;
    for (int n = 0; n < 8; ++n) oracle *= 1.0L + std::pow(0.25L, std::pow(4.0L, n));
    const auto v = eval_kernel(KernelSpec::cantor_product(8), disk(0.5), disk(0.5));
    CHECK(v.real() == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-15));
    CHECK(v.real() == doctest::Approx(1.2548828127921752).epsilon(1e-14));
}

TEST_CASE("complex kernels are conjugate-linear in the first argument") {
    const Point z = disk(0.3, 0.2);
    const Point w = disk(-0.1, 0.5);
    const Complex zw = std::conj(z.z()) * w.z();
    CHECK(std::abs(eval_kernel(KernelSpec::szego(), z, w) - 1.0 / (1.0 - zw)) < 1e-15);
    CHECK(std::abs(eval_kernel(KernelSpec::cantor_product(3), z, w) -
                   (1.0 + zw) * (1.0 + std::pow(zw, 4)) * (1.0 + std::pow(zw, 16))) < 1e-15);
    for (const auto& spec : {KernelSpec::szego(), KernelSpec::cantor_product(5)}) {
        CHECK(eval_kernel(spec, z, w) == std::conj(eval_kernel(spec, w, z)));
    }
    const std::vector<Complex> a{{0.1, 0.2}, {-0.3, 0.1}};
    const std::vector<Complex> b{{0.4, -0.1}, {0.2, 0.2}};
    const auto pa = Point::complex_vector(a);
    const auto pb = Point::complex_vector(b);
    const Complex inner = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
    CHECK(std::abs(eval_kernel(KernelSpec::drury_arveson(2), pa, pb) - 1.0 / (1.0 - inner)) < 1e-15);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval_kernel(KernelSpec::szego(), disk(1.0), disk(0.0)), DomainError);
    CHECK_THROWS_AS(eval_kernel(KernelSpec::szego(), Point::real(0.5), disk(0.0)), DomainError);
    CHECK_THROWS_AS(eval_kernel(KernelSpec::brownian_min(), Point::real(-1), Point::real(1)), DomainError);
    CHECK_THROWS_AS(eval_kernel(KernelSpec::green_1d(), Point::real(1.5), Point::real(0.5)), DomainError);
    const std::vector<Complex> big{{0.8, 0.0}, {0.0, 0.7}};
    CHECK_THROWS_AS(eval_kernel(KernelSpec::drury_arveson(2), Point::complex_vector(big), Point::complex_vector(big)),
                    DomainError);
    CHECK_THROWS_AS(set_of({{0.0, 0.5}, {0.4, 0.8}}), InputError);
    CHECK_THROWS_AS(set_of({{0.5, 0.2}}), InputError);
}

TEST_CASE("gram examples") {
    const std::vector<double> xs{1, 2, 3};
    const auto g = gram(KernelSpec::brownian_min(), real_points(xs));
    RealMatrix expected(3, 3);
    expected << 1, 1, 1, 1, 2, 2, 1, 2, 3;
    CHECK(g.is_real());
    CHECK(g.real() == expected);

    const std::vector<double> ints{-1, 0, 1};
    const auto s = gram(KernelSpec::shannon(), real_points(ints));
    CHECK(s.real() == RealMatrix::Identity(3, 3));

    const auto empty = gram(KernelSpec::brownian_min(), SampleSet{});
    CHECK(empty.n() == 0);

    const std::vector<double> dup{1, 2, 1};
    CHECK_THROWS_AS(gram(KernelSpec::brownian_min(), real_points(dup)), InputError);
}

TEST_CASE("validate_psd examples") {
    const auto id = validate_psd(GramMatrix::from_real(RealMatrix::Identity(2, 2)), 1e-8);
    CHECK(id.psd);
    CHECK(id.min_eigenvalue == doctest::Approx(1.0));

    RealMatrix m(2, 2);
    m << 1, 2, 2, 1;
    const auto bad = validate_psd(GramMatrix::from_real(m), 1e-8);
    CHECK_FALSE(bad.psd);
    CHECK(bad.min_eigenvalue == doctest::Approx(-1.0));

    const auto none = validate_psd(GramMatrix{}, 1e-8);
    CHECK(none.psd);
    CHECK(none.min_eigenvalue == std::numeric_limits<double>::infinity());
}

TEST_CASE("every family gives exactly Hermitian PSD Gram matrices on random sets") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 20);
    const auto overlap_lebesgue = KernelSpec::overlap(MeasureModel::lebesgue());
    const auto overlap_cantor = KernelSpec::overlap(MeasureModel::cantor4());
    for (int draw = 0; draw < 100; ++draw) {
        const int n = size(rng);
        const int family = draw % 9;
        KernelSpec spec;
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) {
            const double r = u(rng);
            const double th = 2.0 * M_PI * u(rng);
            switch (family) {
                case 0: spec = KernelSpec::brownian_min(); pts.push_back(Point::real(5.0 * r)); break;
                case 1: spec = KernelSpec::brownian_line(); pts.push_back(Point::real(10.0 * r - 5.0)); break;
                case 2: spec = KernelSpec::szego(); pts.push_back(disk(0.95 * r * std::cos(th), 0.95 * r * std::sin(th))); break;
                case 3: spec = KernelSpec::cantor_product(6); pts.push_back(disk(0.9 * r * std::cos(th), 0.9 * r * std::sin(th))); break;
                case 4: spec = KernelSpec::shannon(); pts.push_back(Point::real(20.0 * r - 10.0)); break;
                case 5: {
                    spec = KernelSpec::drury_arveson(3);
                    std::vector<Complex> z(3);
                    double norm = 0.0;
                    for (auto& c : z) {
                        c = {u(rng) - 0.5, u(rng) - 0.5};
                        norm += std::norm(c);
                    }
                    for (auto& c : z) c *= 0.95 * r / std::sqrt(norm);
                    pts.push_back(Point::complex_vector(z));
                    break;
                }
                case 6:
                case 7: {
                    spec = family == 6 ? overlap_lebesgue : overlap_cantor;
                    const double a = u(rng);
                    const double b = a + (1.0 - a) * u(rng);
                    const double c = u(rng) * a;
                    pts.push_back(Point::intervals(std::vector<std::pair<double, double>>{{c * 0.5, c}, {a, b}}));
                    break;
                }
                default: spec = KernelSpec::green_1d(); pts.push_back(Point::real(r)); break;
            }
        }
        SampleSet set(pts);
        bool distinct = true;
        try {
            set.require_distinct();
        } catch (const InputError&) {
            distinct = false;
        }
        if (!distinct) continue;
        const auto g = gram(spec, set);
        for (Eigen::Index i = 0; i < g.n(); ++i) {
            CHECK(g.entries(i, i).imag() == 0.0);
            for (Eigen::Index j = 0; j < g.n(); ++j) CHECK(g.entries(i, j) == std::conj(g.entries(j, i)));
        }
        const auto v = validate_psd(g, 1e-8);
        CHECK_MESSAGE(v.psd, spec.name(), " min eigenvalue ", v.min_eigenvalue);
        CHECK(v.min_eigenvalue == doctest::Approx(min_eig(g.entries)).epsilon(1e-6).scale(g.max_diagonal()));
    }
}

TEST_CASE("brownian determinant is x1 times the product of increments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> step(0.05, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> xs;
        double x = 0.0;
        double expected = 1.0;
        for (int i = 0; i < 12; ++i) {
            const double d = step(rng);
            x += d;
            expected *= d;
            xs.push_back(x);
        }
        const auto g = gram(KernelSpec::brownian_min(), real_points(xs));
        const double det = g.real().determinant();
        CHECK(std::abs(det - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("overlap kernel on disjoint sets is diagonal") {
    for (const auto& m : {MeasureModel::lebesgue(), MeasureModel::cantor4()}) {
        std::vector<Point> sets{set_of({{0.0, 0.2}}), set_of({{0.3, 0.5}, {0.9, 1.0}}), set_of({{0.6, 0.8}})};
        const auto g = gram(KernelSpec::overlap(m), SampleSet(sets));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) CHECK(g.entries(i, j) == Complex(0.0));
            }
        }
        CHECK(g.entries(1, 1).real() == doctest::Approx(m.interval_mass(0.3, 0.5) + m.interval_mass(0.9, 1.0)));
    }
}

TEST_CASE("overlap_rkhs_norm examples") {
    {
        const std::vector<double> phi{1.0};
        const auto r = overlap_rkhs_norm(MeasureModel::lebesgue(0), phi, {set_of({{0.0, 1.0}})});
        CHECK(r.l2_norm == doctest::Approx(1.0));
        CHECK(r.set_values.at(0) == doctest::Approx(1.0));
        CHECK(r.gram_norm == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        const std::vector<double> phi{1.0, 0.0};
        const auto r = overlap_rkhs_norm(MeasureModel::lebesgue(1), phi, {set_of({{0.0, 0.5}})});
        CHECK(r.l2_norm == doctest::Approx(std::sqrt(0.5)));
        CHECK(r.set_values.at(0) == doctest::Approx(0.5));
        CHECK(std::abs(r.gram_norm - r.l2_norm) < 1e-9);
    }
    {
        const std::vector<double> phi{1.0, 1.0};
        const auto r = overlap_rkhs_norm(MeasureModel::cantor4(1), phi, {set_of({{0.0, 0.25}})});
        CHECK(r.set_values.at(0) == doctest::Approx(0.5));
    }
    {
        const std::vector<double> phi{1.0, 1.0};
        CHECK_THROWS_AS(overlap_rkhs_norm(MeasureModel::lebesgue(1), phi, {set_of({{0.0, 0.3}})}), InputError);
    }
}

TEST_CASE("overlap RKHS norm equals the L2 norm for random piecewise-constant phi") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (const auto& m : {MeasureModel::lebesgue(5), MeasureModel::cantor4(4)}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto part = cells(m, m.depth);
            std::vector<double> phi(part.size());
            for (auto& v : phi) v = nd(rng);
            const auto r = overlap_rkhs_norm(m, phi, {});
            CHECK(std::abs(r.gram_norm - r.l2_norm) <= 1e-9 * std::max(1.0, r.l2_norm));
        }
    }
}

TEST_CASE("green-1d is the Dirichlet Green function") {
    const auto spec = KernelSpec::green_1d();
    const double y = 0.3;
    const double h = 1e-3;
    for (double x : {0.1, 0.2, 0.5, 0.8, 0.95}) {
        const auto k = [&](double t) { return eval_kernel(spec, Point::real(t), Point::real(y)).real(); };
        CHECK(std::abs(k(x - h) - 2.0 * k(x) + k(x + h)) < 1e-12);
    }
    CHECK(eval_kernel(spec, Point::real(0.0), Point::real(y)) == Complex(0.0));
    CHECK(eval_kernel(spec, Point::real(1.0), Point::real(y)) == Complex(0.0));
    // Jump of the derivative at y is -1.
    const auto k = [&](double t) { return eval_kernel(spec, Point::real(t), Point::real(y)).real(); };
    CHECK((k(y + h) - k(y)) / h - (k(y) - k(y - h)) / h == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("cantor product tail bound") {
    for (double r : {0.3, 0.6, 0.8}) {
        const Complex zw{r * 0.6, r * 0.8};
        for (int n = 1; n <= 3; ++n) {
            Complex full{1.0, 0.0};
            Complex partial{1.0, 0.0};
            Complex p = zw;
            for (int k = 0; k < 12; ++k) {
                full *= 1.0 + p;
                if (k < n) partial *= 1.0 + p;
                p = std::pow(p, 4);
            }
            CHECK(std::abs(std::log(full / partial)) <= cantor_tail_bound(zw, n) + 1e-15);
        }
    }
}
