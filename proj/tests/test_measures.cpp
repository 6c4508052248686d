#include "kforge/error.hpp"
#include "kforge/measures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace kforge;

namespace {

// Spectrum via the recursion Lambda = {0, 1} + 4 Lambda, independent of the digit test.
std::set<std::uint64_t> lambda_recursive(std::uint64_t limit) {
    std::set<std::uint64_t> s{0};
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto v : std::set<std::uint64_t>(s)) {
            for (std::uint64_t d : {0, 1}) {
                const auto w = 4 * v + d;
                if (w < limit && s.insert(w).second) grew = true;
            }
        }
    }
    return s;
}

}  // namespace

TEST_CASE("cells examples") {
    const auto c1 = cells(MeasureModel::cantor4(), 1);
    REQUIRE(c1.size() == 2);
    CHECK(c1.cells[0].a == 0.0);
    CHECK(c1.cells[0].b == 0.25);
    CHECK(c1.cells[1].a == 0.5);
    CHECK(c1.cells[1].b == 0.75);
    CHECK(c1.cells[0].mass == 0.5);
    CHECK(c1.cells[1].mass == 0.5);

    for (const auto& m : {MeasureModel::lebesgue(), MeasureModel::cantor4()}) {
        const auto c0 = cells(m, 0);
        REQUIRE(c0.size() == 1);
        CHECK(c0.cells[0].a == 0.0);
        CHECK(c0.cells[0].b == 1.0);
        CHECK(c0.cells[0].mass == 1.0);
    }
    const auto l2 = cells(MeasureModel::lebesgue(), 2);
    REQUIRE(l2.size() == 4);
    for (const auto& c : l2.cells) CHECK(c.mass == 0.25);
}

TEST_CASE("cantor cells: count, mass, length, disjointness") {
    for (int d = 0; d <= 12; ++d) {
        const auto c = cells(MeasureModel::cantor4(), d);
        CHECK(c.size() == (std::size_t{1} << d));
        CHECK(std::abs(c.total_mass() - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(c.cells[i].mass == std::ldexp(1.0, -d));
            CHECK(c.cells[i].b - c.cells[i].a == std::ldexp(1.0, -2 * d));
            if (i > 0) CHECK(c.cells[i].a > c.cells[i - 1].b);
        }
        const auto l = cells(MeasureModel::lebesgue(), d);
        CHECK(std::abs(l.total_mass() - 1.0) <= 1e-12);
    }
}

TEST_CASE("mu4_cdf values") {
    CHECK(mu4_cdf(0.0) == 0.0);
    CHECK(mu4_cdf(1.0) == 1.0);
    CHECK(mu4_cdf(0.25) == 0.5);
    CHECK(mu4_cdf(0.5) == 0.5);
    CHECK(mu4_cdf(0.75) == 1.0);
    CHECK_THROWS_AS(mu4_cdf(-0.1), DomainError);
    CHECK_THROWS_AS(mu4_cdf(1.5), DomainError);
}

TEST_CASE("mu4_cdf agrees with cell counting") {
    // Left endpoint of the k-th cell at depth d carries CDF k 2^-d.
    for (int d : {1, 3, 8}) {
        const auto c = cells(MeasureModel::cantor4(), d);
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK(mu4_cdf(c.cells[k].a) == doctest::Approx(std::ldexp(static_cast<double>(k), -d)).epsilon(1e-15));
        }
    }
    // 1/4 by counting the depth-8 cells inside [0, 1/4].
    const auto c8 = cells(MeasureModel::cantor4(), 8);
    double mass = 0.0;
    for (const auto& c : c8.cells) {
        if (c.b <= 0.25) mass += c.mass;
    }
    CHECK(mu4_cdf(0.25) == doctest::Approx(mass));
}

TEST_CASE("mu4_cdf is monotone and flat on the first gaps") {
    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = i / 10000.0;
        const double v = mu4_cdf(x);
        CHECK(v >= prev);
        prev = v;
        if (x > 0.25 && x < 0.5) CHECK(v == 0.5);
        if (x > 0.75) CHECK(v == 1.0);
    }
}

TEST_CASE("lambda4") {
    CHECK(lambda4(66) == std::vector<std::uint64_t>{0, 1, 4, 5, 16, 17, 20, 21, 64, 65});
    CHECK(lambda4(1) == std::vector<std::uint64_t>{0});
    CHECK(lambda4(0).empty());

    const auto l256 = lambda4(256);
    std::set<std::uint64_t> expected{0, 1};
    for (auto v : l256) {
        if (4 * v <= 252) {
            expected.insert(4 * v);
            expected.insert(4 * v + 1);
        }
    }
    CHECK(std::set<std::uint64_t>(l256.begin(), l256.end()) == expected);

    const auto big = lambda4(4096);
    CHECK(std::set<std::uint64_t>(big.begin(), big.end()) == lambda_recursive(4096));
    for (auto v : big) CHECK(in_lambda4(v));
    CHECK_FALSE(in_lambda4(2));
    CHECK_FALSE(in_lambda4(7));
}

TEST_CASE("generating_function") {
    const auto z = generating_function({0.0, 0.0}, 3);
    CHECK(z.product == Complex(1.0));
    CHECK(z.sum == Complex(1.0));
    CHECK(z.gap_bound == 0.0);

    const auto h = generating_function({0.5, 0.0}, 3);
    const double direct = 1.5 * (1.0 + std::pow(0.5, 4)) * (1.0 + std::pow(0.5, 16));
    CHECK(h.product.real() == doctest::Approx(direct).epsilon(1e-15));
    CHECK(h.sum.real() == doctest::Approx(direct).epsilon(1e-14));
    CHECK(h.product.real() == doctest::Approx(1.59378).epsilon(1e-5));

    CHECK_THROWS_AS(generating_function({1.0, 0.0}, 2), DomainError);
    CHECK_THROWS_AS(generating_function({0.6, 0.8}, 2), DomainError);

    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 100; ++i) {
        Complex s{u(rng), u(rng)};
        if (std::abs(s) > 0.9) s *= 0.9 / std::abs(s);
        const int n = 1 + i % 4;
        const auto g = generating_function(s, n);
        CHECK(std::abs(g.product - g.sum) <= 1e-12);
        if (n >= 2) {
            const auto inner = generating_function(std::pow(s, 4), n - 1);
            CHECK(std::abs(g.product - (1.0 + s) * inner.product) <= 1e-14);
        }
        // The gap bound covers the distance to a much longer truncation.
        const auto far = generating_function(s, 12);
        CHECK(std::abs(far.product - g.product) <= g.gap_bound + 1e-15);
    }
}

TEST_CASE("mu4_fourier") {
    const auto zero = mu4_fourier(0.0, 6, 8);
    CHECK(zero.displayed == Complex(1.0));
    CHECK(zero.ifs == Complex(1.0));
    CHECK(std::abs(zero.quadrature - 1.0) < 1e-15);
    for (double t : {0.3, 1.0, 5.5, 17.0, 100.0}) {
        const auto r = mu4_fourier(t, 10, 10);
        CHECK(std::abs(r.displayed) <= 1.0 + 1e-15);
        CHECK(std::abs(r.ifs) <= 1.0 + 1e-15);
        // The discrete measure at depth d has exactly the d-factor product as its transform.
        CHECK(std::abs(r.ifs - r.quadrature) < 1e-12);
        // The displayed formula is the transform at t / 4.
        CHECK(std::abs(r.displayed - mu4_fourier(t / 4.0, 10, 10).ifs) < 1e-12);
    }
}

TEST_CASE("integrate") {
    for (const auto& m : {MeasureModel::lebesgue(), MeasureModel::cantor4()}) {
        CHECK(integrate(m, [](double) { return 1.0; }, 6) == doctest::Approx(1.0).epsilon(1e-15));
    }
    for (int r : {2, 6, 10}) {
        const double c = integrate(MeasureModel::cantor4(), [](double x) { return x; }, r);
        CHECK(std::abs(c - 1.0 / 3.0) <= std::ldexp(1.0, -2 * r));
        const double l = integrate(MeasureModel::lebesgue(), [](double x) { return x; }, r);
        CHECK(std::abs(l - 0.5) <= std::ldexp(1.0, -r));
    }
}

TEST_CASE("fourier_gram") {
    const auto lams = lambda4(66);
    const std::vector<std::uint64_t> first8(lams.begin(), lams.begin() + 8);
    const auto g = fourier_gram(first8, 12);
    for (Eigen::Index i = 0; i < g.n(); ++i) CHECK(g.entries(i, i) == Complex(1.0));
    CHECK(std::abs(g.entries(0, 1)) <= 0.01);

    double prev = 1e300;
    for (int r = 4; r <= 12; ++r) {
        ComplexMatrix off = fourier_gram(first8, r).entries;
        off.diagonal().setZero();
        const double norm = inf_norm(off);
        CHECK(norm <= prev + 1e-12);
        prev = norm;
    }
    CHECK(prev <= 0.01);

    const std::vector<std::uint64_t> bad{0, 2};
    CHECK_THROWS_AS(fourier_gram(bad, 6), InputError);
    const auto any = fourier_gram(bad, 10, true);
    CHECK(std::abs(any.entries(0, 1)) > 0.1);
}
