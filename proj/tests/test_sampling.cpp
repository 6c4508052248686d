#include "kforge/error.hpp"
#include "kforge/factorize.hpp"
#include "kforge/rkhs.hpp"
#include "kforge/sampling.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace kforge;

namespace {

double sinc(double d) { return d == 0.0 ? 1.0 : boost::math::sin_pi(d) / (std::numbers::pi * d); }

std::vector<Point> reals(std::initializer_list<double> xs) {
    std::vector<Point> out;
    for (double x : xs) out.push_back(Point::real(x));
    return out;
}

}  // namespace

TEST_CASE("integer sample sets") {
    CHECK(integer_samples(2).size() == 5);
    CHECK(integer_samples(2)[0].x() == -2.0);
    CHECK(integer_samples(3, true).size() == 3);
    CHECK(integer_samples(3, true)[0].x() == 1.0);
}

TEST_CASE("shannon Parseval at integers and off the lattice") {
    const auto at_int = parseval_check(KernelSpec::shannon(), integer_samples(50), reals({0.0, 3.0, -7.0}), 50);
    for (const auto& p : at_int.points) CHECK(p.deficit == 0.0);
    CHECK(at_int.verdict == ParsevalVerdict::parseval);
    REQUIRE(at_int.lower_bound);
    CHECK(*at_int.lower_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*at_int.upper_bound == doctest::Approx(1.0).epsilon(1e-12));

    const auto half = parseval_check(KernelSpec::shannon(), integer_samples(10000), reals({0.5}), 10000);
    CHECK(half.parseval_deficit <= 1e-4);
    REQUIRE(half.points[0].tail_bound);
    CHECK(half.points[0].deficit <= *half.points[0].tail_bound + 1e-10);
    CHECK(half.verdict == ParsevalVerdict::parseval);
    CHECK_FALSE(half.lower_bound);

    for (double x : {0.25, 0.5, 0.75}) {
        double prev = INFINITY;
        for (std::size_t n : {100u, 1000u, 10000u}) {
            const auto r = parseval_check(KernelSpec::shannon(), integer_samples(n), reals({x}), n);
            CHECK(r.parseval_deficit < prev);
            // Closed form of the tail: sin^2(pi x) / pi^2 * (trigamma(n + 1 - x) + trigamma(n + 1 + x)).
            const double s2 = boost::math::sin_pi(x) * boost::math::sin_pi(x);
            const double tail = s2 / (std::numbers::pi * std::numbers::pi) *
                                (boost::math::trigamma(n + 1.0 - x) + boost::math::trigamma(n + 1.0 + x));
            CHECK(std::abs(r.parseval_deficit - tail) <= 1e-9 * tail + 1e-13);
            prev = r.parseval_deficit;
        }
    }
}

TEST_CASE("brownian-min on the positive integers is not Parseval") {
    const auto r = parseval_check(KernelSpec::brownian_min(), integer_samples(20, true), reals({0.5}), 20);
    CHECK(r.verdict == ParsevalVerdict::not_parseval);
    // sum_s min(0.5, s)^2 = 20 / 4 = 5 > 0.5.
    CHECK(r.points[0].partial_sum == doctest::Approx(5.0));
}

TEST_CASE("frame bounds") {
    const auto S = integer_samples(5);
    const auto b = frame_bounds(KernelSpec::shannon(), S);
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-12));
    auto twice = KernelSpec::shannon();
    twice.scale = 2.0;
    const auto b2 = frame_bounds(twice, S);
    CHECK(b2.lower == doctest::Approx(2.0 * b.lower));
    CHECK(b2.upper == doctest::Approx(2.0 * b.upper));

    const std::vector<double> xs{1, 2, 3};
    const auto bm = frame_bounds(KernelSpec::brownian_min(), real_points(xs));
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram(KernelSpec::brownian_min(), real_points(xs)).entries.real());
    CHECK(bm.lower == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
    CHECK(bm.upper == doctest::Approx(es.eigenvalues()(2)).epsilon(1e-12));

    // Half-integer shannon samples: still a valid finite frame, bounds bracket the Rayleigh quotients.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> hs;
    for (int k = -6; k <= 6; ++k) hs.push_back(0.5 * k);
    const auto H = real_points(hs);
    const auto fb = frame_bounds(KernelSpec::shannon(), H);
    const RealMatrix K = gram(KernelSpec::shannon(), H).entries.real();
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd c(K.rows());
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = nd(rng);
        // f = sum c_j K(., s_j): sum_s |f(s)|^2 = c^T K^2 c, ||f||^2 = c^T K c.
        const double q = (K * c).squaredNorm() / c.dot(K * c);
        CHECK(q >= fb.lower * (1 - 1e-10));
        CHECK(q <= fb.upper * (1 + 1e-10));
    }

    CHECK_THROWS(frame_bounds(KernelSpec::brownian_min(), real_points(std::vector<double>{0.0, 1.0})));
}

TEST_CASE("frame reconstruction") {
    const auto S = integer_samples(5);
    // In-span function: f = 2 K(., 1) - 0.5 K(., -3).
    auto f = [](double t) { return 2.0 * sinc(t - 1.0) - 0.5 * sinc(t + 3.0); };
    std::vector<Complex> fs;
    for (const auto& s : S) fs.emplace_back(f(s.x()));
    const auto evals = reals({-4.3, -1.0, 0.0, 0.5, 2.5, 4.9});
    const auto rec = frame_reconstruct(KernelSpec::shannon(), S, fs, evals);
    for (std::size_t i = 0; i < evals.size(); ++i) CHECK(std::abs(rec[i] - f(evals[i].x())) <= 1e-10);

    const std::vector<double> xs{1, 2, 3};
    const auto P = real_points(xs);
    const std::vector<Complex> h{Complex(1.0), Complex(-2.0), Complex(0.5)};
    const auto ev = reals({0.0, 0.5, 1.5, 2.0, 4.0});
    const auto a = frame_reconstruct(KernelSpec::brownian_min(), P, h, ev);
    const auto b = project(KernelSpec::brownian_min(), P, h, ev);
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
    // Piecewise linear interpolation of (0,0),(1,1),(2,-2),(3,.5), flat after 3.
    CHECK(a[1].real() == doctest::Approx(0.5));
    CHECK(a[2].real() == doctest::Approx(-0.5));
    CHECK(a[4].real() == doctest::Approx(0.5));

    CHECK_THROWS_AS(frame_reconstruct(KernelSpec::shannon(), S, std::vector<Complex>{Complex(1.0)}, ev), InputError);
}

TEST_CASE("sawtooth witness, harmonic rule") {
    for (int N : {1, 5, 10, 40}) {
        std::vector<double> knots;
        for (int n = 1; n <= N + 1; ++n) knots.push_back(n);
        const auto w = sawtooth_witness(knots);
        REQUIRE(w.norm_sq_partial.size() == static_cast<std::size_t>(N));
        double s = 0.0;
        for (int n = 1; n <= N; ++n) {
            s += 1.0 / (static_cast<double>(n) * n);
            CHECK(std::abs(w.norm_sq_partial[n - 1] - s) <= 1e-12);
        }
        CHECK(std::abs(w.norm_sq - s) <= 1e-12);
        for (double k : knots) CHECK(w(k) == 0.0);
        for (double ip : w.inner_products()) CHECK(ip == 0.0);
        CHECK(w(1.5) > 0.0);
    }
    std::vector<double> k10;
    for (int n = 1; n <= 11; ++n) k10.push_back(n);
    CHECK(sawtooth_witness(k10).norm_sq == doctest::Approx(1.5497677311665408));

    // Uneven knots still give zeros at the knots and orthogonality.
    const std::vector<double> uneven{0.5, 0.7, 1.9, 2.0, 3.75};
    const auto u = sawtooth_witness(uneven);
    for (double k : uneven) CHECK(u(k) == 0.0);
    for (double ip : u.inner_products()) CHECK(ip == 0.0);
}

TEST_CASE("sawtooth witness, custom slopes") {
    const std::vector<double> knots{1.0, 2.0};
    const std::vector<double> slopes{3.0};
    const auto w = sawtooth_witness(knots, slopes);
    CHECK(w(1.5) == 1.5);
    CHECK(w(1.0) == 0.0);
    CHECK(w(2.0) == 0.0);
    CHECK(w(0.5) == 0.0);
    CHECK(w(7.0) == 0.0);
    CHECK(w.norm_sq == doctest::Approx(9.0));

    CHECK_THROWS(sawtooth_witness(std::vector<double>{2.0, 1.0}));
    CHECK_THROWS(sawtooth_witness(std::vector<double>{-1.0, 1.0}));
    CHECK_THROWS(sawtooth_witness(std::vector<double>{1.0, 1.0}));
    CHECK_THROWS(sawtooth_witness(knots, std::vector<double>{1.0, 2.0}));
}
