#include "kforge/sampling.hpp"

#include "kforge/error.hpp"
#include "kforge/factorize.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>

namespace kforge {

namespace {

constexpr std::size_t max_dense_bounds = 400;

// True when S is exactly the integers -N..N in order.
bool is_symmetric_integer_window(const SampleSet& S, std::size_t n) {
    if (S.size() != 2 * n + 1) return false;
    for (std::size_t i = 0; i < S.size(); ++i) {
        const auto& p = S[i];
        if (p.domain() != Domain::real_line) return false;
        if (p.x() != static_cast<double>(i) - static_cast<double>(n)) return false;
    }
    return true;
}

}  // namespace

std::string verdict_name(ParsevalVerdict v) {
    switch (v) {
        case ParsevalVerdict::parseval: return "parseval";
        case ParsevalVerdict::not_parseval: return "not-parseval";
        case ParsevalVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SampleSet integer_samples(std::size_t n, bool positive_only) {
    std::vector<double> xs;
    if (positive_only) {
        for (std::size_t k = 1; k <= n; ++k) xs.push_back(static_cast<double>(k));
    } else {
        for (std::size_t k = 0; k <= 2 * n; ++k) xs.push_back(static_cast<double>(k) - static_cast<double>(n));
    }
    return real_points(xs);
}

FrameReport parseval_check(const KernelSpec& spec, const SampleSet& S, const std::vector<Point>& test_points,
                           std::size_t truncation, double tol) {
    FrameReport r;
    r.truncation = truncation;
    r.tolerance = tol;
    const bool shannon_window = spec.family == KernelFamily::shannon && is_symmetric_integer_window(S, truncation);
    constexpr double pi2 = boost::math::constants::pi_sqr<double>();

    bool all_parseval = true;
    bool any_violation = false;
    std::vector<double> terms(S.size());
    for (const auto& x : test_points) {
        ParsevalPoint pp;
        pp.x = x;
        pp.diagonal = eval_kernel(spec, x, x).real();
        for (std::size_t i = 0; i < S.size(); ++i) terms[i] = std::norm(eval_kernel(spec, x, S[i]));
        pp.partial_sum = pairwise_sum(terms);
        pp.deficit = std::abs(pp.diagonal - pp.partial_sum);
        if (shannon_window) {
            const double gap = static_cast<double>(truncation) - std::abs(x.x());
            if (gap > 0.0) pp.tail_bound = 2.0 * spec.scale * spec.scale / (pi2 * gap);
        }
        const double slack = tol * std::max(1.0, pp.diagonal);
        if (pp.partial_sum > pp.diagonal + slack) {
            any_violation = true;
        } else if (pp.tail_bound && pp.deficit > *pp.tail_bound + slack) {
            any_violation = true;
        }
        if (!(pp.deficit <= slack + pp.tail_bound.value_or(0.0))) all_parseval = false;
        r.parseval_deficit = std::max(r.parseval_deficit, pp.deficit);
        r.points.push_back(std::move(pp));
    }

    if (S.size() > 0 && S.size() <= max_dense_bounds) {
        const auto eig = jacobi_eigs(gram(spec, S));
        r.lower_bound = eig.eigenvalues.back();
        r.upper_bound = eig.eigenvalues.front();
        if (std::abs(*r.lower_bound - 1.0) > 1e-8 || std::abs(*r.upper_bound - 1.0) > 1e-8) all_parseval = false;
    }

    if (any_violation) {
        r.verdict = ParsevalVerdict::not_parseval;
    } else if (all_parseval && !test_points.empty()) {
        r.verdict = ParsevalVerdict::parseval;
    }
    return r;
}

FrameBounds frame_bounds(const KernelSpec& spec, const SampleSet& S) {
    if (S.empty()) throw InputError("frame bounds need a nonempty sample set");
    const auto eig = jacobi_eigs(gram(spec, S));
    FrameBounds b{eig.eigenvalues.back(), eig.eigenvalues.front()};
    if (!(b.lower > 1e-12 * std::max(b.upper, 0.0))) {
        throw NumericalError("singular Gram matrix: smallest eigenvalue " + std::to_string(b.lower));
    }
    return b;
}

std::vector<Complex> frame_reconstruct(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> f_samples,
                                       const std::vector<Point>& eval_points) {
    if (f_samples.size() != S.size()) throw InputError("need one sample per point of S");
    const auto inv = inverse_gram(gram(spec, S));
    ComplexVector f(static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i) f(static_cast<Eigen::Index>(i)) = f_samples[i];
    const ComplexVector c = inv * f;
    const ComplexMatrix K = cross_gram(spec, eval_points, S);
    const ComplexVector out = K * c;
    return {out.data(), out.data() + out.size()};
}

double SawtoothWitness::operator()(double x) const {
    if (knots.size() < 2 || x <= knots.front() || x >= knots.back()) return 0.0;
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t n = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double left = x - knots[n];
    const double right = knots[n + 1] - x;
    return slopes[n] * std::min(left, right);
}

std::vector<double> SawtoothWitness::inner_products() const {
    std::vector<double> out;
    out.reserve(knots.size());
    for (std::size_t n = 0; n < knots.size(); ++n) {
        double s = 0.0;
        for (std::size_t m = 0; m + 1 <= n; ++m) {
            const double half = slopes[m] * (knots[m + 1] - knots[m]) / 2.0;
            s += half - half;
        }
        out.push_back(s);
    }
    return out;
}

SawtoothWitness sawtooth_witness(std::span<const double> knots, std::span<const double> slopes) {
    if (knots.size() < 2) throw InputError("sawtooth witness needs at least two knots");
    if (slopes.size() != knots.size() - 1) throw InputError("need one slope per gap between knots");
    if (knots.front() < 0.0) throw DomainError("knots must be nonnegative");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1])) throw InputError("knots must be strictly increasing");
    }
    SawtoothWitness w;
    w.knots.assign(knots.begin(), knots.end());
    w.slopes.assign(slopes.begin(), slopes.end());
    double acc = 0.0;
    for (std::size_t n = 0; n < slopes.size(); ++n) {
        acc += slopes[n] * slopes[n] * (knots[n + 1] - knots[n]);
        w.norm_sq_partial.push_back(acc);
    }
    w.norm_sq = acc;
    return w;
}

SawtoothWitness sawtooth_witness(std::span<const double> knots) {
    if (knots.size() < 2) throw InputError("sawtooth witness needs at least two knots");
    std::vector<double> slopes;
    for (std::size_t n = 0; n + 1 < knots.size(); ++n) {
        const double gap = knots[n + 1] - knots[n];
        if (!(gap > 0.0)) throw InputError("knots must be strictly increasing");
        slopes.push_back(1.0 / (static_cast<double>(n + 1) * std::sqrt(gap)));
    }
    return sawtooth_witness(knots, slopes);
}

}  // namespace kforge
