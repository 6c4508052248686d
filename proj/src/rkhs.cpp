#include "kforge/rkhs.hpp"

#include "kforge/error.hpp"

#include <algorithm>
#include <cmath>

namespace kforge {

namespace {

ComplexVector to_vector(std::span<const Complex> v) {
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

CholeskyFactor factor_gram(const GramMatrix& g) {
    const double scale = std::max(g.max_diagonal(), 0.0);
    try {
        return cholesky(g, 0.0, 1e-14 * scale);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("singular Gram matrix: ") + e.what());
    }
}

}  // namespace

RkhsFunction::RkhsFunction(KernelSpec spec, SampleSet centers, ComplexVector coeffs)
    : spec_(std::move(spec)), centers_(std::move(centers)), coeffs_(std::move(coeffs)) {
    if (static_cast<std::size_t>(coeffs_.size()) != centers_.size()) {
        throw InputError("coefficient count does not match the centers");
    }
}

Complex RkhsFunction::operator()(const Point& t) const {
    Complex s{0.0, 0.0};
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        s += coeffs_(static_cast<Eigen::Index>(j)) * eval_kernel(spec_, t, centers_[j]);
    }
    return s;
}

std::vector<Complex> RkhsFunction::evaluate(const std::vector<Point>& ts) const {
    std::vector<Complex> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back((*this)(t));
    return out;
}

double RkhsFunction::norm_sq() const {
    const auto g = gram(spec_, centers_);
    return coeffs_.dot(g.entries * coeffs_).real();
}

RkhsFunction project(const KernelSpec& spec, const SampleSet& F, std::span<const Complex> h_values) {
    if (h_values.size() != F.size()) throw InputError("h_values must have one entry per point of F");
    const auto g = gram(spec, F);
    const auto coeffs = cholesky_solve(factor_gram(g), to_vector(h_values));
    return RkhsFunction(spec, F, coeffs);
}

std::vector<Complex> project(const KernelSpec& spec, const SampleSet& F, std::span<const Complex> h_values,
                             const std::vector<Point>& eval_points) {
    return project(spec, F, h_values).evaluate(eval_points);
}

NormSequence rkhs_norm_sq(const KernelSpec& spec, const SampleSet& chain, std::span<const Complex> h_values) {
    if (!chain.has_chain()) throw InputError("rkhs_norm_sq needs a chain of nested sets");
    if (h_values.size() != chain.size()) throw InputError("h_values must cover every chain point");
    NormSequence out;
    for (std::size_t lvl = 0; lvl < chain.levels(); ++lvl) {
        const auto F = chain.level(lvl);
        const auto h = to_vector(h_values.first(F.size()));
        const auto coeffs = cholesky_solve(factor_gram(gram(spec, F)), h);
        const double v = h.dot(coeffs).real();
        if (!out.sequence.empty() && v < out.sequence.back() - 1e-10 * std::max(1.0, std::abs(v))) {
            out.monotone = false;
        }
        out.sequence.push_back(v);
        out.sup = std::max(out.sup, v);
    }
    return out;
}

std::string membership_name(Membership m) {
    switch (m) {
        case Membership::member: return "member";
        case Membership::diverging: return "diverging";
        case Membership::undetermined: return "undetermined";
    }
    return "undetermined";
}

DeltaReport delta_membership(const KernelSpec& spec, const Point& x, const SampleSet& chain,
                             const DeltaOptions& options) {
    if (!chain.has_chain()) throw InputError("delta_membership needs a chain of nested sets");
    const std::size_t ix = chain.index_of(x);
    if (ix >= chain.size() || ix >= chain.chain_sizes().front()) {
        throw InputError("point " + x.to_string() + " must belong to every chain level");
    }
    DeltaReport out;
    for (std::size_t lvl = 0; lvl < chain.levels(); ++lvl) {
        const auto F = chain.level(lvl);
        ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(F.size()));
        e(static_cast<Eigen::Index>(ix)) = 1.0;
        const auto u = cholesky_solve(factor_gram(gram(spec, F)), e);
        const double v = u(static_cast<Eigen::Index>(ix)).real();
        out.sequence.push_back(v);
        out.level_sizes.push_back(F.size());
        out.sup = std::max(out.sup, v);
    }
    const double last = out.sequence.back();
    if (last > options.cap) {
        out.verdict = Membership::diverging;
    } else if (out.sequence.size() >= 2) {
        const double prev = out.sequence[out.sequence.size() - 2];
        if (prev > 0.0 && last / prev > options.growth) {
            out.verdict = Membership::diverging;
        } else if (std::abs(last - prev) <= options.rtol * std::abs(last)) {
            out.verdict = Membership::member;
        }
    }
    return out;
}

std::vector<Complex> laplacian_apply(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> h_values) {
    if (h_values.size() != S.size()) throw InputError("h_values must have one entry per point of S");
    const auto u = cholesky_solve(factor_gram(gram(spec, S)), to_vector(h_values));
    return {u.data(), u.data() + u.size()};
}

InducedGraph induced_graph(const KernelSpec& spec, const SampleSet& S, std::optional<double> threshold) {
    InducedGraph out;
    out.vertices = S;
    out.weights = inverse_gram(gram(spec, S));
    const double max_abs = out.weights.size() == 0 ? 0.0 : out.weights.cwiseAbs().maxCoeff();
    out.threshold = threshold.value_or(1e-8 * max_abs);
    const auto n = out.weights.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(out.weights(i, j)) > out.threshold) {
                out.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), out.weights(i, j)});
            }
        }
    }
    return out;
}

std::vector<Complex> extend_spline(const KernelSpec& spec, const SampleSet& S, std::span<const Complex> h_values,
                                   const std::vector<Point>& eval_points) {
    return project(spec, S, h_values, eval_points);
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.empty()) throw InputError("piecewise-linear needs matching knots and values");
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw InputError("knots must be strictly increasing");
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
    if (xs_[j - 1] == x) return ys_[j - 1];
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
}

double PiecewiseLinear::energy() const {
    double e = 0.0;
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        const double dy = ys_[i] - ys_[i - 1];
        e += dy * dy / (xs_[i] - xs_[i - 1]);
    }
    return e;
}

Interpolant min_norm_interpolant(std::span<const std::pair<double, double>> data) {
    std::vector<double> xs{0.0};
    std::vector<double> ys{0.0};
    for (const auto& [x, y] : data) {
        if (!(x > xs.back())) throw InputError("interpolation nodes must satisfy 0 < x_1 < x_2 < ...");
        xs.push_back(x);
        ys.push_back(y);
    }
    PiecewiseLinear f(std::move(xs), std::move(ys));
    const double e = f.energy();
    return {std::move(f), e};
}

}  // namespace kforge
