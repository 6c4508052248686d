#include "kforge/point.hpp"

#include "kforge/error.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace kforge {

std::string domain_name(Domain domain, std::size_t dimension) {
    switch (domain) {
        case Domain::real_line: return "real-line";
        case Domain::unit_interval: return "unit-interval";
        case Domain::complex_disk: return "complex-disk";
        case Domain::complex_vector: return "complex-vector(" + std::to_string(dimension) + ")";
        case Domain::interval_set: return "interval-set";
    }
    return "unknown";
}

std::pair<Domain, std::size_t> parse_domain(const std::string& tag) {
    if (tag == "real-line") return {Domain::real_line, 1};
    if (tag == "unit-interval") return {Domain::unit_interval, 1};
    if (tag == "complex-disk") return {Domain::complex_disk, 1};
    if (tag == "interval-set") return {Domain::interval_set, 0};
    const std::string prefix = "complex-vector(";
    if (tag.starts_with(prefix) && tag.ends_with(")")) {
        const auto digits = tag.substr(prefix.size(), tag.size() - prefix.size() - 1);
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && k > 0) {
            return {Domain::complex_vector, k};
        }
    }
    throw InputError("unknown domain tag '" + tag + "'");
}

Point::Point(Domain domain, std::vector<double> coords) : domain_(domain), coords_(std::move(coords)) {
    switch (domain_) {
        case Domain::real_line:
        case Domain::unit_interval:
            if (coords_.size() != 1) throw InputError("real point needs exactly one coordinate");
            break;
        case Domain::complex_disk:
            if (coords_.size() != 2) throw InputError("complex-disk point needs (re, im)");
            break;
        case Domain::complex_vector:
            if (coords_.empty() || coords_.size() % 2 != 0) {
                throw InputError("complex-vector point needs an even, nonzero number of coordinates");
            }
            break;
        case Domain::interval_set: {
            if (coords_.size() % 2 != 0) throw InputError("interval-set point needs (a, b) pairs");
            auto parts = this->parts();
            std::sort(parts.begin(), parts.end());
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (!(parts[i].first <= parts[i].second)) {
                    throw InputError("interval-set component with a > b");
                }
                if (i > 0 && parts[i].first <= parts[i - 1].second) {
                    throw InputError("interval-set components are not pairwise disjoint");
                }
            }
            break;
        }
    }
}

Point Point::real(double x, Domain domain) { return Point(domain, {x}); }

Point Point::complex(Complex z) { return Point(Domain::complex_disk, {z.real(), z.imag()}); }

Point Point::complex_vector(std::span<const Complex> z) {
    std::vector<double> c;
    c.reserve(2 * z.size());
    for (const auto& v : z) {
        c.push_back(v.real());
        c.push_back(v.imag());
    }
    return Point(Domain::complex_vector, std::move(c));
}

Point Point::intervals(std::span<const std::pair<double, double>> parts) {
    std::vector<double> c;
    c.reserve(2 * parts.size());
    for (const auto& [a, b] : parts) {
        c.push_back(a);
        c.push_back(b);
    }
    return Point(Domain::interval_set, std::move(c));
}

double Point::x() const {
    if (domain_ != Domain::real_line && domain_ != Domain::unit_interval) {
        throw DomainError("expected a real point, got " + tag());
    }
    return coords_[0];
}

Complex Point::z() const {
    if (domain_ != Domain::complex_disk) throw DomainError("expected a complex-disk point, got " + tag());
    return {coords_[0], coords_[1]};
}

std::vector<Complex> Point::zs() const {
    if (domain_ != Domain::complex_vector) throw DomainError("expected a complex-vector point, got " + tag());
    std::vector<Complex> out(coords_.size() / 2);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = {coords_[2 * j], coords_[2 * j + 1]};
    return out;
}

std::vector<std::pair<double, double>> Point::parts() const {
    if (domain_ != Domain::interval_set) throw DomainError("expected an interval-set point, got " + tag());
    std::vector<std::pair<double, double>> out(coords_.size() / 2);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = {coords_[2 * j], coords_[2 * j + 1]};
    return out;
}

std::size_t Point::dimension() const noexcept {
    switch (domain_) {
        case Domain::complex_vector:
        case Domain::interval_set: return coords_.size() / 2;
        default: return 1;
    }
}

std::string Point::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << tag() << '(';
    for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? "," : "") << coords_[i];
    os << ')';
    return os.str();
}

SampleSet::SampleSet(std::vector<Point> points) : points_(std::move(points)) {}

SampleSet::SampleSet(std::vector<Point> points, std::vector<std::size_t> chain_sizes)
    : points_(std::move(points)), chain_sizes_(std::move(chain_sizes)) {
    for (std::size_t i = 0; i < chain_sizes_.size(); ++i) {
        if (chain_sizes_[i] == 0 || (i > 0 && chain_sizes_[i] <= chain_sizes_[i - 1])) {
            throw InputError("chain levels must be nonempty and strictly nested");
        }
    }
    if (!chain_sizes_.empty() && chain_sizes_.back() != points_.size()) {
        throw InputError("final chain level must equal the whole sample set");
    }
}

SampleSet SampleSet::from_levels(const std::vector<std::vector<Point>>& levels) {
    std::vector<Point> points;
    std::vector<std::size_t> sizes;
    for (const auto& lvl : levels) {
        if (lvl.size() <= points.size()) throw InputError("chain levels must be strictly nested");
        for (const auto& p : points) {
            if (std::find(lvl.begin(), lvl.end(), p) == lvl.end()) {
                throw InputError("chain level does not contain its predecessor");
            }
        }
        for (const auto& p : lvl) {
            if (std::find(points.begin(), points.end(), p) == points.end()) points.push_back(p);
        }
        if (points.size() != lvl.size()) throw InputError("chain level contains repeated points");
        sizes.push_back(points.size());
    }
    return SampleSet(std::move(points), std::move(sizes));
}

SampleSet SampleSet::level(std::size_t i) const {
    if (i >= chain_sizes_.size()) throw InputError("chain level out of range");
    return SampleSet(std::vector<Point>(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(chain_sizes_[i])));
}

std::size_t SampleSet::index_of(const Point& p) const {
    const auto it = std::find(points_.begin(), points_.end(), p);
    return static_cast<std::size_t>(it - points_.begin());
}

void SampleSet::require_distinct() const {
    std::set<std::pair<int, std::vector<double>>> seen;
    for (const auto& p : points_) {
        if (!seen.emplace(static_cast<int>(p.domain()), p.coords()).second) {
            throw InputError("duplicate point " + p.to_string());
        }
    }
}

SampleSet real_points(std::span<const double> xs, Domain domain) {
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back(Point::real(x, domain));
    return SampleSet(std::move(pts));
}

}  // namespace kforge
