#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kforge {

using Complex = std::complex<double>;

enum class Domain {
    real_line,
    unit_interval,
    complex_disk,
    complex_vector,
    interval_set,
};

/// Canonical textual tag, e.g. "real-line" or "complex-vector(3)".
std::string domain_name(Domain domain, std::size_t dimension = 0);

/// Inverse of domain_name. Throws InputError on an unknown tag.
std::pair<Domain, std::size_t> parse_domain(const std::string& tag);

/// A point of one of the kernel domains.
///
/// Coordinates are stored flat: a complex number is (re, im), a vector in C^k is
/// (re_1, im_1, ..., re_k, im_k), and an interval set is (a_1, b_1, ..., a_m, b_m).
class Point {
public:
    Point() = default;
    Point(Domain domain, std::vector<double> coords);

    static Point real(double x, Domain domain = Domain::real_line);
    static Point complex(Complex z);
    static Point complex_vector(std::span<const Complex> z);
    static Point intervals(std::span<const std::pair<double, double>> parts);

    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] const std::vector<double>& coords() const noexcept { return coords_; }

    /// Real coordinate of a real-line or unit-interval point.
    [[nodiscard]] double x() const;
    /// Complex coordinate of a complex-disk point.
    [[nodiscard]] Complex z() const;
    /// Components of a complex-vector point.
    [[nodiscard]] std::vector<Complex> zs() const;
    /// Disjoint closed intervals of an interval-set point.
    [[nodiscard]] std::vector<std::pair<double, double>> parts() const;

    /// Number of complex components (complex-vector), intervals (interval-set), or 1.
    [[nodiscard]] std::size_t dimension() const noexcept;

    [[nodiscard]] std::string tag() const { return domain_name(domain_, dimension()); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Point&, const Point&) = default;

private:
    Domain domain_ = Domain::real_line;
    std::vector<double> coords_;
};

/// Ordered set of distinct points with an optional nesting chain.
///
/// The chain is stored as increasing prefix lengths: level i consists of the first
/// chain_sizes()[i] points, so strict nesting and "union equals the final level"
/// hold by construction once the sizes are strictly increasing and end at size().
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(std::vector<Point> points);
    SampleSet(std::vector<Point> points, std::vector<std::size_t> chain_sizes);

    /// Builds a chain from explicit nested levels; each level must contain the previous.
    static SampleSet from_levels(const std::vector<std::vector<Point>>& levels);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] const Point& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }
    [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
    [[nodiscard]] auto end() const noexcept { return points_.end(); }

    [[nodiscard]] bool has_chain() const noexcept { return !chain_sizes_.empty(); }
    [[nodiscard]] std::size_t levels() const noexcept { return chain_sizes_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& chain_sizes() const noexcept { return chain_sizes_; }
    /// Points of chain level i (no chain of its own).
    [[nodiscard]] SampleSet level(std::size_t i) const;

    /// Index of p, or size() when absent.
    [[nodiscard]] std::size_t index_of(const Point& p) const;

    /// Throws InputError on a repeated point.
    void require_distinct() const;

private:
    std::vector<Point> points_;
    std::vector<std::size_t> chain_sizes_;
};

/// Real points on one domain.
SampleSet real_points(std::span<const double> xs, Domain domain = Domain::real_line);

}  // namespace kforge
