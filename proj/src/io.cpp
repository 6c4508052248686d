#include "kforge/io.hpp"

#include "kforge/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace kforge::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

// Non-empty, non-comment lines.
std::vector<std::string> lines_of(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back(t);
    }
    return out;
}

// Splits a CSV field list whose header may itself contain a parenthesised tag with commas.
std::vector<std::string> split_header(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : line) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

Point make_point(Domain d, std::size_t dim, std::vector<double> coords) {
    if (d == Domain::complex_vector && coords.size() != 2 * dim) {
        throw InputError("complex-vector(" + std::to_string(dim) + ") rows need " + std::to_string(2 * dim) +
                         " coordinates");
    }
    return Point(d, std::move(coords));
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& text) {
    const auto t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw InputError("not a number: '" + text + "'");
    }
    return v;
}

SampleSet read_points(std::istream& in) {
    const auto lines = lines_of(in);
    if (lines.empty()) throw InputError("points file is empty");
    const auto header = split_header(lines.front());
    const auto [domain, dim] = parse_domain(header.front());
    const bool leveled = header.size() > 1 && header.back() == "level";

    std::map<long, std::vector<Point>> by_level;
    std::vector<Point> points;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_csv_line(lines[r]);
        std::vector<double> coords;
        for (const auto& f : fields) coords.push_back(parse_double(f));
        long level = 0;
        if (leveled) {
            if (coords.empty()) throw InputError("row " + std::to_string(r) + " lacks a level");
            level = std::lround(coords.back());
            coords.pop_back();
        }
        auto p = make_point(domain, dim, std::move(coords));
        if (leveled) {
            by_level[level].push_back(std::move(p));
        } else {
            points.push_back(std::move(p));
        }
    }
    if (!leveled) {
        SampleSet s(std::move(points));
        s.require_distinct();
        return s;
    }
    std::vector<std::size_t> sizes;
    for (auto& [lvl, pts] : by_level) {
        for (auto& p : pts) points.push_back(std::move(p));
        sizes.push_back(points.size());
    }
    SampleSet s(std::move(points), std::move(sizes));
    s.require_distinct();
    return s;
}

SampleSet read_points_file(const std::string& path) {
    auto in = open(path);
    return read_points(in);
}

void write_points(std::ostream& out, const SampleSet& points) {
    const std::string tag = points.empty() ? "real-line" : points[0].tag();
    out << tag << '\n';
    for (const auto& p : points) {
        for (std::size_t i = 0; i < p.coords().size(); ++i) out << (i ? "," : "") << format_double(p.coords()[i]);
        out << '\n';
    }
}

std::vector<Complex> read_values(std::istream& in) {
    const auto lines = lines_of(in);
    if (lines.empty()) throw InputError("values file is empty");
    std::vector<Complex> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split_csv_line(lines[r]);
        if (f.size() == 1) {
            out.emplace_back(parse_double(f[0]), 0.0);
        } else if (f.size() == 2) {
            out.emplace_back(parse_double(f[0]), parse_double(f[1]));
        } else {
            throw InputError("values rows need one or two columns");
        }
    }
    return out;
}

std::vector<Complex> read_values_file(const std::string& path) {
    auto in = open(path);
    return read_values(in);
}

std::vector<std::vector<double>> read_table_file(const std::string& path) {
    auto in = open(path);
    const auto lines = lines_of(in);
    if (lines.empty()) throw InputError("'" + path + "' is empty");
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::vector<double> row;
        for (const auto& f : split_csv_line(lines[r])) row.push_back(parse_double(f));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_matrix(std::ostream& out, const ComplexMatrix& m, bool force_complex) {
    const bool complex = force_complex || !(m.imag().array() == 0.0).all();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j).real());
            if (complex) out << ',' << format_double(m(i, j).imag());
        }
        out << '\n';
    }
}

void write_matrix(std::ostream& out, const RealMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
        out << '\n';
    }
}

void write_paths(std::ostream& out, const std::vector<Point>& grid, const ComplexMatrix& paths, bool complex) {
    out << "path";
    for (const auto& g : grid) {
        if (complex) {
            out << ",re " << g.to_string() << ",im " << g.to_string();
        } else {
            out << ',' << g.to_string();
        }
    }
    out << '\n';
    for (Eigen::Index p = 0; p < paths.rows(); ++p) {
        out << p;
        for (Eigen::Index g = 0; g < paths.cols(); ++g) {
            out << ',' << format_double(paths(p, g).real());
            if (complex) out << ',' << format_double(paths(p, g).imag());
        }
        out << '\n';
    }
}

Json to_json(Complex z, bool force_complex) {
    if (!force_complex && z.imag() == 0.0) return z.real();
    return Json::array({z.real(), z.imag()});
}

Json to_json(const ComplexMatrix& m) {
    const bool complex = !(m.imag().array() == 0.0).all();
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j), complex));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const RealMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const std::vector<Complex>& v) {
    const bool complex = std::any_of(v.begin(), v.end(), [](Complex z) { return z.imag() != 0.0; });
    Json out = Json::array();
    for (auto z : v) out.push_back(to_json(z, complex));
    return out;
}

Json gram_to_json(const GramMatrix& g) {
    Json pts = Json::array();
    for (const auto& p : g.points) pts.push_back(p.to_string());
    Json entries = Json::array();
    const bool complex = !g.is_real();
    for (Eigen::Index i = 0; i < g.n(); ++i) {
        for (Eigen::Index j = 0; j < g.n(); ++j) entries.push_back(to_json(g.entries(i, j), complex));
    }
    return Json{{"n", g.n()}, {"entries", std::move(entries)}, {"points", std::move(pts)}};
}

Json make_report(const std::string& command, Json config, std::uint64_t seed, Json metrics) {
    return Json{{"schema", schema},
                {"command", command},
                {"config", std::move(config)},
                {"seed", seed},
                {"metrics", std::move(metrics)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace kforge::io
