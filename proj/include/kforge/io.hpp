#pragma once

#include "kforge/gram.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace kforge::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema = "kernel-forge/1";

/// Shortest round-trip decimal form of x ("nan", "inf", "-inf" for non-finite values).
std::string format_double(double x);

/// Splits one CSV line on ',' and trims surrounding blanks.
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a number, throwing InputError that names the offending text.
double parse_double(const std::string& text);

/// Points CSV: the first header field is the domain tag; each later row holds the flat
/// coordinates of one point. A final header column named "level" assigns each point to
/// a chain level; levels are nested cumulatively in increasing order.
SampleSet read_points(std::istream& in);
SampleSet read_points_file(const std::string& path);
void write_points(std::ostream& out, const SampleSet& points);

/// Values CSV with a header and one or two columns (re[, im]).
std::vector<Complex> read_values(std::istream& in);
std::vector<Complex> read_values_file(const std::string& path);

/// Numeric CSV with a header and any number of columns.
std::vector<std::vector<double>> read_table_file(const std::string& path);

/// Raw matrix, no header. Complex matrices use interleaved re,im columns.
void write_matrix(std::ostream& out, const ComplexMatrix& m, bool force_complex = false);
void write_matrix(std::ostream& out, const RealMatrix& m);

/// Path ensemble CSV: header "path,<grid point>..." (re/im pairs for complex data).
void write_paths(std::ostream& out, const std::vector<Point>& grid, const ComplexMatrix& paths, bool complex);

Json to_json(Complex z, bool force_complex = false);
Json to_json(const ComplexMatrix& m);
Json to_json(const RealMatrix& m);
Json to_json(const std::vector<Complex>& v);
/// {n, entries (row-major), points}.
Json gram_to_json(const GramMatrix& g);

/// {"schema", "command", "config", "seed", "metrics"}.
Json make_report(const std::string& command, Json config, std::uint64_t seed, Json metrics);

/// Deterministic text form of a report: two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace kforge::io
