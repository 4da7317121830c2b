#pragma once

#include "carnot/curves.hpp"
#include "carnot/metric.hpp"
#include "carnot/subgroups.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

constexpr int kSchemaVersion = 1;

// Syntax and schema errors. line/column are 1-based; 0 when the error is
// about a field rather than a text position.
class ParseError : public std::runtime_error
{
public:
	ParseError(const std::string& msg, int line = 0, int column = 0);
	int line, column;
};

struct MetricSpec
{
	MetricKind kind = MetricKind::koranyi;
	std::vector<double> weights;
};

struct GroupFile
{
	AlgebraPtr algebra;
	std::optional<MetricSpec> metric;
};

// Group-definition JSON. Brackets are 1-based with i < j; each term is
// {"k", "num", "den"}. num/den may also be decimal strings for values beyond
// 64 bits.
GroupFile parse_group(const std::string& text);
GroupFile load_group(const std::string& path);
// Canonical emission: sorted i < j entries, zero terms dropped, reduced fractions.
std::string emit_group(const GradedAlgebra& g, const std::optional<MetricSpec>& metric = std::nullopt);

// A catalog name, or a path to a group file.
GroupFile resolve_group(const std::string& name_or_path);
HomogeneousMetric make_metric(const GroupFile& f);

// "p/q,r,..." vectors.
QVec parse_rational_vector(const std::string& text);
std::string format_rational_vector(const QVec& v);

// Round-trip decimal: 17 significant digits.
std::string format_double(double x);

void write_curve_csv(const SampledCurve& c, const std::string& path);
// Sampled control: column t, then one column per basis coordinate; linear
// interpolation between rows.
HorizontalControl read_control_csv(AlgebraPtr g, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// FNV-1a 64-bit digest, hex.
std::string fnv1a_hex(const std::string& bytes);

} // namespace carnot
