#include "carnot/io.hpp"

#include "carnot/catalog.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace carnot {

using nlohmann::json;

namespace {

std::pair<int, int> line_column(const std::string& text, std::size_t byte)
{
	int line = 1, col = 1;
	for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
	{
		if (text[i] == '\n')
		{
			++line;
			col = 1;
		}
		else
			++col;
	}
	return {line, col};
}

const json& field(const json& j, const std::string& key, const std::string& where)
{
	if (!j.is_object()) throw ParseError(where + ": expected an object");
	auto it = j.find(key);
	if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
	return *it;
}

long long as_int(const json& j, const std::string& where)
{
	if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
	return j.get<long long>();
}

mpz_class as_bigint(const json& j, const std::string& where)
{
	if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
	if (j.is_string())
	{
		mpz_class z;
		if (z.set_str(j.get<std::string>(), 10) != 0) throw ParseError(where + ": malformed integer string");
		return z;
	}
	throw ParseError(where + ": expected an integer");
}

json int_json(const mpz_class& z)
{
	if (z.fits_slong_p()) return static_cast<long long>(z.get_si());
	return z.get_str();
}

} // namespace

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg : msg),
      line(l), column(c)
{
}

GroupFile parse_group(const std::string& text)
{
	json j;
	try
	{
		j = json::parse(text);
	}
	catch (const json::parse_error& e)
	{
		auto [l, c] = line_column(text, e.byte);
		std::string what = e.what();
		auto pos = what.find("parse error");
		throw ParseError(pos == std::string::npos ? what : what.substr(pos), l, c);
	}
	if (j.contains("version") && as_int(j["version"], "version") > kSchemaVersion)
		throw ParseError("unsupported schema version " + j["version"].dump());
	std::string name = field(j, "name", "group").is_string() ? j["name"].get<std::string>() : throw ParseError("name: expected a string");
	long long dim = as_int(field(j, "dim", "group"), "dim");
	long long step = as_int(field(j, "step", "group"), "step");
	if (dim <= 0) throw ParseError("dim must be positive");
	const json& lj = field(j, "layers", "group");
	if (!lj.is_array() || static_cast<long long>(lj.size()) != dim)
		throw ParseError("layers: expected an array of length dim = " + std::to_string(dim));
	std::vector<int> layers;
	for (std::size_t i = 0; i < lj.size(); ++i)
	{
		long long l = as_int(lj[i], "layers[" + std::to_string(i) + "]");
		if (l < 1 || l > step)
			throw ParseError("layers[" + std::to_string(i) + "]: layer " + std::to_string(l) + " outside 1.." + std::to_string(step));
		layers.push_back(static_cast<int>(l));
	}
	if (*std::max_element(layers.begin(), layers.end()) != step)
		throw ParseError("step " + std::to_string(step) + " does not match the largest layer index");
	std::vector<std::string> names;
	if (j.contains("basis_names"))
	{
		const json& nj = j["basis_names"];
		if (!nj.is_array() || static_cast<long long>(nj.size()) != dim)
			throw ParseError("basis_names: expected an array of length dim");
		for (const auto& n : nj)
		{
			if (!n.is_string()) throw ParseError("basis_names: expected strings");
			names.push_back(n.get<std::string>());
		}
	}
	else
		for (long long i = 0; i < dim; ++i) names.push_back("b" + std::to_string(i + 1));

	std::vector<BracketEntry> brackets;
	const json& bj = field(j, "brackets", "group");
	if (!bj.is_array()) throw ParseError("brackets: expected an array");
	for (std::size_t e = 0; e < bj.size(); ++e)
	{
		std::string where = "brackets[" + std::to_string(e) + "]";
		long long i = as_int(field(bj[e], "i", where), where + ".i"), jj = as_int(field(bj[e], "j", where), where + ".j");
		if (i < 1 || i > dim || jj < 1 || jj > dim) throw ParseError(where + ": index out of range 1.." + std::to_string(dim));
		if (i >= jj) throw ParseError(where + ": entries must have i < j");
		BracketEntry be{static_cast<int>(i - 1), static_cast<int>(jj - 1), {}};
		const json& tj = field(bj[e], "terms", where);
		if (!tj.is_array()) throw ParseError(where + ".terms: expected an array");
		for (std::size_t t = 0; t < tj.size(); ++t)
		{
			std::string tw = where + ".terms[" + std::to_string(t) + "]";
			long long k = as_int(field(tj[t], "k", tw), tw + ".k");
			if (k < 1 || k > dim) throw ParseError(tw + ": k out of range");
			mpz_class num = as_bigint(field(tj[t], "num", tw), tw + ".num");
			mpz_class den = tj[t].contains("den") ? as_bigint(tj[t]["den"], tw + ".den") : mpz_class(1);
			if (den == 0) throw ParseError(tw + ": zero denominator");
			Rational c(num, den);
			c.canonicalize();
			be.terms.push_back({static_cast<int>(k - 1), c});
		}
		brackets.push_back(std::move(be));
	}
	GroupFile out;
	out.algebra = std::make_shared<GradedAlgebra>(name, layers, names, brackets);
	if (j.contains("metric"))
	{
		const json& mj = j["metric"];
		MetricSpec ms;
		try
		{
			ms.kind = parse_metric_kind(field(mj, "kind", "metric").get<std::string>());
		}
		catch (const std::exception& ex)
		{
			throw ParseError(std::string("metric.kind: ") + ex.what());
		}
		if (mj.contains("weights"))
		{
			if (!mj["weights"].is_array()) throw ParseError("metric.weights: expected an array");
			for (const auto& w : mj["weights"])
			{
				if (!w.is_number()) throw ParseError("metric.weights: expected numbers");
				ms.weights.push_back(w.get<double>());
			}
		}
		out.metric = ms;
	}
	return out;
}

std::string read_file(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot open '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out) throw std::runtime_error("cannot write '" + path + "'");
	out << text;
}

GroupFile load_group(const std::string& path)
{
	std::string text = read_file(path);
	try
	{
		return parse_group(text);
	}
	catch (const ParseError& e)
	{
		throw ParseError(path + ": " + e.what(), e.line, e.column);
	}
}

std::string emit_group(const GradedAlgebra& g, const std::optional<MetricSpec>& metric)
{
	json j;
	j["version"] = kSchemaVersion;
	j["name"] = g.name();
	j["dim"] = g.dim();
	j["step"] = g.step();
	j["layers"] = g.layers();
	j["basis_names"] = g.basis_names();
	json br = json::array();
	auto entries = g.canonical_brackets();
	std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
		return std::tie(a.i, a.j) < std::tie(b.i, b.j);
	});
	for (const auto& e : entries)
	{
		json terms = json::array();
		auto ts = e.terms;
		std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
		for (const auto& t : ts)
			terms.push_back({{"k", t.k + 1}, {"num", int_json(t.c.get_num())}, {"den", int_json(t.c.get_den())}});
		br.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"terms", terms}});
	}
	j["brackets"] = br;
	if (metric)
	{
		json m{{"kind", to_string(metric->kind)}};
		if (!metric->weights.empty()) m["weights"] = metric->weights;
		j["metric"] = m;
	}
	return j.dump(2) + "\n";
}

GroupFile resolve_group(const std::string& name_or_path)
{
	namespace fs = std::filesystem;
	if (fs::exists(name_or_path) && fs::is_regular_file(name_or_path)) return load_group(name_or_path);
	if (const char* dir = std::getenv("CARNOT_CATALOG_PATH"))
	{
		fs::path p = fs::path(dir) / (name_or_path + ".json");
		if (fs::exists(p)) return load_group(p.string());
	}
	return {catalog_by_name(name_or_path), std::nullopt};
}

HomogeneousMetric make_metric(const GroupFile& f)
{
	if (!f.metric) return default_metric(f.algebra);
	return HomogeneousMetric(f.algebra, f.metric->kind, f.metric->weights);
}

QVec parse_rational_vector(const std::string& text)
{
	QVec v;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ','))
	{
		try
		{
			v.push_back(parse_rational(item));
		}
		catch (const std::exception&)
		{
			throw std::invalid_argument("malformed rational '" + item + "' in '" + text + "'");
		}
	}
	if (v.empty()) throw std::invalid_argument("empty vector");
	return v;
}

std::string format_rational_vector(const QVec& v)
{
	std::string s;
	for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
	return s;
}

std::string format_double(double x)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", x);
	return buf;
}

void write_curve_csv(const SampledCurve& c, const std::string& path)
{
	std::string out = "t";
	for (const auto& n : c.g->basis_names()) out += "," + n;
	out += "\n";
	for (std::size_t k = 0; k < c.t.size(); ++k)
	{
		out += format_double(c.t[k]);
		for (double x : c.x[k]) out += "," + format_double(x);
		out += "\n";
	}
	write_file(path, out);
}

HorizontalControl read_control_csv(AlgebraPtr g, const std::string& path)
{
	std::stringstream in(read_file(path));
	std::string line;
	std::vector<double> ts;
	std::vector<RVec> us;
	int row = 0;
	while (std::getline(in, line))
	{
		++row;
		if (line.empty() || row == 1) continue; // header
		std::stringstream ls(line);
		std::string cell;
		RVec vals;
		while (std::getline(ls, cell, ','))
		{
			char* end = nullptr;
			double v = std::strtod(cell.c_str(), &end);
			if (end == cell.c_str()) throw ParseError("malformed number '" + cell + "'", row, static_cast<int>(vals.size()) + 1);
			vals.push_back(v);
		}
		if (static_cast<int>(vals.size()) != g->dim() + 1)
			throw ParseError("expected " + std::to_string(g->dim() + 1) + " columns", row, 1);
		if (!ts.empty() && vals[0] <= ts.back()) throw ParseError("times must increase", row, 1);
		ts.push_back(vals[0]);
		us.emplace_back(vals.begin() + 1, vals.end());
	}
	if (ts.size() < 2) throw ParseError(path + ": need at least two samples");
	CurveFn f = [ts, us](double t) {
		auto it = std::upper_bound(ts.begin(), ts.end(), t);
		std::size_t k = it == ts.begin() ? 0 : std::min<std::size_t>(static_cast<std::size_t>(it - ts.begin()) - 1, ts.size() - 2);
		double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
		RVec r = scale(1 - w, us[k]);
		axpy(w, us[k + 1], r);
		return r;
	};
	return HorizontalControl(g, ts.front(), ts.back(), f, 0, path);
}

std::string fnv1a_hex(const std::string& bytes)
{
	std::uint64_t h = 14695981039346656037ULL;
	for (unsigned char c : bytes)
	{
		h ^= c;
		h *= 1099511628211ULL;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

} // namespace carnot
