#include "commands.hpp"

#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"

#include <filesystem>
#include <random>

namespace carnot::cmd {

namespace {

json qvec_json(const QVec& v)
{
	json a = json::array();
	for (const auto& q : v) a.push_back(to_string(q));
	return a;
}

json basis_json(const std::vector<QVec>& b)
{
	json a = json::array();
	for (const auto& v : b) a.push_back(qvec_json(v));
	return a;
}

json rvec_json(const RVec& v) { return v; }

json matrix_json(const QMatrix& m)
{
	json rows = json::array();
	for (std::size_t i = 0; i < m.rows(); ++i)
	{
		json r = json::array();
		for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_string(m(i, j)));
		rows.push_back(r);
	}
	return rows;
}

json matrix_json(const Eigen::MatrixXd& m)
{
	json rows = json::array();
	for (long i = 0; i < m.rows(); ++i)
	{
		json r = json::array();
		for (long j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
		rows.push_back(r);
	}
	return rows;
}

Rational rational_json(const json& j, const std::string& where)
{
	try
	{
		if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
		if (j.is_string()) return parse_rational(j.get<std::string>());
	}
	catch (const std::exception&)
	{
	}
	throw ParseError(where + ": expected an integer or a \"p/q\" string");
}

QVec qvec_from(const json& j, std::size_t dim, const std::string& where)
{
	if (!j.is_array() || j.size() != dim)
		throw ParseError(where + ": expected " + std::to_string(dim) + " coordinates");
	QVec v;
	for (std::size_t i = 0; i < j.size(); ++i) v.push_back(rational_json(j[i], where));
	return v;
}

RVec rvec_from(const json& j, std::size_t dim, const std::string& where)
{
	if (!j.is_array() || j.size() != dim)
		throw ParseError(where + ": expected " + std::to_string(dim) + " numbers");
	RVec v;
	for (const auto& x : j)
	{
		if (!x.is_number()) throw ParseError(where + ": expected numbers");
		v.push_back(x.get<double>());
	}
	return v;
}

const json& need(const json& j, const std::string& key, const std::string& where)
{
	if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
	return j.at(key);
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback)
{
	if (!j.contains(key)) return fallback;
	try
	{
		return j.at(key).get<T>();
	}
	catch (const json::exception&)
	{
		throw ParseError("field '" + key + "' has the wrong type");
	}
}

std::vector<double> doubles_or(const json& j, const std::string& key, std::vector<double> fallback)
{
	return get_or<std::vector<double>>(j, key, std::move(fallback));
}

GradedMorphism morphism_from(const json& req)
{
	GroupFile dom = group_from_json(need(req, "domain", "request")), cod = group_from_json(need(req, "codomain", "request"));
	const json& mj = need(req, "matrix", "request");
	auto rows = static_cast<std::size_t>(cod.algebra->dim()), cols = static_cast<std::size_t>(dom.algebra->dim());
	if (!mj.is_array() || mj.size() != rows) throw ParseError("matrix: expected " + std::to_string(rows) + " rows");
	std::vector<QVec> r;
	for (std::size_t i = 0; i < rows; ++i) r.push_back(qvec_from(mj[i], cols, "matrix row " + std::to_string(i + 1)));
	GradedMorphism l(dom.algebra, cod.algebra, QMatrix::from_rows(r, cols));
	if (!l.is_h_homomorphism())
	{
		HomReport rep = check_h_homomorphism(l);
		std::string msg = "matrix is not an h-homomorphism";
		for (const auto& f : rep.failures) msg += "; " + f;
		throw ValidationFailure(msg);
	}
	return l;
}

HomogeneousSubalgebra subalgebra_from(AlgebraPtr g, const json& basis, const std::string& where)
{
	if (!basis.is_array()) throw ParseError(where + ": expected a list of vectors");
	std::vector<QVec> vs;
	for (std::size_t i = 0; i < basis.size(); ++i)
		vs.push_back(qvec_from(basis[i], static_cast<std::size_t>(g->dim()), where + "[" + std::to_string(i) + "]"));
	try
	{
		return layered_decomposition(g, vs);
	}
	catch (const SubgroupError& e)
	{
		throw ValidationFailure(std::string(e.what()) + " (witness " + format_rational_vector(e.witness) + ")");
	}
}

json epi_json(const EpiClassification& c)
{
	json j{{"verdict", to_string(c.verdict)},
	       {"kernel_basis", basis_json(c.kernel.basis())},
	       {"certificate", c.certificate},
	       {"method", c.method},
	       {"trials", c.trials}};
	j["witness_basis"] = c.witness ? basis_json(c.witness->basis()) : json(nullptr);
	if (c.verdict == EpiVerdict::undecided) j["note"] = "semi-decision budget exhausted";
	return j;
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& labels = {})
{
	std::string out;
	for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
	out += "\n";
	for (std::size_t r = 0; r < rows.size(); ++r)
	{
		bool first = true;
		if (!labels.empty())
		{
			out += labels[r];
			first = false;
		}
		for (double x : rows[r])
		{
			out += (first ? "" : ",") + format_double(x);
			first = false;
		}
		out += "\n";
	}
	write_file(path, out);
}

std::string out_path(const std::string& dir, const json& cfg, const std::string& fallback)
{
	std::filesystem::create_directories(dir);
	return (std::filesystem::path(dir) / get_or<std::string>(cfg, "output", fallback)).string();
}

std::vector<std::string> coord_header(const std::string& prefix, std::size_t n)
{
	std::vector<std::string> h;
	for (std::size_t i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i + 1));
	return h;
}

HorizontalControl control_from(AlgebraPtr g, const json& cfg)
{
	const json& c = need(cfg, "control", "config");
	if (c.is_string()) return builtin_control(g, c.get<std::string>());
	if (c.is_object() && c.contains("csv")) return read_control_csv(g, c["csv"].get<std::string>());
	throw ParseError("control: expected a built-in name or {\"csv\": path}");
}

HomogeneousMetric metric_for(AlgebraPtr g, const json& cfg, const std::string& key)
{
	if (!cfg.contains(key)) return default_metric(g);
	const json& m = cfg[key];
	try
	{
		return HomogeneousMetric(g, parse_metric_kind(need(m, "kind", key).get<std::string>()), doubles_or(m, "weights", {}));
	}
	catch (const ParseError&)
	{
		throw;
	}
	catch (const std::exception& e)
	{
		throw ParseError(key + ": " + e.what());
	}
}

// ---- experiments ----

// Solver errors (runtime_error) map to SolverFailure; argument errors pass through.
template <class F>
auto solving(F&& f)
{
	try
	{
		return f();
	}
	catch (const std::invalid_argument&)
	{
		throw;
	}
	catch (const std::out_of_range&)
	{
		throw;
	}
	catch (const ParseError&)
	{
		throw;
	}
	catch (const SubgroupError&)
	{
		throw;
	}
	catch (const std::runtime_error& e)
	{
		throw SolverFailure(e.what());
	}
}

json run_lift(const json& cfg, const std::string& dir)
{
	GroupFile gf = group_from_json(need(cfg, "group", "config"));
	auto g = gf.algebra;
	HorizontalControl u = control_from(g, cfg);
	RVec start = cfg.contains("start") ? rvec_from(cfg["start"], static_cast<std::size_t>(g->dim()), "start")
	                                   : RVec(static_cast<std::size_t>(g->dim()), 0.0);
	int steps = get_or(cfg, "steps", 400);
	double tol = get_or(cfg, "tol", 1e-8);
	SampledCurve c = horizontal_lift(u, start, steps, tol);
	std::string path = out_path(dir, cfg, "lift.csv");
	write_curve_csv(c, path);
	auto h = is_horizontal(c, get_or(cfg, "horizontal_tol", 1e-6));
	auto v = variation(c, u, make_metric(gf));
	return {{"end", rvec_json(c.x.back())},
	        {"delta", rvec_json(sub(c.x.back(), start))},
	        {"horizontal", h.horizontal},
	        {"horizontal_residual", h.max_residual},
	        {"refinements", c.refinements},
	        {"richardson_error", c.richardson_error},
	        {"variation", v.quadrature},
	        {"variation_partition", v.partition_sup},
	        {"outputs", {path}}};
}

json run_pansu(const json& cfg, const std::string& dir, std::uint64_t seed)
{
	if (cfg.contains("map"))
	{
		PDMap m = map_from_config(cfg["map"]);
		RVec x = rvec_from(need(cfg, "point", "config"), static_cast<std::size_t>(m.domain->dim()), "point");
		PansuOptions o;
		o.scales = doubles_or(cfg, "scales", o.scales);
		o.directions = get_or<std::size_t>(cfg, "directions", o.directions);
		o.defect_tol = get_or(cfg, "defect_tol", o.defect_tol);
		o.seed = seed;
		auto r = pansu_differential(m, x, o);
		std::string path = out_path(dir, cfg, "pansu_defect.csv");
		std::vector<std::vector<double>> rows;
		for (std::size_t k = 0; k < r.scales.size(); ++k) rows.push_back({r.scales[k], r.defect[k]});
		write_csv(path, {"scale", "defect"}, rows);
		return {{"matrix", matrix_json(r.matrix)},
		        {"analytic", r.analytic},
		        {"homomorphism", r.homomorphism},
		        {"converged", r.converged},
		        {"contact", contact_check(m, {x}).contact},
		        {"outputs", {path}}};
	}
	GroupFile gf = group_from_json(need(cfg, "group", "config"));
	HorizontalControl u = control_from(gf.algebra, cfg);
	auto s = pansu_order(u, get_or(cfg, "t", 0.0), doubles_or(cfg, "h", {1e-1, 1e-2, 1e-3, 1e-4}));
	std::string path = out_path(dir, cfg, "pansu_quotient.csv");
	std::vector<std::vector<double>> rows;
	for (std::size_t k = 0; k < s.h.size(); ++k) rows.push_back({s.h[k], s.value[k]});
	write_csv(path, {"h", "quotient_norm"}, rows);
	return {{"order", s.order}, {"outputs", {path}}};
}

json run_mvi(const json& cfg, const std::string& dir, std::uint64_t seed)
{
	PDMap m = map_from_config(need(cfg, "map", "config"));
	RVec c = rvec_from(need(cfg, "center", "config"), static_cast<std::size_t>(m.domain->dim()), "center");
	auto r = mean_value_ratio(m, metric_for(m.domain, cfg, "domain_metric"), metric_for(m.codomain, cfg, "codomain_metric"),
	                          c, get_or(cfg, "spread", 0.1), get_or(cfg, "r0", 0.1), get_or(cfg, "bins", 4),
	                          get_or<std::size_t>(cfg, "pairs", 200), seed);
	std::string path = out_path(dir, cfg, "mvi.csv");
	std::vector<std::vector<double>> rows;
	for (const auto& b : r.bins) rows.push_back({b.lo, b.hi, static_cast<double>(b.count), b.sup});
	write_csv(path, {"lo", "hi", "count", "sup"}, rows);
	return {{"decays", r.decays}, {"last_over_first", r.last_over_first}, {"outputs", {path}}};
}

ImplicitOptions implicit_options(const json& cfg, std::uint64_t seed)
{
	ImplicitOptions o;
	o.nodes = get_or<std::vector<int>>(cfg, "nodes", {});
	o.radius = get_or(cfg, "radius", o.radius);
	o.restarts = get_or(cfg, "restarts", o.restarts);
	o.restart_spread = get_or(cfg, "restart_spread", o.restart_spread);
	o.tol = get_or(cfg, "tol", o.tol);
	o.holder = get_or(cfg, "holder", o.holder);
	o.seed = seed;
	return o;
}

json run_implicit(const json& cfg, const std::string& dir, std::uint64_t seed)
{
	PDMap m = map_from_config(need(cfg, "map", "config"));
	RVec x = rvec_from(need(cfg, "point", "config"), static_cast<std::size_t>(m.domain->dim()), "point");
	ImplicitSolution s = solving([&] {
		return implicit_function(m, x, metric_for(m.domain, cfg, "domain_metric"), implicit_options(cfg, seed));
	});
	std::size_t n = s.nodes.empty() ? 0 : s.nodes[0].size();
	std::vector<std::string> header = coord_header("n", n);
	for (const auto& h : coord_header("phi", n)) header.push_back(h);
	header.push_back("residual");
	std::vector<std::vector<double>> rows;
	for (std::size_t k = 0; k < s.nodes.size(); ++k)
	{
		std::vector<double> r = s.nodes[k];
		r.insert(r.end(), s.phi[k].begin(), s.phi[k].end());
		r.push_back(s.residual[k]);
		rows.push_back(r);
	}
	std::string path = out_path(dir, cfg, "implicit.csv");
	write_csv(path, header, rows);
	auto td = tangent_dim_check(s, *m.codomain);
	return {{"kernel_basis", basis_json(s.kernel.basis())},
	        {"complement_basis", basis_json(s.complement.basis())},
	        {"nodes", s.nodes.size()},
	        {"radius", s.radius},
	        {"max_residual", s.max_residual},
	        {"max_restart_gap", s.max_restart_gap},
	        {"kappa", s.kappa},
	        {"holder_const", s.holder_const},
	        {"cone_bracket_rank", bracket_rank(s.kernel)},
	        {"tangent_dim", {{"kernel", td.q_kernel}, {"domain", td.q_domain}, {"codomain", td.q_codomain}, {"ok", td.ok}}},
	        {"outputs", {path}}};
}

json run_rank(const json& cfg, const std::string& dir)
{
	PDMap m = map_from_config(need(cfg, "map", "config"));
	RVec x = rvec_from(need(cfg, "point", "config"), static_cast<std::size_t>(m.domain->dim()), "point");
	RankParametrization r = solving([&] {
		return rank_parametrization(m, x, metric_for(m.codomain, cfg, "codomain_metric"), get_or(cfg, "radius", 0.2),
		                            get_or(cfg, "per_axis", 7));
	});
	std::size_t dc = static_cast<std::size_t>(m.codomain->dim()), dd = static_cast<std::size_t>(m.domain->dim());
	std::vector<std::string> header = coord_header("h", dc);
	for (const auto& h : coord_header("psi", dd)) header.push_back(h);
	for (const auto& h : coord_header("phi", dc)) header.push_back(h);
	std::vector<std::vector<double>> rows;
	for (std::size_t k = 0; k < r.h.size(); ++k)
	{
		std::vector<double> row = r.h[k];
		row.insert(row.end(), r.psi[k].begin(), r.psi[k].end());
		row.insert(row.end(), r.phi[k].begin(), r.phi[k].end());
		rows.push_back(row);
	}
	std::string path = out_path(dir, cfg, "rank.csv");
	write_csv(path, header, rows);
	return {{"image_basis", basis_json(r.image.basis())},
	        {"normal_basis", basis_json(r.normal.basis())},
	        {"max_residual", r.max_residual},
	        {"lipschitz", r.lipschitz},
	        {"outputs", {path}}};
}

json run_blowup(const json& cfg, const std::string& dir, std::uint64_t seed)
{
	PDMap m = map_from_config(need(cfg, "map", "config"));
	RVec x = rvec_from(need(cfg, "point", "config"), static_cast<std::size_t>(m.domain->dim()), "point");
	HomogeneousMetric dm = metric_for(m.domain, cfg, "domain_metric");
	ImplicitOptions o = implicit_options(cfg, seed);
	if (o.nodes.empty()) o.holder = false;
	if (o.nodes.empty())
		o.nodes.assign(static_cast<std::size_t>(std::max(1, m.domain->dim() - m.codomain->dim())), 3);
	double R = get_or(cfg, "R", 1.0);
	ImplicitSolution s = solving([&] { return implicit_function(m, x, dm, o); });
	BlowupReport rep = solving([&] {
		auto sampler = implicit_blowup_sampler(m, s, dm, R, get_or<std::size_t>(cfg, "count", 10000), seed);
		return tangent_cone_samples(sampler, x, dm, doubles_or(cfg, "scales", {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}), R);
	});
	std::vector<std::vector<double>> rows;
	for (std::size_t k = 0; k < rep.scales.size(); ++k)
		rows.push_back({rep.scales[k], rep.distance[k], static_cast<double>(rep.points[k])});
	std::string path = out_path(dir, cfg, "blowup.csv");
	write_csv(path, {"lambda", "distance", "points"}, rows);
	return {{"decreasing", rep.decreasing},
	        {"final_distance", rep.distance.empty() ? 0.0 : rep.distance.back()},
	        {"cone_basis", basis_json(s.kernel.basis())},
	        {"cone_bracket_rank", bracket_rank(s.kernel)},
	        {"cone_commutative", bracket_rank(s.kernel) == 0},
	        {"outputs", {path}}};
}

json run_estimates(const json& cfg, const std::string& dir, std::uint64_t seed, int threads)
{
	GroupFile gf = group_from_json(need(cfg, "group", "config"));
	HomogeneousMetric m = cfg.contains("metric") ? metric_for(gf.algebra, cfg, "metric") : make_metric(gf);
	double nu = get_or(cfg, "nu", 1.0);
	SampleOptions base;
	base.samples = get_or<std::size_t>(cfg, "samples", 2000);
	base.seed = seed;
	base.threads = threads;
	auto table = [&](const SampleOptions& o) {
		std::vector<EmpiricalConstant> out;
		for (const auto& k : verify_projection_estimate(m, nu, o)) out.push_back(k);
		out.push_back(estimate_rhonormiota(m, nu, o));
		out.push_back(estimate_leftinveucl(m.algebra(), nu, o));
		auto [a, b] = verify_conjugation_estimate(m, nu, o);
		out.push_back(a);
		out.push_back(b);
		out.push_back(verify_product_estimate(m, nu, get_or(cfg, "factors", 2), o));
		return out;
	};
	SampleOptions twice = base;
	twice.samples *= 2;
	auto t1 = table(base), t2 = table(twice);
	std::vector<std::vector<double>> rows;
	std::vector<std::string> labels;
	json consts = json::array();
	double max_drift = 0;
	for (std::size_t i = 0; i < t1.size(); ++i)
	{
		for (const auto* c : {&t1[i], &t2[i]})
		{
			labels.push_back(c->label);
			rows.push_back({c->nu, static_cast<double>(c->samples), c->sup});
		}
		double drift = t1[i].sup > 0 ? std::abs(t2[i].sup - t1[i].sup) / t1[i].sup : 0;
		max_drift = std::max(max_drift, drift);
		consts.push_back({{"label", t1[i].label}, {"sup", t1[i].sup}, {"sup_doubled", t2[i].sup}, {"drift", drift}});
	}
	std::string path = out_path(dir, cfg, "estimates.csv");
	write_csv(path, {"label", "nu", "samples", "sup"}, rows, labels);
	return {{"constants", consts}, {"max_drift", max_drift}, {"outputs", {path}}};
}

} // namespace

GroupFile group_from_json(const json& j)
{
	if (j.is_string()) return resolve_group(j.get<std::string>());
	if (j.is_object()) return parse_group(j.dump());
	throw ParseError("group: expected a catalog name, a path, or an inline definition");
}

json group_info(const GroupFile& f)
{
	const GradedAlgebra& g = *f.algebra;
	json dims = json::array();
	for (int l = 1; l <= g.step(); ++l) dims.push_back(g.layer_dim(l));
	return {{"name", g.name()},
	        {"dim", g.dim()},
	        {"step", g.step()},
	        {"layer_dims", dims},
	        {"homogeneous_dimension", homogeneous_dimension(g)},
	        {"stratified", is_stratified(g)},
	        {"valid", validate_grading(g).empty()}};
}

json group_validate(const GradedAlgebra& g)
{
	json v = json::array();
	for (const auto& e : validate_grading(g))
	{
		std::string kind = e.kind == GradingViolation::Kind::antisymmetry ? "antisymmetry"
		                   : e.kind == GradingViolation::Kind::jacobi     ? "jacobi"
		                                                                  : "grading";
		v.push_back({{"kind", kind}, {"indices", e.indices}, {"message", e.message}});
	}
	return {{"name", g.name()}, {"valid", v.empty()}, {"violations", v}};
}

json algebra_product(const GradedAlgebra& g, const QVec& x, const QVec& y)
{
	if (static_cast<int>(x.size()) != g.dim() || static_cast<int>(y.size()) != g.dim())
		throw ParseError("vectors must have " + std::to_string(g.dim()) + " coordinates");
	return {{"product", format_rational_vector(group_product(g, x, y))}};
}

json algebra_term(const GradedAlgebra& g, int n, const QVec& x, const QVec& y)
{
	if (static_cast<int>(x.size()) != g.dim() || static_cast<int>(y.size()) != g.dim())
		throw ParseError("vectors must have " + std::to_string(g.dim()) + " coordinates");
	if (n < 1) throw ParseError("term degree must be positive");
	return {{"n", n}, {"term", format_rational_vector(bch_term(g, n, x, y))}};
}

json algebra_decompose(int n)
{
	if (n < 2) throw ParseError("decompose needs n >= 2");
	LnDecomposition d = decompose_cn(n);
	json terms = json::array();
	for (std::size_t i = 0; i < d.alphas.size(); ++i)
		if (!is_zero(d.coefficients[i])) terms.push_back({{"alpha", d.alphas[i]}, {"coefficient", to_string(d.coefficients[i])}});
	return {{"n", n}, {"terms", terms}};
}

json algebra_oracle(const GradedAlgebra& g, int trials, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
	auto draw = [&] {
		QVec v(static_cast<std::size_t>(g.dim()));
		for (auto& q : v)
		{
			q = Rational(num(rng), den(rng));
			q.canonicalize();
		}
		return v;
	};
	int mismatches = 0;
	json first = nullptr;
	for (int t = 0; t < trials; ++t)
	{
		QVec x = draw(), y = draw();
		QVec a = group_product(g, x, y), b = series_oracle_product(g, x, y);
		if (a != b)
		{
			if (!mismatches)
				first = {{"x", format_rational_vector(x)}, {"y", format_rational_vector(y)}, {"bch", format_rational_vector(a)},
				         {"oracle", format_rational_vector(b)}};
			++mismatches;
		}
	}
	json r{{"group", g.name()}, {"trials", trials}, {"mismatches", mismatches}, {"ok", mismatches == 0}};
	if (mismatches) r["first_mismatch"] = first;
	return r;
}

json subgroups(const std::string& command, const json& req, std::uint64_t seed)
{
	SearchOptions so;
	so.seed = seed;
	so.budget = get_or<std::size_t>(req, "budget", so.budget);
	if (command == "classify-epi")
	{
		GradedMorphism l = morphism_from(req);
		EpiClassification c = classify_epimorphism(l, so);
		json j = epi_json(c);
		if (c.witness) j["right_inverse"] = matrix_json(right_inverse(l, *c.witness).matrix());
		return j;
	}
	if (command == "classify-mono")
	{
		GradedMorphism l = morphism_from(req);
		MonoClassification c = classify_monomorphism(l, so);
		json j{{"verdict", to_string(c.verdict)},
		       {"image_basis", basis_json(c.image.basis())},
		       {"certificate", c.certificate},
		       {"method", c.method},
		       {"trials", c.trials}};
		j["normal_complement_basis"] = c.normal_complement ? basis_json(c.normal_complement->basis()) : json(nullptr);
		j["projection"] = c.projection ? matrix_json(c.projection->matrix()) : json(nullptr);
		if (c.verdict == MonoVerdict::undecided) j["note"] = "semi-decision budget exhausted";
		return j;
	}
	if (command == "complement")
	{
		GroupFile gf = group_from_json(need(req, "group", "request"));
		HomogeneousSubalgebra n = subalgebra_from(gf.algebra, need(req, "subalgebra", "request"), "subalgebra");
		if (!is_ideal(n)) throw ValidationFailure("subalgebra is not an ideal");
		EpiClassification c = find_complement(n, so);
		json j = epi_json(c);
		if (c.witness)
		{
			j["commutative"] = is_commutative(*c.witness);
			j["qkp"] = check_qkp(n, *c.witness);
		}
		return j;
	}
	if (command == "quotient")
	{
		GroupFile gf = group_from_json(need(req, "group", "request"));
		HomogeneousSubalgebra n = subalgebra_from(gf.algebra, need(req, "ideal", "request"), "ideal");
		if (!is_ideal(n)) throw ValidationFailure("subalgebra is not an ideal");
		Quotient q = quotient(n);
		bool abelian_q = q.algebra->canonical_brackets().empty();
		return {{"group", json::parse(emit_group(*q.algebra))},
		        {"projection", matrix_json(q.projection.matrix())},
		        {"representatives", basis_json(q.representatives)},
		        {"abelian", abelian_q},
		        {"step", q.algebra->step()},
		        {"stratified", is_stratified(*q.algebra)},
		        {"valid", validate_grading(*q.algebra).empty()}};
	}
	throw ParseError("unknown subgroups command '" + command + "'");
}

json experiment(const std::string& kind, const json& cfg, const std::string& out_dir, std::uint64_t seed, int threads)
{
	if (!cfg.is_object()) throw ParseError("config: expected a JSON object");
	if (cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
	json r;
	if (kind == "lift") r = run_lift(cfg, out_dir);
	else if (kind == "pansu") r = run_pansu(cfg, out_dir, seed);
	else if (kind == "mvi") r = run_mvi(cfg, out_dir, seed);
	else if (kind == "implicit") r = run_implicit(cfg, out_dir, seed);
	else if (kind == "rank") r = run_rank(cfg, out_dir);
	else if (kind == "blowup") r = run_blowup(cfg, out_dir, seed);
	else if (kind == "verify-estimates") r = run_estimates(cfg, out_dir, seed, threads);
	else throw ParseError("unknown experiment '" + kind + "'");
	r["experiment"] = kind;
	r["seed"] = seed;
	return r;
}

PDMap map_from_config(const json& spec)
{
	std::string name = spec.is_string() ? spec.get<std::string>() : need(spec, "name", "map").get<std::string>();
	json p = spec.is_object() ? spec : json::object();
	PDMap m;
	if (name == "level_map") m = example_level_map();
	else if (name == "shear") m = shear_map();
	else if (name == "bend") m = bend_map();
	else if (name == "parabola_sheet") m = parabola_sheet_map(get_or(p, "epsilon", 1.0));
	else if (name == "dilation")
	{
		auto g = group_from_json(need(p, "group", "map")).algebra;
		m = dilation_map(g, rational_json(need(p, "r", "map"), "map.r"));
	}
	else if (name == "translation")
	{
		auto g = group_from_json(need(p, "group", "map")).algebra;
		m = translation_map(g, rvec_from(need(p, "p", "map"), static_cast<std::size_t>(g->dim()), "map.p"));
	}
	else if (name == "linear")
	{
		json req{{"domain", need(p, "domain", "map")}, {"codomain", need(p, "codomain", "map")}, {"matrix", need(p, "matrix", "map")}};
		GradedMorphism l = morphism_from(req);
		m = linear_map(l.domain_ptr(), l.codomain_ptr(), l.matrix());
	}
	else if (name == "coordinate")
		m = coordinate_function(group_from_json(need(p, "group", "map")).algebra, get_or(p, "index", 1) - 1);
	else
		throw ParseError("unknown map '" + name + "'");
	if (p.contains("box"))
	{
		const json& b = p["box"];
		if (!b.is_array() || static_cast<int>(b.size()) != m.domain->dim())
			throw ParseError("map.box: expected one [lo, hi] pair per coordinate");
		m.box.clear();
		for (const auto& iv : b) m.box.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
	}
	return m;
}

} // namespace carnot::cmd
