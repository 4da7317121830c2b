#include "carnot/metric.hpp"

#include "carnot/bch.hpp"
#include "carnot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace carnot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double tail_norm(const GradedAlgebra& g, const RVec& x, int layer)
{
	double s = 0;
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) >= layer) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
	return std::sqrt(s);
}

} // namespace

HomogeneousMetric::HomogeneousMetric(AlgebraPtr g, MetricKind kind, std::vector<double> weights)
    : g_(std::move(g)), kind_(kind), w_(std::move(weights))
{
	if (!g_) throw std::invalid_argument("metric needs an algebra");
	if (kind_ == MetricKind::koranyi)
	{
		if (g_->step() > 2) throw std::invalid_argument("the Koranyi gauge is only defined here for step <= 2");
		if (!w_.empty()) throw std::invalid_argument("the Koranyi gauge takes no weights");
		return;
	}
	if (w_.empty()) w_.assign(static_cast<std::size_t>(g_->step()), 1.0);
	if (static_cast<int>(w_.size()) != g_->step())
		throw std::invalid_argument("weighted_max needs one weight per layer");
	for (double w : w_)
		if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("metric weights must be positive");
}

void HomogeneousMetric::check(const RVec& x) const
{
	if (static_cast<int>(x.size()) != g_->dim())
		throw std::invalid_argument("element has " + std::to_string(x.size()) + " coordinates, metric algebra has dim " +
		                            std::to_string(g_->dim()));
}

double HomogeneousMetric::norm(const RVec& x) const
{
	check(x);
	if (kind_ == MetricKind::koranyi)
	{
		double h = layer_norm(*g_, x, 1), v = g_->step() >= 2 ? layer_norm(*g_, x, 2) : 0.0;
		return std::pow(h * h * h * h + 16 * v * v, 0.25);
	}
	double n = 0;
	for (int l = 1; l <= g_->step(); ++l)
		n = std::max(n, w_[static_cast<std::size_t>(l - 1)] * std::pow(layer_norm(*g_, x, l), 1.0 / l));
	return n;
}

double HomogeneousMetric::distance(const RVec& x, const RVec& y) const
{
	check(x);
	check(y);
	if (x == y) return 0.0; // float brackets of x with itself need not cancel exactly
	return norm(group_product(*g_, negate(x), y));
}

RVec HomogeneousMetric::normalize(const RVec& x) const
{
	double n = norm(x);
	if (n == 0) throw std::invalid_argument("cannot normalize the identity");
	return dilate(*g_, x, 1.0 / n);
}

MetricKind parse_metric_kind(const std::string& s)
{
	if (s == "koranyi") return MetricKind::koranyi;
	if (s == "weighted_max") return MetricKind::weighted_max;
	throw std::invalid_argument("unknown metric kind '" + s + "'");
}

std::string to_string(MetricKind k) { return k == MetricKind::koranyi ? "koranyi" : "weighted_max"; }

HomogeneousMetric default_metric(AlgebraPtr g)
{
	int step = g->step();
	return HomogeneousMetric(std::move(g), step <= 2 ? MetricKind::koranyi : MetricKind::weighted_max);
}

double first_layer_lower_bound(const RVec& x, const RVec& y, const HomogeneousMetric& m)
{
	double d = m.distance(x, y);
	if (d == 0) throw std::invalid_argument("first_layer_lower_bound: x == y");
	return layer_norm(m.algebra(), sub(x, y), 1) / d;
}

EmpiricalConstant maximize_sampled(const std::string& label, std::size_t m,
                                   const std::function<double(const std::vector<double>&)>& f,
                                   const SampleOptions& opt)
{
	std::vector<std::vector<double>> pts(opt.samples);
	std::vector<double> val(opt.samples, kNaN);
	parallel_for(opt.samples, opt.threads, [&](std::size_t i) {
		auto rng = sample_rng(opt.seed, i);
		std::uniform_real_distribution<double> u(-1, 1);
		pts[i].resize(m);
		for (auto& p : pts[i]) p = u(rng);
		val[i] = f(pts[i]);
	});
	std::vector<std::size_t> order;
	for (std::size_t i = 0; i < opt.samples; ++i)
		if (std::isfinite(val[i])) order.push_back(i);
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
	order.resize(std::min(order.size(), static_cast<std::size_t>(std::max(opt.refine_top, 0))));

	std::vector<std::vector<double>> best(order.size());
	std::vector<double> best_val(order.size());
	parallel_for(order.size(), opt.threads, [&](std::size_t r) {
		std::vector<double> p = pts[order[r]];
		double fp = val[order[r]];
		double step = 0.1;
		int evals = 0;
		while (step > 1e-7 && evals < 6000)
		{
			bool improved = false;
			for (std::size_t k = 0; k < m; ++k)
				for (double sgn : {1.0, -1.0})
				{
					std::vector<double> q = p;
					q[k] = std::clamp(q[k] + sgn * step, -1.0, 1.0);
					double fq = f(q);
					++evals;
					if (std::isfinite(fq) && fq > fp)
					{
						p = std::move(q);
						fp = fq;
						improved = true;
						break;
					}
				}
			if (!improved) step *= 0.5;
		}
		best[r] = std::move(p);
		best_val[r] = fp;
	});

	EmpiricalConstant c;
	c.label = label;
	c.samples = opt.samples;
	c.sup = 0;
	for (std::size_t r = 0; r < best.size(); ++r)
		if (best_val[r] > c.sup || c.argmax.empty())
		{
			c.sup = best_val[r];
			c.argmax = best[r];
		}
	if (best.empty()) c.sup = kNaN;
	return c;
}

RVec euclidean_ball_point(const std::vector<double>& p, std::size_t offset, std::size_t dim, double nu)
{
	RVec x(p.begin() + static_cast<long>(offset), p.begin() + static_cast<long>(offset + dim));
	double n = norm2(x);
	if (n == 0) return x;
	return scale(nu * std::abs(p[offset + dim]) / n, x);
}

RVec gauge_ball_point(const HomogeneousMetric& m, const std::vector<double>& p, std::size_t offset, double nu)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	RVec x(p.begin() + static_cast<long>(offset), p.begin() + static_cast<long>(offset + dim));
	if (m.norm(x) == 0) return x;
	return dilate(m.algebra(), m.normalize(x), nu * std::abs(p[offset + dim]));
}

// ---- word systems ----

WordSystem::WordSystem(const HomogeneousMetric& m, std::vector<int> indices)
{
	g_ = m.algebra_ptr();
	first_ = g_->layer_indices(1);
	for (int i : indices)
		if (i < 0 || i >= static_cast<int>(first_.size())) throw std::invalid_argument("word index outside first layer");
	idx_ = std::move(indices);
	for (int i : first_) n_.push_back(m.norm(to_double(g_->basis_vector(i))));
}

WordSystem WordSystem::closed_form(const HomogeneousMetric& m)
{
	const GradedAlgebra& g = m.algebra();
	if (g.step() > 2)
		throw std::invalid_argument("no registered word solver for step " + std::to_string(g.step()) + " groups");
	WordSystem ws(m, {});
	ws.solver_ = true;
	if (g.step() == 2)
	{
		ws.second_ = g.layer_indices(2);
		std::size_t q = ws.second_.size();
		std::vector<QVec> cols;
		Subspace span = Subspace::span(q, {});
		for (std::size_t a = 0; a < ws.first_.size() && cols.size() < q; ++a)
			for (std::size_t b = a + 1; b < ws.first_.size() && cols.size() < q; ++b)
			{
				QVec br = g.bracket(g.basis_vector(ws.first_[a]), g.basis_vector(ws.first_[b]));
				QVec v(q);
				for (std::size_t k = 0; k < q; ++k) v[k] = br[static_cast<std::size_t>(ws.second_[k])];
				if (span.contains(v)) continue;
				std::vector<QVec> vs = span.basis();
				vs.push_back(v);
				span = Subspace::span(q, vs);
				cols.push_back(v);
				ws.pairs_.push_back({static_cast<int>(a), static_cast<int>(b)});
			}
		if (cols.size() < q)
			throw std::invalid_argument("no registered word solver: first-layer brackets do not span layer 2");
		QMatrix inv = *inverse(QMatrix::from_columns(cols, q));
		ws.pair_inverse_ = inv.to_double_rowmajor();
		for (auto [a, b] : ws.pairs_) ws.idx_.insert(ws.idx_.end(), {a, b, a, b});
	}
	for (std::size_t a = 0; a < ws.first_.size(); ++a) ws.idx_.push_back(static_cast<int>(a));
	return ws;
}

RVec WordSystem::generating_word(const std::vector<double>& a, std::size_t s) const
{
	if (s > idx_.size() || s > a.size())
		throw std::out_of_range("generating_word: s=" + std::to_string(s) + " exceeds word length " +
		                        std::to_string(std::min(idx_.size(), a.size())));
	RVec acc(static_cast<std::size_t>(g_->dim()), 0.0);
	for (std::size_t k = 0; k < s; ++k)
	{
		std::size_t letter = static_cast<std::size_t>(idx_[k]);
		RVec h(static_cast<std::size_t>(g_->dim()), 0.0);
		h[static_cast<std::size_t>(first_[letter])] = a[k] / n_[letter];
		acc = group_product(*g_, acc, h);
	}
	return acc;
}

std::vector<double> WordSystem::solve_word(const RVec& x) const
{
	if (!solver_) throw std::logic_error("no registered solver for this word system");
	if (static_cast<int>(x.size()) != g_->dim()) throw std::invalid_argument("solve_word: dimension mismatch");
	std::size_t m = first_.size(), q = second_.size();
	std::vector<double> a(idx_.size(), 0.0);
	std::vector<double> h(m);
	for (std::size_t i = 0; i < m; ++i) h[i] = x[static_cast<std::size_t>(first_[i])];
	for (std::size_t i = 0; i < m; ++i) a[4 * pairs_.size() + i] = h[i] * n_[i];
	if (q == 0) return a;

	// exp(h_1 e_1) ... exp(h_m e_m) = exp(sum h_i e_i + 1/2 sum_{i<j} h_i h_j [e_i,e_j])
	RVec v(q);
	for (std::size_t k = 0; k < q; ++k) v[k] = x[static_cast<std::size_t>(second_[k])];
	for (std::size_t i = 0; i < m; ++i)
		for (std::size_t j = i + 1; j < m; ++j)
			for (const auto& t : g_->terms(first_[i], first_[j]))
			{
				auto it = std::find(second_.begin(), second_.end(), t.k);
				v[static_cast<std::size_t>(it - second_.begin())] -= 0.5 * h[i] * h[j] * t.c.get_d();
			}
	for (std::size_t p = 0; p < pairs_.size(); ++p)
	{
		double mu = 0;
		for (std::size_t k = 0; k < q; ++k) mu += pair_inverse_[p * q + k] * v[k];
		// exp(s g_i) exp(t g_j) exp(-s g_i) exp(-t g_j) = exp(st [e_i,e_j] / (n_i n_j))
		auto [i, j] = pairs_[p];
		double target = mu * n_[static_cast<std::size_t>(i)] * n_[static_cast<std::size_t>(j)];
		double s = std::sqrt(std::abs(target)), t = target < 0 ? -s : s;
		a[4 * p] = s;
		a[4 * p + 1] = t;
		a[4 * p + 2] = -s;
		a[4 * p + 3] = -t;
	}
	return a;
}

// ---- estimators ----

EmpiricalConstant word_constant(const WordSystem& ws, const HomogeneousMetric& m, const SampleOptions& opt, double r)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	auto c = maximize_sampled("word_constant", dim,
	                          [&](const std::vector<double>& p) {
		                          RVec x(p.begin(), p.end());
		                          if (m.norm(x) == 0) return kNaN;
		                          auto a = ws.solve_word(dilate(m.algebra(), m.normalize(x), r));
		                          double mx = 0;
		                          for (double v : a) mx = std::max(mx, std::abs(v));
		                          return mx;
	                          },
	                          opt);
	c.nu = r;
	return c;
}

EmpiricalConstant estimate_first_layer_constant(const HomogeneousMetric& m, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	auto c = maximize_sampled("first_layer", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x = gauge_ball_point(m, p, 0, nu), y = gauge_ball_point(m, p, dim + 1, nu);
		                          double d = m.distance(x, y);
		                          if (d < 1e-12) return kNaN;
		                          return layer_norm(m.algebra(), sub(x, y), 1) / d;
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

std::vector<EmpiricalConstant> verify_projection_estimate(const HomogeneousMetric& m, double u, const SampleOptions& opt)
{
	const GradedAlgebra& g = m.algebra();
	std::size_t dim = static_cast<std::size_t>(g.dim());
	std::vector<EmpiricalConstant> out;
	for (int i = 1; i <= g.step(); ++i)
	{
		auto c = maximize_sampled("projection_K_" + std::to_string(i), dim + 1,
		                          [&](const std::vector<double>& p) {
			                          RVec x = gauge_ball_point(m, p, 0, u);
			                          double d = m.norm(x);
			                          if (d < 1e-12) return kNaN;
			                          return tail_norm(g, x, i) / std::pow(d, i);
		                          },
		                          opt);
		c.nu = u;
		out.push_back(std::move(c));
	}
	return out;
}

EmpiricalConstant estimate_rhonormiota(const HomogeneousMetric& m, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	double inv = 1.0 / m.algebra().step();
	auto c = maximize_sampled("rhonormiota", dim + 1,
	                          [&](const std::vector<double>& p) {
		                          RVec xi = euclidean_ball_point(p, 0, dim, nu);
		                          double n = norm2(xi);
		                          if (n < 1e-12) return kNaN;
		                          return m.norm(xi) / std::pow(n, inv);
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

EmpiricalConstant estimate_leftinveucl(const GradedAlgebra& g, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(g.dim());
	auto c = maximize_sampled("leftinveucl", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec xi = euclidean_ball_point(p, 0, dim, nu), eta = euclidean_ball_point(p, dim + 1, dim, nu);
		                          double e = norm2(sub(xi, eta));
		                          if (e < 1e-12) return kNaN;
		                          return norm2(group_product(g, negate(xi), eta)) / e;
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

EmpiricalConstant estimate_bilinear_constant(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(g.dim());
	auto c = maximize_sampled("alpha_" + std::to_string(n), 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x = euclidean_ball_point(p, 0, dim, nu), y = euclidean_ball_point(p, dim + 1, dim, nu);
		                          double b = norm2(g.bracket(x, y));
		                          if (b < 1e-12) return kNaN;
		                          return norm2(bch_term(g, n, x, y)) / b;
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

EmpiricalConstant estimate_remainder_constant(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(g.dim());
	auto c = maximize_sampled("C_" + std::to_string(n), 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x = euclidean_ball_point(p, 0, dim, nu), y = euclidean_ball_point(p, dim + 1, dim, nu);
		                          double s = norm2(add(x, y));
		                          if (s < 1e-6) return kNaN;
		                          RVec r = to_double(cn_remainder(g, n, to_rational(x), to_rational(y)));
		                          return norm2(r) / (s * s * s);
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

double cn_difference_ratio(const GradedAlgebra& g, int n, const RVec& x, const RVec& y, const RVec& d1,
                           const RVec& d2, double nu)
{
	double d = std::max(norm2(d1), norm2(d2));
	if (d == 0 || n > g.step()) return 0;
	RVec diff = sub(bch_term(g, n, add(x, d1), add(y, d2)), bch_term(g, n, x, y));
	return norm2(diff) / (std::pow(nu, n - 1) * d);
}

EmpiricalConstant cn_difference_bound(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(g.dim()), k = dim + 1;
	auto c = maximize_sampled("gamma_" + std::to_string(n), 4 * k,
	                          [&](const std::vector<double>& p) {
		                          RVec d1 = euclidean_ball_point(p, 2 * k, dim, nu), d2 = euclidean_ball_point(p, 3 * k, dim, nu);
		                          if (std::max(norm2(d1), norm2(d2)) < 1e-9) return kNaN;
		                          return cn_difference_ratio(g, n, euclidean_ball_point(p, 0, dim, nu),
		                                                     euclidean_ball_point(p, k, dim, nu), d1, d2, nu);
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

EmpiricalConstant estimate_rhoestnorm(const HomogeneousMetric& m, double nu, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	double inv = 1.0 / m.algebra().step();
	auto c = maximize_sampled("rhoestnorm", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec xi = euclidean_ball_point(p, 0, dim, nu), eta = euclidean_ball_point(p, dim + 1, dim, nu);
		                          double e = norm2(sub(xi, eta));
		                          if (e < 1e-12) return kNaN;
		                          return m.distance(xi, eta) / std::pow(e, inv);
	                          },
	                          opt);
	c.nu = nu;
	return c;
}

std::pair<EmpiricalConstant, EmpiricalConstant> verify_conjugation_estimate(const HomogeneousMetric& m, double nu,
                                                                            const SampleOptions& opt)
{
	const GradedAlgebra& g = m.algebra();
	std::size_t dim = static_cast<std::size_t>(g.dim());
	double inv = 1.0 / g.step();
	auto conj = [&](const std::vector<double>& p, RVec& x) {
		x = gauge_ball_point(m, p, 0, nu);
		RVec y = gauge_ball_point(m, p, dim + 1, nu);
		return m.norm(group_product(g, group_product(g, negate(y), x), y));
	};
	auto a = maximize_sampled("conjugation_log", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x;
		                          double d = conj(p, x);
		                          double n = norm2(x);
		                          return n < 1e-12 ? kNaN : d / std::pow(n, inv);
	                          },
	                          opt);
	auto b = maximize_sampled("conjugation_gauge", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x;
		                          double d = conj(p, x);
		                          double n = m.norm(x);
		                          return n < 1e-12 ? kNaN : d / std::pow(n, inv);
	                          },
	                          opt);
	a.nu = b.nu = nu;
	return {a, b};
}

EmpiricalConstant verify_product_estimate(const HomogeneousMetric& m, double nu, int n_factors, const SampleOptions& opt)
{
	if (n_factors < 1) throw std::invalid_argument("product estimate needs at least one factor");
	const GradedAlgebra& g = m.algebra();
	std::size_t dim = static_cast<std::size_t>(g.dim()), nf = static_cast<std::size_t>(n_factors);
	double inv = 1.0 / g.step();
	auto c = maximize_sampled(
	    "product_N" + std::to_string(n_factors), 2 * nf * (dim + 1),
	    [&](const std::vector<double>& p) {
		    std::vector<RVec> a(nf), b(nf);
		    double denom = 0;
		    for (std::size_t j = 0; j < nf; ++j)
		    {
			    b[j] = gauge_ball_point(m, p, 2 * j * (dim + 1), nu / static_cast<double>(nf));
			    RVec dj = gauge_ball_point(m, p, (2 * j + 1) * (dim + 1), nu);
			    a[j] = group_product(g, b[j], dj);
			    denom += std::pow(m.norm(dj), inv);
		    }
		    RVec tail(dim, 0.0);
		    for (std::size_t j = nf; j-- > 0;)
		    {
			    tail = group_product(g, b[j], tail);
			    if (m.norm(tail) > nu) return kNaN;
		    }
		    if (denom < 1e-12) return kNaN;
		    return m.distance(group_product_all(g, a), group_product_all(g, b)) / denom;
	    },
	    opt);
	c.nu = nu;
	return c;
}

EmpiricalConstant quasi_triangle_constant(const HomogeneousMetric& m, const SampleOptions& opt)
{
	std::size_t dim = static_cast<std::size_t>(m.algebra().dim());
	auto c = maximize_sampled("quasi_triangle", 2 * (dim + 1),
	                          [&](const std::vector<double>& p) {
		                          RVec x = gauge_ball_point(m, p, 0, 1.0), y = gauge_ball_point(m, p, dim + 1, 1.0);
		                          double s = m.norm(x) + m.norm(y);
		                          if (s < 1e-12) return kNaN;
		                          return m.norm(group_product(m.algebra(), x, y)) / s;
	                          },
	                          opt);
	c.nu = 1.0;
	return c;
}

} // namespace carnot
