#include "carnot/curves.hpp"

#include "carnot/bch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace carnot {

namespace {

constexpr int kSmooth = 99;

double factorial(int n)
{
	double f = 1;
	for (int k = 2; k <= n; ++k) f *= k;
	return f;
}

void check_first_layer(const GradedAlgebra& g, const RVec& u, double t)
{
	if (static_cast<int>(u.size()) != g.dim()) throw std::invalid_argument("control value has the wrong length");
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) != 1 && u[static_cast<std::size_t>(i)] != 0.0)
			throw std::invalid_argument("control leaves the first layer at t = " + std::to_string(t));
}

RVec rk4_step(const GradedAlgebra& g, const CurveFn& f, const RVec& x, double t, double h)
{
	RVec k1 = contact_velocity(g, x, f(t));
	RVec x2 = x;
	axpy(h / 2, k1, x2);
	RVec k2 = contact_velocity(g, x2, f(t + h / 2));
	RVec x3 = x;
	axpy(h / 2, k2, x3);
	RVec k3 = contact_velocity(g, x3, f(t + h / 2));
	RVec x4 = x;
	axpy(h, k3, x4);
	RVec k4 = contact_velocity(g, x4, f(t + h));
	RVec out = x;
	for (std::size_t i = 0; i < x.size(); ++i) out[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
	return out;
}

// Values on the uniform grid with `sub` RK4 steps per piece overlap of each cell.
std::vector<RVec> integrate(const HorizontalControl& u, const RVec& start, const std::vector<double>& grid, int sub)
{
	const GradedAlgebra& g = u.algebra();
	std::vector<RVec> xs{start};
	RVec x = start;
	for (std::size_t k = 0; k + 1 < grid.size(); ++k)
	{
		for (const auto& p : u.pieces())
		{
			double lo = std::max(grid[k], p.a), hi = std::min(grid[k + 1], p.b);
			if (hi <= lo) continue;
			double h = (hi - lo) / sub;
			for (int s = 0; s < sub; ++s) x = rk4_step(g, p.f, x, lo + s * h, h);
		}
		xs.push_back(x);
	}
	return xs;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
	if (n % 2) ++n;
	double h = (b - a) / n, s = f(a) + f(b);
	for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
	return s * h / 3;
}

} // namespace

// ---- controls ----

HorizontalControl::HorizontalControl(AlgebraPtr g, std::vector<Piece> pieces, int smoothness, std::string name)
    : g_(std::move(g)), pieces_(std::move(pieces)), smooth_(smoothness), name_(std::move(name))
{
	if (pieces_.empty()) throw std::invalid_argument("control needs at least one piece");
	for (std::size_t k = 0; k < pieces_.size(); ++k)
	{
		if (!(pieces_[k].b > pieces_[k].a)) throw std::invalid_argument("control piece has empty domain");
		if (k > 0 && pieces_[k].a != pieces_[k - 1].b) throw std::invalid_argument("control pieces must be contiguous");
	}
}

HorizontalControl::HorizontalControl(AlgebraPtr g, double a, double b, CurveFn f, int smoothness, std::string name)
    : HorizontalControl(std::move(g), std::vector<Piece>{{a, b, std::move(f)}}, smoothness, std::move(name))
{
}

std::vector<double> HorizontalControl::breakpoints() const
{
	std::vector<double> out;
	for (std::size_t k = 1; k < pieces_.size(); ++k) out.push_back(pieces_[k].a);
	return out;
}

RVec HorizontalControl::operator()(double t, int side) const
{
	if (t < a() || t > b()) throw std::out_of_range("control evaluated outside [" + std::to_string(a()) + ", " +
	                                                std::to_string(b()) + "]");
	const Piece* pick = &pieces_.back();
	for (const auto& p : pieces_)
		if (t < p.b || (t == p.b && side < 0))
		{
			pick = &p;
			break;
		}
	RVec v = pick->f(t);
	check_first_layer(*g_, v, t);
	return v;
}

HorizontalControl HorizontalControl::restrict(double s, double t) const
{
	if (s < a() || t > b() || !(t > s)) throw std::out_of_range("restriction window outside the control domain");
	std::vector<Piece> out;
	for (const auto& p : pieces_)
	{
		double lo = std::max(s, p.a), hi = std::min(t, p.b);
		if (hi > lo) out.push_back({lo, hi, p.f});
	}
	return HorizontalControl(g_, out, smooth_, name_);
}

std::vector<std::string> builtin_control_names() { return {"line", "circle", "square", "parabola"}; }

HorizontalControl builtin_control(AlgebraPtr g, const std::string& name)
{
	std::vector<int> v1 = g->layer_indices(1);
	std::size_t n = static_cast<std::size_t>(g->dim());
	auto vec = [n, v1](double a, double b) {
		RVec v(n, 0.0);
		v[static_cast<std::size_t>(v1[0])] = a;
		if (v1.size() > 1) v[static_cast<std::size_t>(v1[1])] = b;
		return v;
	};
	if (name == "line") return HorizontalControl(g, 0, 1, [vec](double) { return vec(1, 0); }, kSmooth, name);
	if (v1.size() < 2) throw std::invalid_argument("control '" + name + "' needs two first-layer directions");
	if (name == "circle")
		return HorizontalControl(
		    g, 0, 2 * std::numbers::pi, [vec](double t) { return vec(-std::sin(t), std::cos(t)); }, kSmooth, name);
	if (name == "parabola") return HorizontalControl(g, 0, 1, [vec](double t) { return vec(1, 2 * t); }, kSmooth, name);
	if (name == "square")
		return HorizontalControl(g,
		                         {{0, 1, [vec](double) { return vec(1, 0); }},
		                          {1, 2, [vec](double) { return vec(0, 1); }},
		                          {2, 3, [vec](double) { return vec(-1, 0); }},
		                          {3, 4, [vec](double) { return vec(0, -1); }}},
		                         0, name);
	throw std::invalid_argument("unknown control '" + name + "'");
}

// ---- contact system ----

RVec contact_velocity(const GradedAlgebra& g, const RVec& gamma, const RVec& u)
{
	RVec v(u.size(), 0.0);
	for (int i : g.layer_indices(1)) v[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)];
	for (int layer = 2; layer <= g.step(); ++layer)
	{
		// Only layers below `layer` of v enter pi_layer, and those are final.
		RVec acc(v.size(), 0.0), w = v;
		for (int n = 2; n <= g.step(); ++n)
		{
			w = g.bracket(gamma, w);
			if (is_zero_vector(w)) break;
			axpy((n % 2 ? -1.0 : 1.0) / factorial(n), w, acc);
		}
		for (int i : g.layer_indices(layer)) v[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(i)];
	}
	return v;
}

RVec left_trivialized(const GradedAlgebra& g, const RVec& gamma, const RVec& v)
{
	RVec acc = v, w = v;
	for (int n = 1; n < g.step(); ++n)
	{
		w = g.bracket(gamma, w);
		if (is_zero_vector(w)) break;
		axpy((n % 2 ? -1.0 : 1.0) / factorial(n + 1), w, acc);
	}
	return acc;
}

SampledCurve horizontal_lift(const HorizontalControl& u, const RVec& start, int steps, double tol, int max_refinements)
{
	if (steps < 2) throw std::invalid_argument("horizontal_lift needs at least 2 steps");
	const GradedAlgebra& g = u.algebra();
	if (static_cast<int>(start.size()) != g.dim()) throw std::invalid_argument("start point has the wrong length");
	SampledCurve c{u.algebra_ptr(), {}, {}, u.breakpoints(), 0, 0};
	for (int k = 0; k <= steps; ++k) c.t.push_back(u.a() + (u.b() - u.a()) * k / steps);
	c.t.back() = u.b();
	// validate the control once on the grid
	for (double t : c.t) (void)u(t);
	std::vector<RVec> cur = integrate(u, start, c.t, 1);
	for (int r = 1; r <= max_refinements; ++r)
	{
		std::vector<RVec> next = integrate(u, start, c.t, 1 << r);
		double err = 0;
		for (std::size_t k = 0; k < cur.size(); ++k) err = std::max(err, norm_inf(sub(next[k], cur[k])));
		cur = std::move(next);
		c.refinements = r;
		c.richardson_error = err;
		if (err <= tol) break;
	}
	c.x = std::move(cur);
	return c;
}

HorizontalityReport is_horizontal(const SampledCurve& c, double tol)
{
	if (c.t.size() < 3) throw std::invalid_argument("is_horizontal needs at least 3 samples");
	const GradedAlgebra& g = *c.g;
	HorizontalityReport r{true, 0, c.t.front()};
	static const double w5[5][5] = {{-25, 48, -36, 16, -3},
	                                {-3, -10, 18, -6, 1},
	                                {1, -8, 0, 8, -1},
	                                {-1, 6, -18, 10, 3},
	                                {3, -16, 36, -48, 25}};
	std::size_t n = c.t.size();
	for (std::size_t k = 1; k + 1 < n; ++k)
	{
		// five-point stencil (skewed near the ends) where the grid is locally
		// uniform, else three-point
		bool wide = n >= 5;
		std::size_t j0 = wide ? std::min(k >= 2 ? k - 2 : 0, n - 5) : 0;
		if (wide)
		{
			double h = c.t[j0 + 1] - c.t[j0];
			for (std::size_t j = j0; j < j0 + 4; ++j)
				if (std::abs(c.t[j + 1] - c.t[j] - h) > 1e-9 * h) wide = false;
		}
		std::size_t lo = wide ? j0 : k - 1, hi = wide ? j0 + 4 : k + 1;
		bool near_break = false;
		for (double b : c.breaks)
			if (c.t[lo] <= b && b <= c.t[hi]) near_break = true;
		if (near_break) continue;
		RVec v(c.x[k].size(), 0.0);
		if (wide)
		{
			const double* w = w5[k - j0];
			for (std::size_t j = 0; j < 5; ++j) axpy(w[j], c.x[j0 + j], v);
			v = scale(1.0 / (12 * (c.t[j0 + 1] - c.t[j0])), v);
		}
		else
			v = scale(1.0 / (c.t[k + 1] - c.t[k - 1]), sub(c.x[k + 1], c.x[k - 1]));
		RVec w = left_trivialized(g, c.x[k], v);
		double res = std::sqrt(std::max(0.0, dot(w, w) - std::pow(layer_norm(g, w, 1), 2)));
		if (res > r.max_residual)
		{
			r.max_residual = res;
			r.at_time = c.t[k];
		}
	}
	r.horizontal = r.max_residual <= tol;
	return r;
}

// ---- Pansu quotients ----

RVec pansu_quotient(const HorizontalControl& u, double t, double h, double tol)
{
	if (h == 0) throw std::invalid_argument("pansu_quotient needs h != 0");
	const GradedAlgebra& g = u.algebra();
	RVec zero(static_cast<std::size_t>(g.dim()), 0.0), seg;
	if (h > 0)
		seg = horizontal_lift(u.restrict(t, t + h), zero, 16, tol).x.back();
	else
		seg = negate(horizontal_lift(u.restrict(t + h, t), zero, 16, tol).x.back());
	RVec q = group_product(g, scale(-h, u(t, h > 0 ? 1 : -1)), seg);
	return dilate(g, q, 1.0 / h);
}

double fit_order(const std::vector<double>& x, const std::vector<double>& y)
{
	if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_order needs two or more points");
	double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
	for (std::size_t i = 0; i < x.size(); ++i)
	{
		double lx = std::log(x[i]), ly = std::log(y[i]);
		sx += lx;
		sy += ly;
		sxx += lx * lx;
		sxy += lx * ly;
	}
	return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderStudy pansu_order(const HorizontalControl& u, double t, const std::vector<double>& hs)
{
	OrderStudy s{hs, {}, 0};
	for (double h : hs) s.value.push_back(norm2(pansu_quotient(u, t, h)));
	s.order = fit_order(s.h, s.value);
	return s;
}

double sup_average(const HorizontalControl& u, double t, double lambda, int n)
{
	if (lambda == 0) return norm2(u(t));
	double end = t + lambda;
	if (end < u.a() || end > u.b()) throw std::out_of_range("sup_average window escapes the control domain");
	int side = lambda > 0 ? 1 : -1;
	double dt = std::abs(lambda) / n, integral = 0, best = norm2(u(t, side));
	double prev = best;
	for (int j = 1; j <= n; ++j)
	{
		double s = t + side * dt * j;
		double cur = norm2(u(s, -side));
		integral += 0.5 * (prev + cur) * dt;
		best = std::max(best, integral / (dt * j));
		prev = norm2(u(s, side));
	}
	return best;
}

// ---- Riemann sums ----

RVec group_riemann_sum(const GradedAlgebra& g, const CurveFn& gamma, const std::vector<double>& partition)
{
	if (partition.size() < 2) throw std::invalid_argument("partition needs at least two points");
	for (std::size_t k = 1; k < partition.size(); ++k)
		if (!(partition[k] > partition[k - 1])) throw std::invalid_argument("partition must be strictly increasing");
	RVec sum(static_cast<std::size_t>(g.dim()), 0.0), prev = gamma(partition[0]);
	for (std::size_t k = 1; k < partition.size(); ++k)
	{
		RVec cur = gamma(partition[k]);
		sum = add(sum, group_product(g, negate(prev), cur));
		prev = std::move(cur);
	}
	return sum;
}

RVec group_riemann_sum(const SampledCurve& c, const std::vector<std::size_t>& indices)
{
	if (indices.size() < 2) throw std::invalid_argument("partition needs at least two points");
	RVec sum(c.x.front().size(), 0.0);
	for (std::size_t k = 1; k < indices.size(); ++k)
	{
		if (indices[k] <= indices[k - 1] || indices[k] >= c.x.size())
			throw std::invalid_argument("partition indices must increase within the curve");
		sum = add(sum, group_product(*c.g, negate(c.x[indices[k - 1]]), c.x[indices[k]]));
	}
	return sum;
}

RVec riemann_limit(const GradedAlgebra& g, const CurveFn& gamma, const CurveFn& dgamma, double s, int n)
{
	RVec out = sub(gamma(s), gamma(0));
	auto integrand = [&](double l) {
		RVec x = gamma(l), w = dgamma(l), acc(x.size(), 0.0);
		for (int k = 2; k <= g.step(); ++k)
		{
			w = g.bracket(x, w);
			if (is_zero_vector(w)) break;
			axpy((k % 2 ? 1.0 : -1.0) / factorial(k), w, acc);
		}
		return acc;
	};
	if (n % 2) ++n;
	double h = s / n;
	RVec acc = add(integrand(0), integrand(s));
	for (int i = 1; i < n; ++i) axpy(i % 2 ? 4.0 : 2.0, integrand(i * h), acc);
	axpy(h / 3, acc, out);
	return out;
}

// ---- variation ----

double variation_partition(const SampledCurve& c, const HomogeneousMetric& m, int* levels)
{
	std::size_t n = c.x.size() - 1, stride = n;
	double best = 0;
	int lv = 0;
	while (true)
	{
		double s = 0;
		for (std::size_t k = 0; k + stride <= n; k += stride) s += m.distance(c.x[k], c.x[k + stride]);
		best = std::max(best, s);
		++lv;
		if (stride == 1 || stride % 2) break;
		stride /= 2;
	}
	if (levels) *levels = lv;
	return best;
}

double variation_quadrature(const HorizontalControl& u, const HomogeneousMetric& m, int n)
{
	double total = 0, len = u.b() - u.a();
	for (const auto& p : u.pieces())
	{
		int cells = std::max(2, static_cast<int>(n * (p.b - p.a) / len));
		total += simpson([&](double t) { return m.norm(p.f(t)); }, p.a, p.b, cells);
	}
	return total;
}

VariationReport variation(const SampledCurve& c, const HorizontalControl& u, const HomogeneousMetric& m)
{
	VariationReport r{};
	r.partition_sup = variation_partition(c, m, &r.dyadic_levels);
	r.quadrature = variation_quadrature(u, m);
	r.relative_gap = std::abs(r.partition_sup - r.quadrature) / std::max(r.quadrature, 1e-300);
	return r;
}

LipschitzReport verify_ac_lip_characterization(const SampledCurve& c, const HomogeneousMetric& m, double c_bound,
                                               double tol)
{
	const GradedAlgebra& g = *c.g;
	LipschitzReport r{};
	for (std::size_t k = 0; k + 1 < c.x.size(); ++k)
	{
		double dt = c.t[k + 1] - c.t[k];
		RVec d = sub(c.x[k + 1], c.x[k]);
		r.lip_first_layer = std::max(r.lip_first_layer, layer_norm(g, d, 1) / dt);
		r.lip_group = std::max(r.lip_group, m.distance(c.x[k], c.x[k + 1]) / dt);
	}
	r.ratio = r.lip_first_layer > 0 ? r.lip_group / r.lip_first_layer : std::numeric_limits<double>::infinity();
	HorizontalityReport h = is_horizontal(c, tol);
	r.contact_residual = h.max_residual;
	r.horizontal = h.horizontal;
	r.consistent = r.horizontal && r.ratio >= 1 / c_bound && r.ratio <= c_bound;
	return r;
}

} // namespace carnot
