#include "carnot/pdiff.hpp"

#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"
#include "carnot/curves.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace carnot {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

std::string describe(const RVec& x)
{
	std::ostringstream os;
	os.precision(17);
	os << "(";
	for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
	os << ")";
	return os.str();
}

std::size_t dimz(const GradedAlgebra& g) { return static_cast<std::size_t>(g.dim()); }

RVec to_rvec(const Eigen::VectorXd& v) { return RVec(v.data(), v.data() + v.size()); }
Eigen::VectorXd to_eigen(const RVec& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size())); }

RVec mul(const Eigen::MatrixXd& m, const RVec& x) { return to_rvec(m * to_eigen(x)); }

// First-layer basis vector of g as a float vector.
RVec unit(const GradedAlgebra& g, int i)
{
	RVec v(dimz(g), 0.0);
	v[static_cast<std::size_t>(i)] = 1;
	return v;
}

RVec random_unit(const HomogeneousMetric& metric, std::mt19937_64& rng)
{
	std::normal_distribution<double> nd;
	RVec v(dimz(metric.algebra()));
	do
		for (auto& c : v) c = nd(rng);
	while (norm2(v) < 1e-6);
	return metric.normalize(v);
}

Eigen::MatrixXd first_layer_columns(const GradedAlgebra& dom, const Eigen::MatrixXd& full)
{
	std::vector<int> v1 = dom.layer_indices(1);
	Eigen::MatrixXd out(full.rows(), static_cast<long>(v1.size()));
	for (std::size_t a = 0; a < v1.size(); ++a) out.col(static_cast<long>(a)) = full.col(v1[a]);
	return out;
}

// Multi-indices ordered by L1 distance from the center, with for each the
// position of an already-visited neighbour one step closer to the center.
struct GridOrder
{
	std::vector<std::vector<int>> idx;
	std::vector<long> seed; // -1 for the center
};

GridOrder grid_order(const std::vector<int>& counts)
{
	std::size_t total = 1;
	for (int c : counts) total *= static_cast<std::size_t>(c);
	std::vector<std::vector<int>> all;
	for (std::size_t code = 0; code < total; ++code)
	{
		std::vector<int> m(counts.size());
		std::size_t rest = code;
		for (std::size_t a = counts.size(); a-- > 0;)
		{
			m[a] = static_cast<int>(rest % static_cast<std::size_t>(counts[a]));
			rest /= static_cast<std::size_t>(counts[a]);
		}
		all.push_back(m);
	}
	auto dist = [&](const std::vector<int>& m) {
		int d = 0;
		for (std::size_t a = 0; a < m.size(); ++a) d += std::abs(2 * m[a] - (counts[a] - 1));
		return d;
	};
	std::stable_sort(all.begin(), all.end(), [&](const auto& x, const auto& y) { return dist(x) < dist(y); });
	std::map<std::vector<int>, long> pos;
	GridOrder g;
	for (std::size_t p = 0; p < all.size(); ++p)
	{
		const auto& m = all[p];
		long s = -1;
		for (std::size_t a = 0; a < m.size() && s < 0; ++a)
		{
			int c2 = counts[a] - 1;
			if (2 * m[a] == c2) continue;
			auto n = m;
			n[a] += 2 * m[a] > c2 ? -1 : 1;
			// stepping across the center on even counts lands at equal distance
			auto it = pos.find(n);
			if (it != pos.end()) s = it->second;
		}
		pos[m] = static_cast<long>(p);
		g.idx.push_back(m);
		g.seed.push_back(p == 0 ? -1 : (s < 0 ? 0 : s));
	}
	return g;
}

double coord(int i, int count, double half)
{
	return count == 1 ? 0.0 : -half + 2 * half * i / (count - 1);
}

// ---- nearest neighbours ----

template <std::size_t D>
std::vector<double> nearest_fixed(const std::vector<RVec>& queries, const std::vector<RVec>& data)
{
	using Point = bg::model::point<double, D, bg::cs::cartesian>;
	auto make = [](const RVec& v) {
		Point p;
		[&]<std::size_t... I>(std::index_sequence<I...>) { (bg::set<I>(p, v[I]), ...); }(std::make_index_sequence<D>{});
		return p;
	};
	std::vector<Point> pts;
	pts.reserve(data.size());
	for (const auto& v : data) pts.push_back(make(v));
	bgi::rtree<Point, bgi::rstar<16>> tree(pts.begin(), pts.end());
	std::vector<double> out;
	out.reserve(queries.size());
	for (const auto& q : queries)
	{
		std::vector<Point> hit;
		tree.query(bgi::nearest(make(q), 1), std::back_inserter(hit));
		out.push_back(hit.empty() ? std::numeric_limits<double>::infinity() : bg::distance(make(q), hit[0]));
	}
	return out;
}

std::vector<double> nearest(const std::vector<RVec>& queries, const std::vector<RVec>& data)
{
	if (queries.empty()) return {};
	switch (queries[0].size())
	{
	case 1: return nearest_fixed<1>(queries, data);
	case 2: return nearest_fixed<2>(queries, data);
	case 3: return nearest_fixed<3>(queries, data);
	case 4: return nearest_fixed<4>(queries, data);
	case 5: return nearest_fixed<5>(queries, data);
	case 6: return nearest_fixed<6>(queries, data);
	case 7: return nearest_fixed<7>(queries, data);
	case 8: return nearest_fixed<8>(queries, data);
	case 9: return nearest_fixed<9>(queries, data);
	case 10: return nearest_fixed<10>(queries, data);
	default: break;
	}
	std::vector<double> out;
	for (const auto& q : queries)
	{
		double best = std::numeric_limits<double>::infinity();
		for (const auto& d : data) best = std::min(best, norm2(sub(q, d)));
		out.push_back(best);
	}
	return out;
}

} // namespace

// ---- maps ----

bool PDMap::in_domain(const RVec& x) const
{
	if (static_cast<int>(x.size()) != domain->dim()) return false;
	for (std::size_t i = 0; i < box.size(); ++i)
		if (!(x[i] >= box[i].first && x[i] <= box[i].second)) return false;
	return true;
}

RVec PDMap::operator()(const RVec& x) const
{
	if (!in_domain(x)) throw std::out_of_range(name + ": point outside the domain box");
	return f(x);
}

RVec horizontal_derivative(const PDMap& m, const RVec& x, const RVec& X, double h)
{
	const GradedAlgebra& dom = *m.domain;
	for (int i = 0; i < dom.dim(); ++i)
		if (dom.layer_of(i) != 1 && X[static_cast<std::size_t>(i)] != 0.0)
			throw std::invalid_argument("horizontal_derivative: direction is not horizontal");
	auto at = [&](double s) { return m(group_product(dom, x, scale(s, X))); };
	RVec d = sub(scale(8.0, sub(at(h), at(-h))), sub(at(2 * h), at(-2 * h)));
	d = scale(1.0 / (12 * h), d);
	return left_trivialized(*m.codomain, m(x), d);
}

Eigen::MatrixXd extend_to_homomorphism(const GradedAlgebra& dom, const GradedAlgebra& cod, const Eigen::MatrixXd& d1)
{
	std::vector<int> v1 = dom.layer_indices(1);
	if (d1.rows() != cod.dim() || d1.cols() != static_cast<long>(v1.size()))
		throw std::invalid_argument("first-layer differential has the wrong shape");
	Eigen::MatrixXd full = Eigen::MatrixXd::Zero(cod.dim(), dom.dim());
	std::vector<int> c1 = cod.layer_indices(1);
	for (std::size_t a = 0; a < v1.size(); ++a)
		for (int r : c1) full(r, v1[a]) = d1(r, static_cast<long>(a));
	for (int k = 1; k < dom.step(); ++k)
	{
		std::vector<int> lk = dom.layer_indices(k), next = dom.layer_indices(k + 1);
		if (next.empty()) continue;
		Eigen::MatrixXd b(static_cast<long>(next.size()), static_cast<long>(v1.size() * lk.size()));
		Eigen::MatrixXd img(cod.dim(), b.cols());
		long col = 0;
		for (int i : v1)
			for (int j : lk)
			{
				RVec br = dom.bracket(unit(dom, i), unit(dom, j));
				for (std::size_t r = 0; r < next.size(); ++r) b(static_cast<long>(r), col) = br[static_cast<std::size_t>(next[r])];
				RVec lb = cod.bracket(to_rvec(full.col(i)), to_rvec(full.col(j)));
				img.col(col) = to_eigen(lb);
				++col;
			}
		Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> dec(b.transpose());
		if (dec.rank() < static_cast<long>(next.size()))
			throw std::invalid_argument("domain layer " + std::to_string(k + 1) + " is not generated by brackets");
		Eigen::MatrixXd lnext = dec.solve(img.transpose()).transpose(); // cod.dim x |next|
		for (std::size_t r = 0; r < next.size(); ++r) full.col(next[r]) = lnext.col(static_cast<long>(r));
	}
	return full;
}

Eigen::MatrixXd lift_differential(const GradedAlgebra& cod, const Eigen::MatrixXd& d1, const RVec& fx)
{
	Eigen::MatrixXd out(d1.rows(), d1.cols());
	for (long c = 0; c < d1.cols(); ++c) out.col(c) = to_eigen(contact_velocity(cod, fx, to_rvec(d1.col(c))));
	return out;
}

Rational rationalize(double v, long max_den)
{
	if (!std::isfinite(v)) throw std::invalid_argument("cannot rationalize a non-finite value");
	if (std::abs(v) > 1e12) return exact_from_double(v);
	// continued fraction convergents
	long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
	double x = v;
	for (int it = 0; it < 64; ++it)
	{
		double a = std::floor(x);
		long long p2 = static_cast<long long>(a) * p1 + p0, q2 = static_cast<long long>(a) * q1 + q0;
		if (q2 > max_den) break;
		p0 = p1;
		q0 = q1;
		p1 = p2;
		q1 = q2;
		double frac = x - a;
		if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - v) <= 1e-15 * std::max(1.0, std::abs(v)) ||
		    frac < 1e-300)
			break;
		x = 1 / frac;
	}
	return Rational(static_cast<long>(p1), static_cast<long>(q1));
}

QMatrix rationalize(const Eigen::MatrixXd& a, long max_den)
{
	QMatrix q(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
	for (long i = 0; i < a.rows(); ++i)
		for (long j = 0; j < a.cols(); ++j)
			q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = rationalize(a(i, j), max_den);
	return q;
}

PansuReport pansu_differential(const PDMap& m, const RVec& x, const PansuOptions& opt)
{
	const GradedAlgebra &dom = *m.domain, &cod = *m.codomain;
	std::vector<int> v1 = dom.layer_indices(1), c1 = cod.layer_indices(1);
	PansuReport r;
	if (m.d1)
	{
		r.first_layer = m.d1(x);
		r.analytic = true;
	}
	else
	{
		// Richardson on the O(h^4) stencil over the last two steps
		r.first_layer = Eigen::MatrixXd::Zero(cod.dim(), static_cast<long>(v1.size()));
		for (std::size_t a = 0; a < v1.size(); ++a)
		{
			std::vector<RVec> est;
			for (double h : opt.fd_steps) est.push_back(horizontal_derivative(m, x, unit(dom, v1[a]), h));
			RVec best = est.back();
			if (est.size() >= 2)
			{
				double ratio = opt.fd_steps[est.size() - 2] / opt.fd_steps.back();
				double w = std::pow(ratio, 4);
				best = scale(1 / (w - 1), sub(scale(w, est.back()), est[est.size() - 2]));
			}
			for (int row : c1) r.first_layer(row, static_cast<long>(a)) = best[static_cast<std::size_t>(row)];
		}
	}
	r.matrix = extend_to_homomorphism(dom, cod, r.first_layer);
	double scale_l = std::max(1.0, r.matrix.cwiseAbs().maxCoeff());
	r.homomorphism = true;
	for (int i = 0; i < dom.dim(); ++i)
		for (int j = i + 1; j < dom.dim(); ++j)
		{
			RVec lhs = mul(r.matrix, dom.bracket(unit(dom, i), unit(dom, j)));
			RVec rhs = cod.bracket(to_rvec(r.matrix.col(i)), to_rvec(r.matrix.col(j)));
			if (norm_inf(sub(lhs, rhs)) > 1e-8 * scale_l * scale_l) r.homomorphism = false;
		}

	// defect at each scale
	HomogeneousMetric dm = default_metric(m.domain), cm = default_metric(m.codomain);
	std::mt19937_64 rng(opt.seed);
	std::vector<RVec> dirs;
	for (std::size_t k = 0; k < opt.directions; ++k) dirs.push_back(random_unit(dm, rng));
	std::optional<QMatrix> lq;
	std::optional<QVec> xq, fxq;
	if (m.exact_f)
	{
		lq = rationalize(r.matrix);
		xq = to_rational(x);
		fxq = m.exact_f(*xq);
	}
	RVec fx = m(x);
	for (double s : opt.scales)
	{
		double sup = 0;
		for (const auto& h : dirs)
		{
			RVec hs = dilate(dom, h, s);
			RVec y = group_product(dom, x, hs);
			if (!m.in_domain(y)) continue;
			double d;
			if (m.exact_f)
			{
				QVec hq = to_rational(hs);
				QVec q = group_product(cod, negate(*fxq), m.exact_f(group_product(dom, *xq, hq)));
				QVec diff = group_product(cod, negate(q), lq->apply(hq));
				d = cm.norm(to_double(diff));
			}
			else
				d = cm.distance(group_product(cod, negate(fx), m(y)), mul(r.matrix, hs));
			sup = std::max(sup, d / s);
		}
		r.scales.push_back(s);
		r.defect.push_back(sup);
	}
	// gauge defects of smooth contact maps decay like s^(1/step); require a
	// monotone decrease that at least halves the defect, or the absolute tolerance
	r.converged = !r.defect.empty() && r.defect.back() <= std::max(opt.defect_tol, 0.5 * r.defect.front());
	for (std::size_t k = 1; k < r.defect.size(); ++k)
		if (r.defect[k] > 1.1 * r.defect[k - 1] + 1e-12) r.converged = false;
	return r;
}

GradedMorphism pansu_morphism(const PDMap& m, const RVec& x, const PansuOptions& opt)
{
	PansuOptions o = opt;
	o.scales = {};
	PansuReport r = pansu_differential(m, x, o);
	return GradedMorphism(m.domain, m.codomain, rationalize(r.matrix));
}

ContactReport contact_check(const PDMap& m, const std::vector<RVec>& points, double h, double tol)
{
	const GradedAlgebra& cod = *m.codomain;
	ContactReport r;
	for (const auto& x : points)
		for (int i : m.domain->layer_indices(1))
		{
			RVec w = horizontal_derivative(m, x, unit(*m.domain, i), h);
			double res = std::sqrt(std::max(0.0, dot(w, w) - std::pow(layer_norm(cod, w, 1), 2)));
			if (res > r.max_residual)
			{
				r.max_residual = res;
				r.worst_point = x;
				r.worst_direction = i;
			}
		}
	r.contact = r.max_residual <= tol;
	return r;
}

MeanValueReport mean_value_ratio(const PDMap& m, const HomogeneousMetric& dom_metric,
                                 const HomogeneousMetric& cod_metric, const RVec& center, double spread, double r0,
                                 int nbins, std::size_t pairs_per_bin, std::uint64_t seed)
{
	const GradedAlgebra &dom = *m.domain, &cod = *m.codomain;
	MeanValueReport rep;
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> ud(-1, 1), u01(0, 1);
	PansuOptions po;
	po.scales = {};
	for (int k = 0; k < nbins; ++k)
	{
		double hi = r0 * std::pow(4.0, -k), lo = hi / 2;
		MeanValueBin bin{lo, hi, 0, 0};
		std::size_t misses = 0;
		while (bin.count < pairs_per_bin)
		{
			RVec x = center;
			for (auto& c : x) c += spread * ud(rng);
			RVec v = dilate(dom, random_unit(dom_metric, rng), lo + (hi - lo) * u01(rng));
			RVec y = group_product(dom, x, v);
			if (!m.in_domain(x) || !m.in_domain(y))
			{
				if (++misses > 100 * pairs_per_bin) throw std::invalid_argument("mean_value_ratio: sampling region leaves the domain");
				continue;
			}
			Eigen::MatrixXd l = pansu_differential(m, x, po).matrix;
			RVec q = group_product(cod, negate(m(x)), m(y));
			double ratio = cod_metric.distance(q, mul(l, v)) / dom_metric.norm(v);
			bin.sup = std::max(bin.sup, ratio);
			++bin.count;
		}
		rep.bins.push_back(bin);
	}
	rep.decays = true;
	for (std::size_t k = 1; k < rep.bins.size(); ++k)
		if (rep.bins[k].sup > 1.1 * rep.bins[k - 1].sup + 1e-12) rep.decays = false;
	if (!rep.bins.empty() && rep.bins.front().sup > 0) rep.last_over_first = rep.bins.back().sup / rep.bins.front().sup;
	return rep;
}

NewtonResult newton_solve(const std::function<RVec(const RVec&)>& r, RVec x, const NewtonOptions& opt)
{
	RVec f = r(x);
	double fn = norm2(f);
	int it = 0;
	for (; it < opt.max_iter && fn > opt.tol; ++it)
	{
		Eigen::MatrixXd jac(static_cast<long>(f.size()), static_cast<long>(x.size()));
		for (std::size_t i = 0; i < x.size(); ++i)
		{
			double h = opt.fd_scale * std::max(1.0, std::abs(x[i]));
			RVec xp = x;
			xp[i] += h;
			jac.col(static_cast<long>(i)) = (to_eigen(r(xp)) - to_eigen(f)) / h;
		}
		RVec dx = to_rvec(jac.completeOrthogonalDecomposition().solve(-to_eigen(f)));
		double t = 1;
		bool moved = false;
		while (t > 1e-10)
		{
			RVec xn = x;
			axpy(t, dx, xn);
			RVec fnew;
			try
			{
				fnew = r(xn);
			}
			catch (const std::out_of_range&)
			{
				t /= 2;
				continue;
			}
			double nn = norm2(fnew);
			if (nn <= (1 - 1e-4 * t) * fn)
			{
				x = std::move(xn);
				f = std::move(fnew);
				fn = nn;
				moved = true;
				break;
			}
			t /= 2;
		}
		if (!moved) break;
	}
	return {x, fn, it, fn <= opt.tol};
}

InverseResult local_inverse(const PDMap& m, const RVec& x_bar, const RVec& y, const HomogeneousMetric& dom_metric,
                            const HomogeneousMetric& cod_metric, double tol, std::uint64_t seed)
{
	if (m.domain->dim() != m.codomain->dim()) throw std::invalid_argument("local_inverse needs equal dimensions");
	PansuOptions po;
	po.scales = {};
	Eigen::MatrixXd l = pansu_differential(m, x_bar, po).matrix;
	if (std::abs(l.determinant()) < 1e-12) throw std::invalid_argument("local_inverse: singular differential");
	NewtonOptions no;
	no.tol = tol;
	NewtonResult nr = newton_solve([&](const RVec& x) { return sub(m(x), y); }, x_bar, no);
	if (!nr.converged)
		throw std::runtime_error("local_inverse: no convergence (residual " + std::to_string(nr.residual) + ")");
	InverseResult out{nr.x, cod_metric.distance(m(nr.x), y), nr.iterations, std::numeric_limits<double>::infinity()};
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> ud(-1e-2, 1e-2);
	for (int k = 0; k < 64; ++k)
	{
		RVec a = nr.x, b = nr.x;
		for (auto& c : a) c += ud(rng);
		for (auto& c : b) c += ud(rng);
		if (!m.in_domain(a) || !m.in_domain(b)) continue;
		out.beta = std::min(out.beta, cod_metric.distance(m(a), m(b)) / dom_metric.distance(a, b));
	}
	return out;
}

// ---- implicit function ----

NewtonResult implicit_node(const PDMap& m, const ImplicitSolution& s, const RVec& n, const RVec& h0, double tol)
{
	const GradedAlgebra& g = *m.domain;
	RVec target = m(s.x_bar);
	RVec base = group_product(g, s.x_bar, n);
	auto residual = [&](const RVec& c) {
		RVec h(dimz(g), 0.0);
		for (std::size_t j = 0; j < c.size(); ++j) axpy(c[j], s.h_basis[j], h);
		return sub(m(group_product(g, base, h)), target);
	};
	// coordinates of h0 in the complement basis
	RVec c0(s.h_basis.size(), 0.0);
	for (std::size_t j = 0; j < s.h_basis.size(); ++j)
	{
		const RVec& b = s.h_basis[j];
		c0[j] = dot(h0, b) / dot(b, b);
	}
	NewtonOptions no;
	no.tol = tol;
	NewtonResult nr = newton_solve(residual, c0, no);
	RVec h(dimz(g), 0.0);
	for (std::size_t j = 0; j < nr.x.size(); ++j) axpy(nr.x[j], s.h_basis[j], h);
	nr.x = h;
	return nr;
}

ImplicitSolution implicit_function(const PDMap& m, const RVec& x_bar, const HomogeneousMetric& dom_metric,
                                   const ImplicitOptions& opt)
{
	const GradedAlgebra& g = *m.domain;
	GradedMorphism l = pansu_morphism(m, x_bar);
	EpiClassification c = classify_epimorphism(l);
	if (c.verdict != EpiVerdict::h_epimorphism)
		throw std::invalid_argument("implicit_function: differential is " + to_string(c.verdict) + ", not an h-epimorphism");
	ImplicitSolution s{x_bar, c.kernel, *c.witness, {}, {}, {}, {}, {}, 0, 0, 0, 0, 0};
	for (const auto& v : s.kernel.basis()) s.n_basis.push_back(to_double(v));
	// orthogonal-friendly: the complement basis is RREF, so coordinates read off by pivots
	for (const auto& v : s.complement.basis()) s.h_basis.push_back(to_double(v));
	std::vector<int> n_layer;
	for (int l = 1; l <= g.step(); ++l)
		for (int k = 0; k < s.kernel.layer_dim(l); ++k) n_layer.push_back(l);
	std::vector<int> counts = opt.nodes;
	if (counts.empty())
		for (int l : n_layer) counts.push_back(l == 1 ? 21 : 3);
	if (counts.size() != s.n_basis.size()) throw std::invalid_argument("one node count per kernel basis vector expected");
	GridOrder order = grid_order(counts);

	double radius = opt.radius;
	RVec failed_node;
	for (int attempt = 0; attempt < 8; ++attempt, radius /= 2)
	{
		s.nodes.assign(order.idx.size(), {});
		s.phi.assign(order.idx.size(), {});
		s.residual.assign(order.idx.size(), 0);
		bool ok = true;
		for (std::size_t p = 0; p < order.idx.size() && ok; ++p)
		{
			RVec n(dimz(g), 0.0);
			for (std::size_t a = 0; a < counts.size(); ++a)
				axpy(coord(order.idx[p][a], counts[a], std::pow(radius, n_layer[a])), s.n_basis[a], n);
			RVec seed = order.seed[p] < 0 ? RVec(dimz(g), 0.0) : s.phi[static_cast<std::size_t>(order.seed[p])];
			NewtonResult nr;
			try
			{
				nr = implicit_node(m, s, n, seed, opt.tol);
			}
			catch (const std::out_of_range&)
			{
				failed_node = n;
				ok = false;
				break;
			}
			if (!nr.converged)
			{
				failed_node = n;
				ok = false;
			}
			s.nodes[p] = n;
			s.phi[p] = nr.x;
			s.residual[p] = nr.residual;
		}
		if (ok)
		{
			s.radius = radius;
			break;
		}
		if (attempt == 7) throw std::runtime_error("implicit_function: Newton failed at every grid radius, last at node " +
			                         describe(failed_node));
	}
	s.max_residual = *std::max_element(s.residual.begin(), s.residual.end());

	// uniqueness: restarts from perturbed seeds
	std::mt19937_64 rng(opt.seed);
	std::uniform_real_distribution<double> ud(-opt.restart_spread, opt.restart_spread);
	for (std::size_t p = 0; p < s.nodes.size(); ++p)
		for (int k = 0; k < opt.restarts; ++k)
		{
			RVec h0 = s.phi[p];
			for (const auto& b : s.h_basis) axpy(ud(rng), b, h0);
			double gap;
			try
			{
				NewtonResult nr = implicit_node(m, s, s.nodes[p], h0, opt.tol);
				gap = nr.converged ? norm_inf(sub(nr.x, s.phi[p])) : std::numeric_limits<double>::infinity();
			}
			catch (const std::out_of_range&)
			{
				gap = std::numeric_limits<double>::infinity();
			}
			s.max_restart_gap = std::max(s.max_restart_gap, gap);
		}

	if (opt.holder)
	{
		double inv_step = 1.0 / g.step();
		for (std::size_t p = 0; p < s.nodes.size(); ++p)
			for (std::size_t q = 0; q < s.nodes.size(); ++q)
			{
				if (p == q) continue;
				double num = dom_metric.distance(s.phi[p], s.phi[q]);
				RVec w = group_product(g, negate(s.phi[q]),
				                       group_product(g, group_product(g, negate(s.nodes[p]), s.nodes[q]), s.phi[q]));
				double den = dom_metric.norm(w);
				if (den > 0) s.kappa = std::max(s.kappa, num / den);
				double dn = norm2(sub(s.nodes[p], s.nodes[q]));
				if (dn > 0) s.holder_const = std::max(s.holder_const, num / std::pow(dn, inv_step));
			}
	}
	return s;
}

// ---- rank theorem ----

RankParametrization rank_parametrization(const PDMap& m, const RVec& x_bar, const HomogeneousMetric& cod_metric,
                                         double radius, int per_axis, std::uint64_t)
{
	const GradedAlgebra& cod = *m.codomain;
	GradedMorphism t = pansu_morphism(m, x_bar);
	MonoClassification mc = classify_monomorphism(t);
	if (mc.verdict != MonoVerdict::h_monomorphism)
		throw std::invalid_argument("rank_parametrization: differential is " + to_string(mc.verdict));
	RankParametrization out{mc.image, *mc.normal_complement, mc.projection->matrix(), {}, {}, {}, 0, 0};
	QMatrix pq = out.projection;
	Eigen::MatrixXd p(static_cast<long>(pq.rows()), static_cast<long>(pq.cols()));
	for (std::size_t i = 0; i < pq.rows(); ++i)
		for (std::size_t j = 0; j < pq.cols(); ++j) p(static_cast<long>(i), static_cast<long>(j)) = pq(i, j).get_d();
	std::vector<RVec> hb;
	std::vector<int> hl;
	for (int l = 1; l <= cod.step(); ++l)
		for (const auto& v : mc.image.layer(l).basis())
		{
			hb.push_back(to_double(v));
			hl.push_back(l);
		}
	RVec h_bar = mul(p, m(x_bar));
	GridOrder order = grid_order(std::vector<int>(hb.size(), per_axis));
	std::vector<RVec> psi(order.idx.size());
	for (std::size_t k = 0; k < order.idx.size(); ++k)
	{
		RVec w(dimz(cod), 0.0);
		for (std::size_t a = 0; a < hb.size(); ++a)
			axpy(coord(order.idx[k][a], per_axis, std::pow(radius, hl[a])), hb[a], w);
		RVec h = group_product(cod, h_bar, w);
		RVec seed = order.seed[k] < 0 ? x_bar : psi[static_cast<std::size_t>(order.seed[k])];
		NewtonResult nr = newton_solve([&](const RVec& x) { return sub(mul(p, m(x)), h); }, seed);
		if (!nr.converged)
			throw std::runtime_error("rank_parametrization: inversion failed at node " + describe(h) + " (residual " +
			                         std::to_string(nr.residual) + ")");
		psi[k] = nr.x;
		RVec phi = group_product(cod, negate(h), m(nr.x));
		double res = std::max(nr.residual, norm2(mul(p, phi)));
		res = std::max(res, norm_inf(sub(m(nr.x), group_product(cod, h, phi))));
		out.max_residual = std::max(out.max_residual, res);
		out.h.push_back(h);
		out.psi.push_back(nr.x);
		out.phi.push_back(phi);
	}
	for (std::size_t a = 0; a < out.h.size(); ++a)
		for (std::size_t b = a + 1; b < out.h.size(); ++b)
		{
			double d = cod_metric.distance(out.h[a], out.h[b]);
			if (d > 0) out.lipschitz = std::max(out.lipschitz, norm2(sub(out.phi[a], out.phi[b])) / d);
		}
	return out;
}

// ---- blow-ups ----

double local_hausdorff(const std::vector<RVec>& a, const std::vector<RVec>& b, const HomogeneousMetric& m, double R)
{
	auto clip = [&](const std::vector<RVec>& v) {
		std::vector<RVec> out;
		for (const auto& x : v)
			if (m.norm(x) <= R) out.push_back(x);
		return out;
	};
	std::vector<RVec> ac = clip(a), bc = clip(b);
	double d = 0;
	for (double x : nearest(ac, b)) d = std::max(d, x);
	for (double x : nearest(bc, a)) d = std::max(d, x);
	return d;
}

BlowupReport tangent_cone_samples(const BlowupSampler& sampler, const RVec& x_bar, const HomogeneousMetric& m,
                                  const std::vector<double>& scales, double R)
{
	const GradedAlgebra& g = m.algebra();
	BlowupReport rep;
	rep.R = R;
	for (double lam : scales)
	{
		auto pairs = sampler(lam);
		std::vector<RVec> cloud, cone;
		for (const auto& [c, s] : pairs)
		{
			cone.push_back(c);
			cloud.push_back(dilate(g, group_product(g, negate(x_bar), s), 1.0 / lam));
		}
		std::size_t inside = 0;
		for (const auto& p : cloud)
			if (m.norm(p) <= R) ++inside;
		if (inside < 10) throw std::runtime_error("tangent_cone_samples: too few samples at lambda = " + std::to_string(lam));
		rep.scales.push_back(lam);
		rep.distance.push_back(local_hausdorff(cloud, cone, m, R));
		rep.points.push_back(inside);
	}
	rep.decreasing = true;
	for (std::size_t k = 1; k < rep.distance.size(); ++k)
		if (rep.distance[k] > 1.1 * rep.distance[k - 1] + 1e-12) rep.decreasing = false;
	return rep;
}

BlowupSampler implicit_blowup_sampler(const PDMap& m, const ImplicitSolution& s, const HomogeneousMetric& metric,
                                      double R, std::size_t count, std::uint64_t seed)
{
	const GradedAlgebra& g = *m.domain;
	std::vector<int> n_layer;
	for (int l = 1; l <= g.step(); ++l)
		for (int k = 0; k < s.kernel.layer_dim(l); ++k) n_layer.push_back(l);
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> ud(-1, 1);
	double big = 1.25 * R;
	auto cone = std::make_shared<std::vector<RVec>>();
	for (std::size_t tries = 0; cone->size() < count && tries < 100 * count; ++tries)
	{
		RVec p(dimz(g), 0.0);
		for (std::size_t a = 0; a < s.n_basis.size(); ++a) axpy(ud(rng) * std::pow(big, n_layer[a]), s.n_basis[a], p);
		if (metric.norm(p) <= big) cone->push_back(p);
	}
	return [&m, &s, cone, &g](double lam) {
		std::vector<std::pair<RVec, RVec>> out;
		for (const auto& c : *cone)
		{
			RVec n = dilate(g, c, lam);
			try
			{
				NewtonResult nr = implicit_node(m, s, n, RVec(dimz(g), 0.0), 1e-13);
				if (!nr.converged) continue;
				out.emplace_back(c, group_product(g, group_product(g, s.x_bar, n), nr.x));
			}
			catch (const std::out_of_range&)
			{
			}
		}
		return out;
	};
}

TangentDimReport tangent_dim_check(const ImplicitSolution& s, const GradedAlgebra& codomain)
{
	TangentDimReport r{};
	r.q_kernel = homogeneous_dimension(s.kernel);
	r.q_domain = homogeneous_dimension(whole_algebra(s.kernel.algebra_ptr()));
	int q = 0;
	for (int i = 0; i < codomain.dim(); ++i) q += codomain.layer_of(i);
	r.q_codomain = q;
	r.ok = r.q_kernel == r.q_domain - r.q_codomain;
	return r;
}

int bracket_rank(const HomogeneousSubalgebra& a)
{
	auto b = a.basis();
	std::vector<QVec> br;
	for (std::size_t i = 0; i < b.size(); ++i)
		for (std::size_t j = i + 1; j < b.size(); ++j) br.push_back(a.algebra().bracket(b[i], b[j]));
	return static_cast<int>(Subspace::span(dimz(a.algebra()), br).dim());
}

// ---- registered maps ----

PDMap example_level_map()
{
	PDMap m;
	m.domain = heisenberg(2);
	m.codomain = abelian(2);
	m.name = "level_map";
	m.f = [](const RVec& x) { return RVec{std::hypot(x[1], x[2]), x[3]}; };
	m.d1 = [](const RVec& x) {
		double r = std::hypot(x[1], x[2]);
		Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 4);
		d(0, 1) = x[1] / r;
		d(0, 2) = x[2] / r;
		d(1, 3) = 1;
		return d;
	};
	m.box = {{-10, 10}, {-10, 10}, {-10, 10}, {1e-3, 10}, {-10, 10}};
	return m;
}

PDMap linear_map(AlgebraPtr domain, AlgebraPtr codomain, const QMatrix& l)
{
	PDMap m;
	m.domain = domain;
	m.codomain = codomain;
	m.name = "linear";
	Eigen::MatrixXd ld(static_cast<long>(l.rows()), static_cast<long>(l.cols()));
	for (std::size_t i = 0; i < l.rows(); ++i)
		for (std::size_t j = 0; j < l.cols(); ++j) ld(static_cast<long>(i), static_cast<long>(j)) = l(i, j).get_d();
	m.f = [ld](const RVec& x) { return mul(ld, x); };
	m.exact_f = [l](const QVec& x) { return l.apply(x); };
	m.d1 = [ld, domain](const RVec&) { return first_layer_columns(*domain, ld); };
	return m;
}

PDMap dilation_map(AlgebraPtr g, const Rational& r)
{
	PDMap m;
	m.domain = m.codomain = g;
	m.name = "dilation";
	double rd = r.get_d();
	m.f = [g, rd](const RVec& x) { return dilate(*g, x, rd); };
	m.exact_f = [g, r](const QVec& x) { return dilate(*g, x, r); };
	m.d1 = [g, rd](const RVec&) {
		Eigen::MatrixXd full = Eigen::MatrixXd::Identity(g->dim(), g->dim()) * rd;
		return first_layer_columns(*g, full);
	};
	return m;
}

PDMap translation_map(AlgebraPtr g, const RVec& p)
{
	PDMap m;
	m.domain = m.codomain = g;
	m.name = "translation";
	m.f = [g, p](const RVec& x) { return group_product(*g, p, x); };
	QVec pq = to_rational(p);
	m.exact_f = [g, pq](const QVec& x) { return group_product(*g, pq, x); };
	m.d1 = [g](const RVec&) { return first_layer_columns(*g, Eigen::MatrixXd::Identity(g->dim(), g->dim())); };
	return m;
}

PDMap shear_map()
{
	PDMap m;
	m.domain = m.codomain = heisenberg(1);
	m.name = "shear";
	m.f = [](const RVec& x) { return RVec{x[0], x[1] + x[0] * x[0], x[2] + x[0] * x[0] * x[0] / 6}; };
	m.exact_f = [](const QVec& x) { return QVec{x[0], x[1] + x[0] * x[0], x[2] + x[0] * x[0] * x[0] / 6}; };
	return m;
}

PDMap bend_map()
{
	PDMap m;
	m.domain = m.codomain = heisenberg(1);
	m.name = "bend";
	m.f = [](const RVec& x) { return RVec{x[0], x[1], x[2] + x[0] * x[0]}; };
	return m;
}

PDMap parabola_sheet_map(double e)
{
	PDMap m;
	m.domain = abelian(2);
	m.codomain = heisenberg(2);
	m.name = "parabola_sheet";
	m.f = [e](const RVec& t) { return RVec{t[0], e * t[0] * t[0], t[1], 0, e * t[0] * t[0] * t[0] / 6}; };
	m.d1 = [e](const RVec& t) {
		Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 2);
		d(0, 0) = 1;
		d(1, 0) = 2 * e * t[0];
		d(2, 1) = 1;
		return d;
	};
	return m;
}

PDMap coordinate_function(AlgebraPtr g, int index)
{
	if (index < 0 || index >= g->dim() || g->layer_of(index) != 1)
		throw std::invalid_argument("coordinate_function: index must name a first-layer coordinate");
	PDMap m;
	m.domain = g;
	m.codomain = abelian(1);
	m.name = "coordinate";
	auto i = static_cast<std::size_t>(index);
	m.f = [i](const RVec& x) { return RVec{x[i]}; };
	m.exact_f = [i](const QVec& x) { return QVec{x[i]}; };
	m.d1 = [g, index](const RVec&) {
		std::vector<int> v1 = g->layer_indices(1);
		Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, static_cast<long>(v1.size()));
		for (std::size_t a = 0; a < v1.size(); ++a)
			if (v1[a] == index) d(0, static_cast<long>(a)) = 1;
		return d;
	};
	return m;
}

} // namespace carnot
